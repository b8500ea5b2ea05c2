use std::path::{Path, PathBuf};

use linctx::contexts::{
    classify_lcr, synthesize_s_context, ContextError, LcrForm, LinearContext, NextContext,
    FILE_HOLE,
};
use linctx::lts::{
    classify_trace, parse_trace, trace_equiv, traces_at, ArgumentPool, Bounds, EquivVerdict,
    LtsError, PoolError, TraceClass, TraceSyntaxError,
};
use linctx::metatheory::{run_check, CheckConfig, CheckError, Fragment, CHECKS};
use linctx::reduction::{evaluate, EvalError};
use linctx::{check_program, parse_term, parse_type, Ident, SyntaxError, Term, Type, TypeError};
use serde_json::json;

use crate::output::Output;
use crate::{FragmentArg, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_INCOMPLETE: u8 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("cannot read {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{err}")]
    Syntax {
        path: Option<PathBuf>,
        err: SyntaxError,
    },
    #[error("{err}")]
    Type {
        path: Option<PathBuf>,
        err: TypeError,
    },
    #[error("{err}")]
    Trace {
        path: PathBuf,
        err: TraceSyntaxError,
    },
    #[error("{err}")]
    Pool { path: PathBuf, err: PoolError },
    #[error(transparent)]
    Context(ContextError),
    #[error(transparent)]
    Lts(LtsError),
    #[error(transparent)]
    Eval(EvalError),
    #[error(transparent)]
    Check(CheckError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "Io",
            CliError::Syntax { .. } => "SyntaxError",
            CliError::Type { err, .. } => err.kind(),
            CliError::Context(ContextError::IllTyped(err))
            | CliError::Lts(LtsError::IllTyped(err)) => err.kind(),
            CliError::Trace { .. } => "TraceSyntaxError",
            CliError::Pool { .. } => "PoolError",
            CliError::Context(_) => "ContextError",
            CliError::Lts(_) => "LtsError",
            CliError::Eval(_) => "EvalError",
            CliError::Check(_) => "UnknownCheck",
        }
    }

    pub fn file(&self) -> Option<&Path> {
        match self {
            CliError::Io { path, .. }
            | CliError::Trace { path, .. }
            | CliError::Pool { path, .. } => Some(path),
            CliError::Syntax { path, .. } | CliError::Type { path, .. } => path.as_deref(),
            _ => None,
        }
    }

    /// Line and column of a syntax error.
    pub fn position(&self) -> Option<(usize, usize)> {
        match self {
            CliError::Syntax { err, .. } => Some((err.line, err.column)),
            _ => None,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load_term(path: &Path) -> Result<Term, CliError> {
    parse_term(&read(path)?).map_err(|err| CliError::Syntax {
        path: Some(path.to_path_buf()),
        err,
    })
}

/// A closed, well-typed program and its type.
fn load_program(path: &Path) -> Result<(Term, Type), CliError> {
    let e = load_term(path)?;
    let ty = check_program(&e).map_err(|err| CliError::Type {
        path: Some(path.to_path_buf()),
        err,
    })?;
    Ok((e, ty))
}

fn hole_type(text: &str) -> Result<Type, CliError> {
    parse_type(text).map_err(|err| CliError::Syntax { path: None, err })
}

fn pool(run: &RunConfig) -> Result<ArgumentPool, CliError> {
    let size = run.pool_size as usize;
    match &run.pool {
        Some(path) => ArgumentPool::parse(&read(path)?, size).map_err(|err| CliError::Pool {
            path: path.clone(),
            err,
        }),
        None => Ok(ArgumentPool::new(size)),
    }
}

fn bounds(run: &RunConfig) -> Bounds {
    Bounds::new(run.depth as usize, run.fuel as usize)
}

pub fn typecheck(out: &mut Output, file: &Path) -> Result<u8, CliError> {
    let (e, ty) = load_program(file)?;
    out.record(
        json!({"command": "typecheck", "status": "ok", "term": e.to_string(), "type": ty.to_string()}),
        || format!("{e} : {ty}"),
    );
    Ok(EXIT_OK)
}

pub fn eval(out: &mut Output, run: &RunConfig, file: &Path) -> Result<u8, CliError> {
    let (e, _) = load_program(file)?;
    let outcome = evaluate(&e, run.fuel as usize).map_err(CliError::Eval)?;
    let values: Vec<String> = outcome.values.iter().map(Term::to_string).collect();
    out.record(
        json!({
            "command": "eval",
            "values": values,
            "timed_out": outcome.timed_out,
            "steps_used": outcome.steps_used,
        }),
        || {
            let shown = if values.is_empty() {
                "no value".to_string()
            } else {
                values.join(" | ")
            };
            let note = if outcome.timed_out {
                " (fuel exhausted)"
            } else {
                ""
            };
            format!("{shown}{note} after {} steps", outcome.steps_used)
        },
    );
    Ok(if outcome.timed_out {
        EXIT_INCOMPLETE
    } else {
        EXIT_OK
    })
}

fn class_name(c: TraceClass) -> &'static str {
    match c {
        TraceClass::Computational => "computational",
        TraceClass::Maximal => "maximal",
        TraceClass::Neither => "prefix",
    }
}

pub fn traces(out: &mut Output, run: &RunConfig, file: &Path) -> Result<u8, CliError> {
    let (e, ty) = load_program(file)?;
    let set = traces_at(&e, &ty, bounds(run), &pool(run)?).map_err(CliError::Lts)?;
    for s in &set.traces {
        let class = match classify_trace(s, &set.traces).map_err(CliError::Lts)? {
            // unextended only because the depth bound stopped the search
            TraceClass::Maximal if s.len() == run.depth as usize => "at-bound",
            c => class_name(c),
        };
        out.record(
            json!({"command": "traces", "trace": s.to_string(), "length": s.len(), "class": class}),
            || format!("{s}  [{class}]"),
        );
    }
    out.record(
        json!({"command": "traces", "summary": true, "count": set.traces.len(), "incomplete": set.incomplete}),
        || {
            let note = if set.incomplete { ", incomplete" } else { "" };
            format!("{} traces{note}", set.traces.len())
        },
    );
    Ok(if set.incomplete {
        EXIT_INCOMPLETE
    } else {
        EXIT_OK
    })
}

pub fn equiv(out: &mut Output, run: &RunConfig, left: &Path, right: &Path) -> Result<u8, CliError> {
    let (e1, t1) = load_program(left)?;
    let (e2, _) = load_program(right)?;
    let report = trace_equiv(&e1, &e2, bounds(run), &pool(run)?).map_err(CliError::Lts)?;
    let cex = report
        .counterexample()
        .map(|(on_left, s)| (if on_left { "left" } else { "right" }, s.to_string()));
    out.record(
        json!({
            "command": "equiv",
            "verdict": report.verdict.as_str(),
            "type": t1.to_string(),
            "counterexample": cex.as_ref().map(|(_, s)| s),
            "taken_by": cex.as_ref().map(|(side, _)| side),
            "left_traces": report.left.traces.len(),
            "right_traces": report.right.traces.len(),
        }),
        || match &cex {
            Some((side, s)) => format!(
                "{}: `{s}` is taken only by the {side} program",
                report.verdict.as_str()
            ),
            None => report.verdict.as_str().to_string(),
        },
    );
    Ok(match report.verdict {
        EquivVerdict::EquivalentWithinBounds => EXIT_OK,
        EquivVerdict::Inequivalent => EXIT_NEGATIVE,
        EquivVerdict::Incomplete => EXIT_INCOMPLETE,
    })
}

fn next_context_text(n: &NextContext) -> serde_json::Value {
    match n {
        NextContext::Open(c) => {
            json!({"context": c.to_file_text(), "hole_type": c.holetype.to_string()})
        }
        NextContext::Closed(t) => json!({"closed": t.to_string()}),
    }
}

fn form_json(form: &LcrForm) -> serde_json::Value {
    match form {
        LcrForm::ContextStep(c) => json!({"kind": form.kind(), "context": c.to_file_text()}),
        LcrForm::ProgramStep(e) => json!({"kind": form.kind(), "program": e.to_string()}),
        LcrForm::Interaction {
            action,
            next_context,
            next_program,
            continued,
        } => json!({
            "kind": form.kind(),
            "action": action.to_string(),
            "next": next_context_text(next_context),
            "program": next_program.to_string(),
            "continued": continued.as_deref().map(form_json),
        }),
    }
}

pub fn lcr(
    out: &mut Output,
    context: &Path,
    hole_type_text: &str,
    program: &Path,
) -> Result<u8, CliError> {
    let body = load_term(context)?;
    let holetype = hole_type(hole_type_text)?;
    let c = LinearContext::new(body, Ident::new(FILE_HOLE), holetype).map_err(|err| match err {
        ContextError::IllTyped(err) => CliError::Type {
            path: Some(context.to_path_buf()),
            err,
        },
        other => CliError::Context(other),
    })?;
    let (e, _) = load_program(program)?;
    let steps = classify_lcr(&c, &e).map_err(CliError::Context)?;
    for (successor, form) in &steps {
        out.record(
            json!({"command": "lcr", "successor": successor.to_string(), "form": form_json(form)}),
            || format!("{successor}\n  by {form}"),
        );
    }
    if steps.is_empty() {
        out.record(
            json!({"command": "lcr", "successor": null, "form": null}),
            || "irreducible".to_string(),
        );
    }
    Ok(EXIT_OK)
}

pub fn scontext(out: &mut Output, trace: &Path, hole_type_text: &str) -> Result<u8, CliError> {
    let s = parse_trace(&read(trace)?).map_err(|err| CliError::Trace {
        path: trace.to_path_buf(),
        err,
    })?;
    let holetype = hole_type(hole_type_text)?;
    let c = synthesize_s_context(&s, &holetype).map_err(CliError::Context)?;
    let text = c.to_file_text();
    out.record(
        json!({
            "command": "scontext",
            "trace": s.to_string(),
            "context": text,
            "hole_type": c.holetype.to_string(),
            "result_type": c.result.to_string(),
        }),
        || format!("{text} : {}", c.result),
    );
    Ok(EXIT_OK)
}

pub fn check(out: &mut Output, run: &RunConfig, name: &str) -> Result<u8, CliError> {
    if name == "list" {
        for n in CHECKS {
            out.record(json!({"command": "check", "name": n}), || n.to_string());
        }
        return Ok(EXIT_OK);
    }
    let cfg = CheckConfig {
        seed: run.seed,
        count: run.count as usize,
        depth: run.depth as usize,
        fuel: run.fuel as usize,
        pool: pool(run)?,
        fragments: match run.fragment {
            FragmentArg::Lpcf => vec![Fragment::Lpcf],
            FragmentArg::Nlpcf => vec![Fragment::Nlpcf],
            FragmentArg::Both => vec![Fragment::Lpcf, Fragment::Nlpcf],
        },
        ..CheckConfig::default()
    };
    let names: Vec<&str> = if name == "all" {
        CHECKS.to_vec()
    } else {
        vec![name]
    };
    let mut passed = true;
    for n in names {
        let report = run_check(n, &cfg).map_err(CliError::Check)?;
        passed &= report.passed();
        let mut value = json!({"command": "check", "passed": report.passed()});
        if let serde_json::Value::Object(fields) =
            serde_json::to_value(&report).expect("reports serialize")
        {
            value.as_object_mut().expect("object").extend(fields);
        }
        out.record(value, || {
            let mut text = report.to_string();
            for f in &report.failures {
                text.push_str(&format!(
                    "\n  {}: expected {}, observed {}",
                    f.input, f.expected, f.observed
                ));
            }
            text
        });
    }
    Ok(if passed { EXIT_OK } else { EXIT_NEGATIVE })
}
