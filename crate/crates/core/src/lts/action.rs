use std::fmt;

use num_bigint::BigUint;

use crate::syntax::{parse_term, ProjIndex, Term};

/// Transition labels. Embedded terms are kept in alpha-normal form, so
/// structural equality on actions is alpha-equivalence.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Action {
    ConstNat(BigUint),
    ConstBool(bool),
    /// `@e`: the program is applied to `e`.
    AppArg(Term),
    ProjAct(ProjIndex),
    /// `(x)e`: the tensor components are bound to `z1`, `z2` in `e`.
    TensorAct(Term),
    /// `T`: a computation `val(v)` hands over `v`.
    TAct,
}

impl Action {
    pub fn app(arg: &Term) -> Action {
        Action::AppArg(arg.alpha_normalize())
    }

    pub fn tensor(body: &Term) -> Action {
        Action::TensorAct(body.alpha_normalize())
    }

    pub fn constant(c: &Term) -> Option<Action> {
        match c {
            Term::Nat(n) => Some(Action::ConstNat(n.clone())),
            Term::Bool(b) => Some(Action::ConstBool(*b)),
            _ => None,
        }
    }

    pub fn is_constant(&self) -> bool {
        matches!(self, Action::ConstNat(_) | Action::ConstBool(_))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::ConstNat(n) => write!(f, "{n}"),
            Action::ConstBool(b) => write!(f, "{b}"),
            Action::AppArg(e) => write!(f, "@({e})"),
            Action::ProjAct(i) => write!(f, "proj{}", i.number()),
            Action::TensorAct(e) => write!(f, "tensor({e})"),
            Action::TAct => f.write_str("T"),
        }
    }
}

/// A finite sequence of actions; the empty trace prints as `ε`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Trace(pub Vec<Action>);

impl Trace {
    pub fn empty() -> Self {
        Trace(Vec::new())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn actions(&self) -> &[Action] {
        &self.0
    }

    pub fn push(&self, a: Action) -> Trace {
        let mut v = self.0.clone();
        v.push(a);
        Trace(v)
    }

    pub fn last(&self) -> Option<&Action> {
        self.0.last()
    }

    /// All but the last action.
    pub fn parent(&self) -> Option<Trace> {
        (!self.0.is_empty()).then(|| Trace(self.0[..self.0.len() - 1].to_vec()))
    }

    pub fn is_prefix_of(&self, other: &Trace) -> bool {
        other.0.starts_with(&self.0)
    }

    /// A constant may only end a trace: programs step to `Ω` after one.
    pub fn is_well_formed(&self) -> bool {
        self.0.iter().rev().skip(1).all(|a| !a.is_constant())
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{a}")?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("bad trace `{text}`: {message}")]
pub struct TraceSyntaxError {
    pub text: String,
    pub message: String,
}

/// Split at commas that are not nested inside brackets of any kind.
fn split_top_level(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth: i32 = 0;
    let mut start = 0;
    let bytes = s.as_bytes();
    for (i, &b) in bytes.iter().enumerate() {
        match b {
            b'(' | b'[' => depth += 1,
            b')' | b']' => depth -= 1,
            b'<' => depth += 1,
            // `->` is an arrow, not a closing bracket
            b'>' if i == 0 || bytes[i - 1] != b'-' => depth -= 1,
            b',' if depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

fn parse_action(text: &str) -> Result<Action, TraceSyntaxError> {
    let err = |m: &str| TraceSyntaxError {
        text: text.to_string(),
        message: m.to_string(),
    };
    let a = text.trim();
    let wrapped = |prefix: &str| -> Option<&str> {
        a.strip_prefix(prefix)
            .and_then(|r| r.trim_start().strip_prefix('('))
            .and_then(|r| r.strip_suffix(')'))
    };
    Ok(match a {
        "T" => Action::TAct,
        "true" => Action::ConstBool(true),
        "false" => Action::ConstBool(false),
        "proj1" => Action::ProjAct(ProjIndex::First),
        "proj2" => Action::ProjAct(ProjIndex::Second),
        _ if !a.is_empty() && a.bytes().all(|b| b.is_ascii_digit()) => {
            Action::ConstNat(a.parse().map_err(|_| err("bad literal"))?)
        }
        _ => {
            if let Some(inner) = wrapped("@") {
                let t = parse_term(inner).map_err(|e| err(&e.to_string()))?;
                Action::app(&t)
            } else if let Some(inner) = wrapped("tensor") {
                let t = parse_term(inner).map_err(|e| err(&e.to_string()))?;
                Action::tensor(&t)
            } else {
                return Err(err("unknown action"));
            }
        }
    })
}

/// Parse one trace in the `T, @(0), T, 1` format. `ε` or an empty string is
/// the empty trace.
pub fn parse_trace(text: &str) -> Result<Trace, TraceSyntaxError> {
    let s = text.trim();
    if s.is_empty() || s == "ε" {
        return Ok(Trace::empty());
    }
    split_top_level(s)
        .into_iter()
        .map(parse_action)
        .collect::<Result<_, _>>()
        .map(Trace)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trace_text_roundtrip() {
        for src in [
            "T, @(0), T, 1",
            "ε",
            "proj2, @(fn! v0:Nat. <v0, 1>), true",
            "tensor(z2 (x) z1), T",
        ] {
            let tr = parse_trace(src).unwrap();
            assert_eq!(tr.to_string(), src);
        }
    }

    #[test]
    fn actions_compare_up_to_alpha() {
        let a = parse_trace("@(fn x:Nat. x)").unwrap();
        let b = parse_trace("@(fn y:Nat. y)").unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn arrows_inside_terms_do_not_split() {
        let tr = parse_trace("@(fn! f:Nat -> Nat. f 0), 3").unwrap();
        assert_eq!(tr.len(), 2);
    }

    #[test]
    fn constants_end_traces() {
        assert!(parse_trace("T, 1").unwrap().is_well_formed());
        assert!(!parse_trace("1, T").unwrap().is_well_formed());
        assert!(parse_trace("bogus").is_err());
    }
}
