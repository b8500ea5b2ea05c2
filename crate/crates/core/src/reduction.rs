//! Call-by-name small-step reduction, canonical forms and bounded
//! exhaustive evaluation.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use num_traits::Zero;

use crate::syntax::{free_vars, is_closed, substitute, substitute1, Ident, ProjIndex, Term};

/// Reduction axioms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    Beta,
    FixUnfold,
    Succ,
    Pred,
    IsZero,
    Eq,
    IfTrue,
    IfFalse,
    Proj(ProjIndex),
    TensorLet,
    BindVal,
    ChoiceLeft,
    ChoiceRight,
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::Beta => f.write_str("beta"),
            Rule::FixUnfold => f.write_str("fix"),
            Rule::Succ => f.write_str("succ"),
            Rule::Pred => f.write_str("pred"),
            Rule::IsZero => f.write_str("iszero"),
            Rule::Eq => f.write_str("eq"),
            Rule::IfTrue => f.write_str("if-true"),
            Rule::IfFalse => f.write_str("if-false"),
            Rule::Proj(i) => write!(f, "proj{}", i.number()),
            Rule::TensorLet => f.write_str("letpair"),
            Rule::BindVal => f.write_str("bind-val"),
            Rule::ChoiceLeft => f.write_str("choice-left"),
            Rule::ChoiceRight => f.write_str("choice-right"),
        }
    }
}

/// One layer of an evaluation context.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Frame {
    /// `succ E`, `pred E`, `iszero E`
    PrimArg,
    /// `eq E` and `eq E e`
    EqLeft,
    /// `eq v E`
    EqRight,
    /// `E e`
    AppFun,
    IfCond,
    ProjArg,
    LetPairScrutinee,
    BindComputation,
    ValInner,
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frame::PrimArg => "prim",
            Frame::EqLeft => "eq-left",
            Frame::EqRight => "eq-right",
            Frame::AppFun => "app",
            Frame::IfCond => "if",
            Frame::ProjArg => "proj",
            Frame::LetPairScrutinee => "letpair",
            Frame::BindComputation => "bind",
            Frame::ValInner => "val",
        })
    }
}

/// A one-step successor together with the axiom and the context path
/// (outermost frame first) that produced it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Successor {
    pub term: Term,
    pub rule: Rule,
    pub path: Vec<Frame>,
}

impl Successor {
    /// `frame/frame/rule`, e.g. `bind/val/pred`.
    pub fn tag(&self) -> String {
        let mut s = String::new();
        for fr in &self.path {
            s.push_str(&fr.to_string());
            s.push('/');
        }
        s.push_str(&self.rule.to_string());
        s
    }
}

/// Literals and variables: the operands that block an `eq` in its left
/// position and let the right operand be evaluated.
fn is_eq_operand_value(e: &Term) -> bool {
    matches!(e, Term::Nat(_) | Term::Var(_))
}

fn lift(succs: Vec<Successor>, frame: Frame, rebuild: impl Fn(Term) -> Term) -> Vec<Successor> {
    succs
        .into_iter()
        .map(|mut s| {
            s.term = rebuild(s.term);
            s.path.insert(0, frame);
            s
        })
        .collect()
}

fn axiom(term: Term, rule: Rule) -> Vec<Successor> {
    vec![Successor {
        term,
        rule,
        path: Vec::new(),
    }]
}

/// All one-step successors of `e`. Open terms are allowed; free variables
/// block like values. Choice successors come left then right.
pub fn step(e: &Term) -> Vec<Successor> {
    match e {
        Term::App(f, a) => step_app(f, a),
        Term::If(c, t, f) => match &**c {
            Term::Bool(true) => axiom((**t).clone(), Rule::IfTrue),
            Term::Bool(false) => axiom((**f).clone(), Rule::IfFalse),
            _ => lift(step(c), Frame::IfCond, |c| {
                Term::If(Box::new(c), t.clone(), f.clone())
            }),
        },
        Term::Proj(i, p) => match &**p {
            Term::Pair(a, b) => {
                let pick = if *i == ProjIndex::First { a } else { b };
                axiom((**pick).clone(), Rule::Proj(*i))
            }
            _ => lift(step(p), Frame::ProjArg, |p| Term::proj(*i, p)),
        },
        Term::LetPair {
            left,
            right,
            scrutinee,
            body,
        } => match &**scrutinee {
            Term::Tensor(a, b) => axiom(
                substitute(
                    body,
                    &[
                        (left.clone(), (**a).clone()),
                        (right.clone(), (**b).clone()),
                    ],
                ),
                Rule::TensorLet,
            ),
            _ => lift(step(scrutinee), Frame::LetPairScrutinee, |s| {
                Term::LetPair {
                    left: left.clone(),
                    right: right.clone(),
                    scrutinee: Box::new(s),
                    body: body.clone(),
                }
            }),
        },
        Term::Val(inner) => lift(step(inner), Frame::ValInner, Term::val),
        Term::Bind {
            binder,
            linearity,
            computation,
            body,
        } => {
            if let Term::Val(v) = &**computation {
                if step(v).is_empty() {
                    let lam = Term::Lam {
                        binder: binder.clone(),
                        binder_type: None,
                        linearity: *linearity,
                        body: body.clone(),
                    };
                    return axiom(Term::app(lam, (**v).clone()), Rule::BindVal);
                }
            }
            lift(step(computation), Frame::BindComputation, |c| Term::Bind {
                binder: binder.clone(),
                linearity: *linearity,
                computation: Box::new(c),
                body: body.clone(),
            })
        }
        Term::Choice(a, b) => vec![
            Successor {
                term: (**a).clone(),
                rule: Rule::ChoiceLeft,
                path: Vec::new(),
            },
            Successor {
                term: (**b).clone(),
                rule: Rule::ChoiceRight,
                path: Vec::new(),
            },
        ],
        Term::Var(_)
        | Term::Nat(_)
        | Term::Bool(_)
        | Term::Succ
        | Term::Pred
        | Term::IsZero
        | Term::Eq
        | Term::Fix(_)
        | Term::Lam { .. }
        | Term::Pair(..)
        | Term::Tensor(..) => Vec::new(),
    }
}

fn step_app(f: &Term, a: &Term) -> Vec<Successor> {
    match f {
        Term::Lam { binder, body, .. } => axiom(substitute1(body, binder, a), Rule::Beta),
        Term::Fix(_) => axiom(
            Term::app(a.clone(), Term::app(f.clone(), a.clone())),
            Rule::FixUnfold,
        ),
        Term::Succ | Term::Pred | Term::IsZero => match a {
            Term::Nat(n) => {
                let (t, rule) = match f {
                    Term::Succ => (Term::Nat(n + 1u32), Rule::Succ),
                    Term::Pred if n.is_zero() => (Term::Nat(n.clone()), Rule::Pred),
                    Term::Pred => (Term::Nat(n - 1u32), Rule::Pred),
                    _ => (Term::Bool(n.is_zero()), Rule::IsZero),
                };
                axiom(t, rule)
            }
            _ => lift(step(a), Frame::PrimArg, |a| Term::app(f.clone(), a)),
        },
        Term::Eq => lift(step(a), Frame::EqLeft, |a| Term::app(Term::Eq, a)),
        Term::App(g, left) if **g == Term::Eq => {
            if !is_eq_operand_value(left) {
                return lift(step(left), Frame::EqLeft, |l| {
                    Term::apps(Term::Eq, [l, a.clone()])
                });
            }
            match (left.as_nat(), a.as_nat()) {
                (Some(m), Some(n)) => axiom(Term::Bool(m == n), Rule::Eq),
                _ => lift(step(a), Frame::EqRight, |r| {
                    Term::apps(Term::Eq, [(**left).clone(), r])
                }),
            }
        }
        _ => lift(step(f), Frame::AppFun, |f| Term::app(f, a.clone())),
    }
}

pub fn is_reducible(e: &Term) -> bool {
    !step(e).is_empty()
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("term has free variables: {0:?}")]
    OpenTerm(Vec<Ident>),
    #[error("reached an irreducible term that is not canonical: {0}")]
    StuckNonCanonical(Term),
}

/// Whether a closed term is a canonical form.
pub fn is_canonical(e: &Term) -> Result<bool, EvalError> {
    if !is_closed(e) {
        return Err(EvalError::OpenTerm(free_vars(e).into_iter().collect()));
    }
    Ok(canonical_shape(e))
}

fn canonical_shape(e: &Term) -> bool {
    match e {
        Term::Nat(_)
        | Term::Bool(_)
        | Term::Succ
        | Term::Pred
        | Term::IsZero
        | Term::Eq
        | Term::Fix(_)
        | Term::Lam { .. }
        | Term::Pair(..)
        | Term::Tensor(..) => true,
        Term::App(f, a) => **f == Term::Eq && a.as_nat().is_some(),
        Term::Val(v) => !is_reducible(v),
        _ => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EvalOptions {
    /// Maximum number of reduction steps along any path.
    pub fuel: usize,
    /// Skip states already seen at an earlier depth. Makes finite
    /// reduction cycles (such as `omega`) terminate without timing out.
    pub memo: bool,
    /// Stop as soon as one normal form is found.
    pub first_only: bool,
}

impl EvalOptions {
    pub fn new(fuel: usize) -> Self {
        EvalOptions {
            fuel,
            memo: false,
            first_only: false,
        }
    }

    pub fn memo(mut self, on: bool) -> Self {
        self.memo = on;
        self
    }

    pub fn first_only(mut self, on: bool) -> Self {
        self.first_only = on;
        self
    }
}

/// Irreducible states reached from a term, open or closed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Exploration {
    /// Distinct up to alpha-equivalence, ordered by alpha-normal form.
    pub normal_forms: Vec<Term>,
    /// Some path was still reducible when the fuel ran out.
    pub timed_out: bool,
    /// Length of the longest explored path.
    pub steps_used: usize,
}

/// Explore the reduction graph of `e` breadth-first. States at the same
/// depth are merged up to alpha-equivalence, which leaves the set of
/// reachable normal forms per path length unchanged.
pub fn explore(e: &Term, opts: EvalOptions) -> Exploration {
    let mut frontier: BTreeMap<Term, Term> = BTreeMap::new();
    frontier.insert(e.alpha_normalize(), e.clone());
    let mut seen: HashSet<Term> = HashSet::new();
    if opts.memo {
        seen.insert(e.alpha_normalize());
    }
    let mut found: BTreeMap<Term, Term> = BTreeMap::new();
    let mut steps_used = 0;
    let mut depth = 0;
    loop {
        let mut next: BTreeMap<Term, Term> = BTreeMap::new();
        for (key, t) in frontier {
            let succs = step(&t);
            if succs.is_empty() {
                found.entry(key).or_insert(t);
                if opts.first_only {
                    return Exploration {
                        normal_forms: found.into_values().collect(),
                        timed_out: false,
                        steps_used,
                    };
                }
                continue;
            }
            if depth == opts.fuel {
                return Exploration {
                    normal_forms: found.into_values().collect(),
                    timed_out: true,
                    steps_used,
                };
            }
            for s in succs {
                let k = s.term.alpha_normalize();
                if opts.memo && !seen.insert(k.clone()) {
                    continue;
                }
                next.entry(k).or_insert(s.term);
            }
        }
        if next.is_empty() {
            return Exploration {
                normal_forms: found.into_values().collect(),
                timed_out: false,
                steps_used,
            };
        }
        depth += 1;
        steps_used = depth;
        frontier = next;
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalOutcome {
    /// Canonical results, distinct up to alpha-equivalence.
    pub values: Vec<Term>,
    pub timed_out: bool,
    pub steps_used: usize,
}

/// All values reachable from a closed term within `opts.fuel` steps per path.
pub fn evaluate_with(e: &Term, opts: EvalOptions) -> Result<EvalOutcome, EvalError> {
    if !is_closed(e) {
        return Err(EvalError::OpenTerm(free_vars(e).into_iter().collect()));
    }
    let ex = explore(e, opts);
    if let Some(stuck) = ex.normal_forms.iter().find(|t| !canonical_shape(t)) {
        return Err(EvalError::StuckNonCanonical(stuck.clone()));
    }
    Ok(EvalOutcome {
        values: ex.normal_forms,
        timed_out: ex.timed_out,
        steps_used: ex.steps_used,
    })
}

/// [`evaluate_with`] without memoisation.
pub fn evaluate(e: &Term, fuel: usize) -> Result<EvalOutcome, EvalError> {
    evaluate_with(e, EvalOptions::new(fuel))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Convergence {
    Converges,
    /// No value within the fuel bound; not a proof of divergence.
    NoValueWithinFuel,
}

pub fn may_converge(e: &Term, fuel: usize) -> Result<Convergence, EvalError> {
    may_converge_with(e, EvalOptions::new(fuel))
}

pub fn may_converge_with(e: &Term, opts: EvalOptions) -> Result<Convergence, EvalError> {
    let out = evaluate_with(e, opts.first_only(true))?;
    Ok(if out.values.is_empty() {
        Convergence::NoValueWithinFuel
    } else {
        Convergence::Converges
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn succs(s: &str) -> Vec<Term> {
        step(&t(s)).into_iter().map(|s| s.term).collect()
    }

    #[test]
    fn step_examples() {
        assert_eq!(succs("pred 0"), vec![t("0")]);
        assert_eq!(succs("iszero 3"), vec![t("false")]);
        assert_eq!(succs("val(0) |~| val(1)"), vec![t("val(0)"), t("val(1)")]);
        assert!(succs("fn x:Nat. pred x").is_empty());
    }

    #[test]
    fn forbidden_contexts_do_not_reduce() {
        assert!(succs("<pred 1, 0>").is_empty());
        assert!(succs("pred 1 (x) 0").is_empty());
        assert!(succs("if true then pred 1 else 0") == vec![t("pred 1")]);
        assert!(succs("fn! x:Nat. pred 1").is_empty());
        assert!(succs("val(0) |~| val(pred 1)").len() == 2);
    }

    #[test]
    fn eq_contexts() {
        assert_eq!(succs("eq (pred 1) 2"), vec![t("eq 0 2")]);
        assert_eq!(succs("eq 0 (succ 0)"), vec![t("eq 0 1")]);
        assert_eq!(succs("eq 4 4"), vec![t("true")]);
        assert_eq!(succs("eq x (succ 0)"), vec![t("eq x 1")]);
        assert!(succs("eq x y").is_empty());
    }

    #[test]
    fn bind_fires_on_irreducible_value_only() {
        assert_eq!(
            succs("bind y = val(pred 1) in val(y)"),
            vec![t("bind y = val(0) in val(y)")]
        );
        assert_eq!(
            succs("bind y = val(0) in val(y)"),
            vec![t("(fn y. val(y)) 0")]
        );
        let r = &step(&t("bind y = val(pred 1) in val(y)"))[0];
        assert_eq!(r.tag(), "bind/val/pred");
    }

    #[test]
    fn fix_unfolds() {
        let s = succs("fix[Nat] succ");
        assert_eq!(s, vec![t("succ (fix[Nat] succ)")]);
    }

    #[test]
    fn canonical_examples() {
        assert!(is_canonical(&t("<omega[Nat], 0>")).unwrap());
        assert!(!is_canonical(&t("proj1 <0,1>")).unwrap());
        assert!(!is_canonical(&t("val(pred 1)")).unwrap());
        assert!(is_canonical(&t("eq 3")).unwrap());
        assert!(matches!(is_canonical(&t("x")), Err(EvalError::OpenTerm(_))));
    }

    #[test]
    fn evaluate_examples() {
        let out = evaluate(&t("pred (succ 3)"), 10).unwrap();
        assert_eq!(out.values, vec![t("3")]);
        assert!(!out.timed_out);
        assert_eq!(out.steps_used, 2);

        let out = evaluate(&t("omega[Nat]"), 100).unwrap();
        assert!(out.values.is_empty());
        assert!(out.timed_out);

        let out = evaluate_with(&t("omega[Nat]"), EvalOptions::new(100).memo(true)).unwrap();
        assert!(out.values.is_empty());
        assert!(!out.timed_out);
    }

    #[test]
    fn separation_by_nonlinear_context() {
        let ctx = "bind! f = F in bind! x = f 0 in bind! y = f 0 in val(eq x y)";
        let f1 = ctx.replace('F', "val(fn! x:Nat. val(0) |~| val(1))");
        let f2 = ctx.replace('F', "val(0) |~| val(1)");
        let f2 = f2.replace(
            "val(0) |~| val(1) in",
            "val(fn! x:Nat. val(0)) |~| val(fn! x:Nat. val(1)) in",
        );
        let out = evaluate(&t(&f1), 200).unwrap();
        assert_eq!(out.values, vec![t("val(false)"), t("val(true)")]);
        let out = evaluate(&t(&f2), 200).unwrap();
        assert_eq!(out.values, vec![t("val(true)")]);
    }

    #[test]
    fn may_converge_examples() {
        assert_eq!(
            may_converge(&t("val(0)"), 10).unwrap(),
            Convergence::Converges
        );
        assert_eq!(
            may_converge(&t("omega[T Nat]"), 50).unwrap(),
            Convergence::NoValueWithinFuel
        );
        assert_eq!(
            may_converge(&t("omega[T Nat] |~| val(1)"), 10).unwrap(),
            Convergence::Converges
        );
    }

    #[test]
    fn beta_substitutes_by_name() {
        let s = succs("(fn x:Nat. succ x) (pred 4)");
        assert!(alpha_eq(&s[0], &t("succ (pred 4)")));
    }
}
