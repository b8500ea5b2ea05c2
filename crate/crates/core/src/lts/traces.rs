use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;

use crate::reduction::{explore, EvalError, EvalOptions};
use crate::syntax::{Term, Type};
use crate::typing::check_program;

use super::pool::ArgumentPool;
use super::transitions::{apply_action, external_transitions};
use super::{Action, LtsError, Trace};

/// Exploration bounds: trace length and reduction steps per internal run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Bounds {
    pub depth: usize,
    pub fuel: usize,
}

impl Bounds {
    pub fn new(depth: usize, fuel: usize) -> Self {
        Bounds { depth, fuel }
    }
}

/// Bounded trace set. `incomplete` is set when an internal run ran out of
/// fuel, so traces through that run may be missing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceSet {
    pub traces: BTreeSet<Trace>,
    pub incomplete: bool,
}

impl TraceSet {
    pub fn contains(&self, s: &Trace) -> bool {
        self.traces.contains(s)
    }
}

/// Irreducible forms reached by `⇝*`. Reduction cycles are detected, so a
/// looping term such as `omega` has no normal forms and is not a timeout.
pub(crate) fn settle(e: &Term, fuel: usize) -> Result<(Vec<Term>, bool), LtsError> {
    let ex = explore(e, EvalOptions::new(fuel).memo(true));
    Ok((ex.normal_forms, ex.timed_out))
}

fn settle_closed(e: &Term, fuel: usize) -> Result<(Vec<Term>, bool), LtsError> {
    let (nfs, timed_out) = settle(e, fuel)?;
    if let Some(stuck) = nfs
        .iter()
        .find(|t| !crate::reduction::is_canonical(t).unwrap_or(true))
    {
        return Err(EvalError::StuckNonCanonical(stuck.clone()).into());
    }
    Ok((nfs, timed_out))
}

struct Expansion {
    steps: Vec<(Action, Term, Type)>,
    timed_out: bool,
}

fn expand(e: &Term, ty: &Type, pool: &ArgumentPool, fuel: usize) -> Result<Expansion, LtsError> {
    let (nfs, timed_out) = settle_closed(e, fuel)?;
    let mut steps = Vec::new();
    for nf in nfs {
        for tr in external_transitions(&nf, ty, pool)? {
            steps.push((tr.action, tr.target, tr.target_type));
        }
    }
    Ok(Expansion { steps, timed_out })
}

/// All traces of length at most `bounds.depth` of the closed term `e: ty`.
pub fn traces_at(
    e: &Term,
    ty: &Type,
    bounds: Bounds,
    pool: &ArgumentPool,
) -> Result<TraceSet, LtsError> {
    let mut set = BTreeSet::from([Trace::empty()]);
    let mut incomplete = false;
    // residual (alpha-normal) -> (residual, type, traces leading to it)
    let mut frontier: BTreeMap<Term, (Term, Type, BTreeSet<Trace>)> = BTreeMap::new();
    frontier.insert(
        e.alpha_normalize(),
        (e.clone(), ty.clone(), BTreeSet::from([Trace::empty()])),
    );
    for level in 0..bounds.depth {
        let states: Vec<_> = frontier.into_values().collect();
        let expanded: Vec<Result<Expansion, LtsError>> = states
            .par_iter()
            .map(|(term, ty, _)| expand(term, ty, pool, bounds.fuel))
            .collect();
        let mut next: BTreeMap<Term, (Term, Type, BTreeSet<Trace>)> = BTreeMap::new();
        for ((_, _, prefixes), ex) in states.into_iter().zip(expanded) {
            let ex = ex?;
            incomplete |= ex.timed_out;
            for (action, target, target_ty) in ex.steps {
                let entry = next
                    .entry(target.alpha_normalize())
                    .or_insert_with(|| (target, target_ty, BTreeSet::new()));
                for p in &prefixes {
                    let s = p.push(action.clone());
                    set.insert(s.clone());
                    if level + 1 < bounds.depth {
                        entry.2.insert(s);
                    }
                }
            }
        }
        next.retain(|_, v| !v.2.is_empty());
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    Ok(TraceSet {
        traces: set,
        incomplete,
    })
}

/// [`traces_at`] for a closed program, typing it first.
pub fn traces(e: &Term, bounds: Bounds, pool: &ArgumentPool) -> Result<TraceSet, LtsError> {
    let ty = check_program(e)?;
    traces_at(e, &ty, bounds, pool)
}

/// Residuals `e'` with `e ⇝* →α1 ⇝* ... →αn e'`, one per witnessing run, up
/// to alpha-equivalence. Empty if `s` is not taken within the fuel.
pub fn follow_trace(
    e: &Term,
    ty: &Type,
    s: &Trace,
    fuel: usize,
) -> Result<Vec<(Term, Type)>, LtsError> {
    let mut states: BTreeMap<Term, (Term, Type)> = BTreeMap::new();
    states.insert(e.alpha_normalize(), (e.clone(), ty.clone()));
    for action in s.actions() {
        let mut next = BTreeMap::new();
        for (term, ty) in states.into_values() {
            let (nfs, _) = settle_closed(&term, fuel)?;
            for nf in nfs {
                if let Some((target, tty)) = apply_action(&nf, &ty, action) {
                    next.entry(target.alpha_normalize())
                        .or_insert((target, tty));
                }
            }
        }
        states = next;
    }
    Ok(states.into_values().collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LeqVerdict {
    HoldsWithinBounds,
    /// A trace of the left program that the right one does not take.
    Counterexample(Trace),
    /// Fuel ran out in a way that could change the answer. `candidate` is a
    /// trace missing on the right whose absence is not definitive.
    Incomplete {
        candidate: Option<Trace>,
    },
}

/// Shortest (then least) trace of `a` absent from `b`.
fn first_missing(a: &TraceSet, b: &TraceSet) -> Option<Trace> {
    a.traces
        .iter()
        .filter(|s| !b.contains(s))
        .min_by(|x, y| x.len().cmp(&y.len()).then_with(|| x.cmp(y)))
        .cloned()
}

pub fn leq_of_sets(left: &TraceSet, right: &TraceSet) -> LeqVerdict {
    match first_missing(left, right) {
        Some(s) if right.incomplete => LeqVerdict::Incomplete { candidate: Some(s) },
        Some(s) => LeqVerdict::Counterexample(s),
        None if left.incomplete => LeqVerdict::Incomplete { candidate: None },
        None => LeqVerdict::HoldsWithinBounds,
    }
}

fn common_type(e1: &Term, e2: &Term) -> Result<Type, LtsError> {
    let (t1, t2) = (check_program(e1)?, check_program(e2)?);
    if t1 != t2 {
        return Err(LtsError::TypeMismatch {
            left: t1,
            right: t2,
        });
    }
    Ok(t1)
}

/// Bounded trace preorder `Tr(e1) ⊆ Tr(e2)`.
pub fn trace_leq(
    e1: &Term,
    e2: &Term,
    bounds: Bounds,
    pool: &ArgumentPool,
) -> Result<LeqVerdict, LtsError> {
    let ty = common_type(e1, e2)?;
    let (a, b) = rayon::join(
        || traces_at(e1, &ty, bounds, pool),
        || traces_at(e2, &ty, bounds, pool),
    );
    Ok(leq_of_sets(&a?, &b?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivVerdict {
    EquivalentWithinBounds,
    Inequivalent,
    Incomplete,
}

impl EquivVerdict {
    pub fn as_str(self) -> &'static str {
        match self {
            EquivVerdict::EquivalentWithinBounds => "equivalent-within-bounds",
            EquivVerdict::Inequivalent => "inequivalent",
            EquivVerdict::Incomplete => "incomplete",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EquivReport {
    pub verdict: EquivVerdict,
    pub forward: LeqVerdict,
    pub backward: LeqVerdict,
    pub left: TraceSet,
    pub right: TraceSet,
}

impl EquivReport {
    /// A definitive counterexample in either direction: `(true, s)` when `s`
    /// is a trace of the left program only.
    pub fn counterexample(&self) -> Option<(bool, &Trace)> {
        match (&self.forward, &self.backward) {
            (LeqVerdict::Counterexample(s), _) => Some((true, s)),
            (_, LeqVerdict::Counterexample(s)) => Some((false, s)),
            _ => None,
        }
    }
}

pub fn equiv_of_sets(left: TraceSet, right: TraceSet) -> EquivReport {
    let forward = leq_of_sets(&left, &right);
    let backward = leq_of_sets(&right, &left);
    let verdict = match (&forward, &backward) {
        (LeqVerdict::Counterexample(_), _) | (_, LeqVerdict::Counterexample(_)) => {
            EquivVerdict::Inequivalent
        }
        (LeqVerdict::HoldsWithinBounds, LeqVerdict::HoldsWithinBounds) => {
            EquivVerdict::EquivalentWithinBounds
        }
        _ => EquivVerdict::Incomplete,
    };
    EquivReport {
        verdict,
        forward,
        backward,
        left,
        right,
    }
}

/// Bounded trace equivalence: both preorder directions.
pub fn trace_equiv(
    e1: &Term,
    e2: &Term,
    bounds: Bounds,
    pool: &ArgumentPool,
) -> Result<EquivReport, LtsError> {
    let ty = common_type(e1, e2)?;
    let (a, b) = rayon::join(
        || traces_at(e1, &ty, bounds, pool),
        || traces_at(e2, &ty, bounds, pool),
    );
    Ok(equiv_of_sets(a?, b?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TraceClass {
    /// Maximal and ending in a constant.
    Computational,
    Maximal,
    Neither,
}

pub fn classify_trace(s: &Trace, set: &BTreeSet<Trace>) -> Result<TraceClass, LtsError> {
    if !set.contains(s) {
        return Err(LtsError::TraceNotInSet(s.clone()));
    }
    let extendable = set.iter().any(|t| t.len() > s.len() && s.is_prefix_of(t));
    Ok(match (extendable, s.last()) {
        (true, _) => TraceClass::Neither,
        (false, Some(a)) if a.is_constant() => TraceClass::Computational,
        (false, _) => TraceClass::Maximal,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::parse_trace;
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn tr(s: &str) -> Trace {
        parse_trace(s).unwrap()
    }

    fn nat_zero_pool() -> ArgumentPool {
        ArgumentPool::parse("type Nat : 0", 2).unwrap()
    }

    const F1: &str = "val(fn! x:Nat. val(0) |~| val(1))";
    const F2: &str = "val(fn! x:Nat. val(0)) |~| val(fn! x:Nat. val(1))";

    #[test]
    fn omega_has_only_the_empty_trace() {
        let set = traces(
            &t("omega[Nat]"),
            Bounds::new(4, 100),
            &ArgumentPool::default(),
        )
        .unwrap();
        assert_eq!(set.traces, BTreeSet::from([Trace::empty()]));
        assert!(!set.incomplete);
    }

    #[test]
    fn example_trace_set_of_f1() {
        let set = traces(&t(F1), Bounds::new(4, 100), &nat_zero_pool()).unwrap();
        let expected: BTreeSet<Trace> = [
            "ε",
            "T",
            "T, @(0)",
            "T, @(0), T",
            "T, @(0), T, 0",
            "T, @(0), T, 1",
        ]
        .map(tr)
        .into();
        assert_eq!(set.traces, expected);
    }

    #[test]
    fn constant_then_nothing() {
        let set = traces(&t("3"), Bounds::new(3, 100), &ArgumentPool::default()).unwrap();
        assert_eq!(set.traces, BTreeSet::from([tr("ε"), tr("3")]));
    }

    #[test]
    fn leq_examples() {
        let pool = ArgumentPool::default();
        let b = Bounds::new(4, 100);
        assert_eq!(
            trace_leq(&t("omega[T Nat]"), &t("val(0)"), b, &pool).unwrap(),
            LeqVerdict::HoldsWithinBounds
        );
        let r = trace_equiv(&t(F1), &t(F2), Bounds::new(5, 100), &pool).unwrap();
        assert_eq!(r.verdict, EquivVerdict::EquivalentWithinBounds);
        assert_eq!(
            trace_leq(&t("val(0)"), &t("val(1)"), b, &pool).unwrap(),
            LeqVerdict::Counterexample(tr("T, 0"))
        );
        let r = trace_equiv(&t("val(0)"), &t("val(1)"), b, &pool).unwrap();
        assert_eq!(r.verdict, EquivVerdict::Inequivalent);
        assert!(matches!(
            trace_leq(&t("val(0)"), &t("0"), b, &pool),
            Err(LtsError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn fuel_exhaustion_is_reported() {
        let slow = t("fix[Nat -> Nat] (fn! f:Nat -> Nat. fn! n:Nat. f (succ n)) 0");
        let set = traces(&slow, Bounds::new(2, 20), &ArgumentPool::default()).unwrap();
        assert!(set.incomplete);
        let r = trace_leq(&t("0"), &slow, Bounds::new(2, 20), &ArgumentPool::default()).unwrap();
        assert_eq!(
            r,
            LeqVerdict::Incomplete {
                candidate: Some(tr("0"))
            }
        );
    }

    #[test]
    fn classification() {
        let set = traces(&t(F1), Bounds::new(5, 100), &nat_zero_pool())
            .unwrap()
            .traces;
        assert_eq!(
            classify_trace(&tr("T, @(0), T, 1"), &set).unwrap(),
            TraceClass::Computational
        );
        assert_eq!(classify_trace(&tr("T"), &set).unwrap(), TraceClass::Neither);
        let eps = BTreeSet::from([Trace::empty()]);
        assert_eq!(
            classify_trace(&Trace::empty(), &eps).unwrap(),
            TraceClass::Maximal
        );
        assert!(classify_trace(&tr("T"), &eps).is_err());
    }

    #[test]
    fn follow_trace_reaches_both_branches() {
        let e = t(F1);
        let ty = check_program(&e).unwrap();
        let res = follow_trace(&e, &ty, &tr("T, @(0)"), 100).unwrap();
        assert_eq!(res.len(), 1);
        let res = follow_trace(&e, &ty, &tr("T, @(0), T"), 100).unwrap();
        assert_eq!(res.len(), 2);
    }
}
