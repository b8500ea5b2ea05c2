use std::fmt;

use num_bigint::BigUint;

use crate::lts::{tensor_body_type, Action, TENSOR_LEFT, TENSOR_RIGHT};
use crate::syntax::{substitute, substitute1, Ident, Linearity, ProjIndex, Term, Type};

use super::{fresh_hole, fresh_var, ContextError, LinearContext};

/// Redexes whose hole receives a constant from the program.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstantRedex {
    Succ,
    Pred,
    IsZero,
    /// `eq x` or `eq x e`.
    EqLeft(Option<Term>),
    /// `eq n x`.
    EqRight(BigUint),
    If(Term, Term),
}

/// The innermost redex around a hole in evaluation position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum HoleRedex {
    Constant(ConstantRedex),
    /// `x e`
    App(Term),
    Proj(ProjIndex),
    /// `letpair a b = x in e`
    LetPair {
        left: Ident,
        right: Ident,
        body: Term,
    },
    /// `bind z = x in e`
    Bind {
        binder: Ident,
        linearity: Linearity,
        body: Term,
    },
    /// `val(x)`: no interaction.
    Val,
}

/// `body = outer[redex/slot]` with the hole inside `redex`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub outer: Term,
    pub slot: Ident,
    pub redex: HoleRedex,
}

fn is_hole(t: &Term, hole: &Ident) -> bool {
    matches!(t, Term::Var(x) if x == hole)
}

fn dec(t: &Term, hole: &Ident, slot: &Term) -> Option<(Term, HoleRedex)> {
    let here = |r: HoleRedex| Some((slot.clone(), r));
    let inside = |sub: &Term, rebuild: &dyn Fn(Term) -> Term| {
        dec(sub, hole, slot).map(|(o, r)| (rebuild(o), r))
    };
    match t {
        Term::App(f, a) => match &**f {
            Term::Succ | Term::Pred | Term::IsZero if is_hole(a, hole) => {
                here(HoleRedex::Constant(match &**f {
                    Term::Succ => ConstantRedex::Succ,
                    Term::Pred => ConstantRedex::Pred,
                    _ => ConstantRedex::IsZero,
                }))
            }
            Term::Succ | Term::Pred | Term::IsZero => inside(a, &|o| Term::app((**f).clone(), o)),
            Term::Eq if is_hole(a, hole) => here(HoleRedex::Constant(ConstantRedex::EqLeft(None))),
            Term::Eq => inside(a, &|o| Term::app(Term::Eq, o)),
            Term::App(g, l) if **g == Term::Eq => {
                if is_hole(l, hole) {
                    here(HoleRedex::Constant(ConstantRedex::EqLeft(Some(
                        (**a).clone(),
                    ))))
                } else if let Some(n) = l.as_nat() {
                    if is_hole(a, hole) {
                        here(HoleRedex::Constant(ConstantRedex::EqRight(n.clone())))
                    } else {
                        inside(a, &|o| Term::apps(Term::Eq, [(**l).clone(), o]))
                    }
                } else {
                    inside(l, &|o| Term::apps(Term::Eq, [o, (**a).clone()]))
                }
            }
            Term::Lam { .. } | Term::Fix(_) => None,
            _ if is_hole(f, hole) => here(HoleRedex::App((**a).clone())),
            _ => inside(f, &|o| Term::app(o, (**a).clone())),
        },
        Term::If(c, a, b) => {
            if is_hole(c, hole) {
                here(HoleRedex::Constant(ConstantRedex::If(
                    (**a).clone(),
                    (**b).clone(),
                )))
            } else {
                inside(c, &|o| Term::If(Box::new(o), a.clone(), b.clone()))
            }
        }
        Term::Proj(i, p) => {
            if is_hole(p, hole) {
                here(HoleRedex::Proj(*i))
            } else {
                inside(p, &|o| Term::proj(*i, o))
            }
        }
        Term::LetPair {
            left,
            right,
            scrutinee,
            body,
        } => {
            if is_hole(scrutinee, hole) {
                here(HoleRedex::LetPair {
                    left: left.clone(),
                    right: right.clone(),
                    body: (**body).clone(),
                })
            } else {
                inside(scrutinee, &|o| Term::LetPair {
                    left: left.clone(),
                    right: right.clone(),
                    scrutinee: Box::new(o),
                    body: body.clone(),
                })
            }
        }
        Term::Bind {
            binder,
            linearity,
            computation,
            body,
        } => {
            if is_hole(computation, hole) {
                here(HoleRedex::Bind {
                    binder: binder.clone(),
                    linearity: *linearity,
                    body: (**body).clone(),
                })
            } else {
                inside(computation, &|o| Term::Bind {
                    binder: binder.clone(),
                    linearity: *linearity,
                    computation: Box::new(o),
                    body: body.clone(),
                })
            }
        }
        Term::Val(v) => {
            if is_hole(v, hole) {
                here(HoleRedex::Val)
            } else {
                inside(v, &|o| Term::val(o))
            }
        }
        _ => None,
    }
}

/// Split a context at the innermost redex containing its hole. `None` when
/// the hole is not in evaluation position or the context is the bare hole.
pub fn decompose(body: &Term, hole: &Ident) -> Option<Decomposition> {
    let slot = fresh_var("y", body);
    let (outer, redex) = dec(body, hole, &Term::Var(slot.clone()))?;
    Some(Decomposition { outer, slot, redex })
}

/// A transition of a context whose hole is in redex position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ContextTransition {
    /// Accepts any constant of type `input`; [`ContextTransition::fire`]
    /// gives the closed successor.
    OnConstant {
        outer: Term,
        slot: Ident,
        redex: ConstantRedex,
        input: Type,
    },
    /// Takes `action` and continues as `next`, with a fresh hole.
    Open { action: Action, next: LinearContext },
}

fn literal_result(redex: &ConstantRedex, c: &Term) -> Option<Term> {
    Some(match (redex, c) {
        (ConstantRedex::Succ, Term::Nat(n)) => Term::Nat(n + 1u32),
        (ConstantRedex::Pred, Term::Nat(n)) => Term::Nat(if *n == BigUint::from(0u32) {
            n.clone()
        } else {
            n - 1u32
        }),
        (ConstantRedex::IsZero, Term::Nat(n)) => Term::Bool(*n == BigUint::from(0u32)),
        (ConstantRedex::EqLeft(None), Term::Nat(_)) => Term::app(Term::Eq, c.clone()),
        (ConstantRedex::EqLeft(Some(r)), Term::Nat(n)) => match r.as_nat() {
            Some(m) => Term::Bool(n == m),
            None => Term::apps(Term::Eq, [c.clone(), r.clone()]),
        },
        (ConstantRedex::EqRight(m), Term::Nat(n)) => Term::Bool(n == m),
        (ConstantRedex::If(a, _), Term::Bool(true)) => a.clone(),
        (ConstantRedex::If(_, b), Term::Bool(false)) => b.clone(),
        _ => return None,
    })
}

impl ContextTransition {
    pub fn action(&self) -> Option<&Action> {
        match self {
            ContextTransition::OnConstant { .. } => None,
            ContextTransition::Open { action, .. } => Some(action),
        }
    }

    /// Closed successor after receiving constant `c`, if `c` fits.
    pub fn fire(&self, c: &Term) -> Option<Term> {
        match self {
            ContextTransition::OnConstant {
                outer, slot, redex, ..
            } => literal_result(redex, c).map(|r| substitute1(outer, slot, &r)),
            ContextTransition::Open { .. } => None,
        }
    }

    /// Concrete instances: both booleans, or the given literals.
    pub fn instances(&self, nats: &[u64]) -> Vec<(Action, Term)> {
        let ContextTransition::OnConstant { input, .. } = self else {
            return Vec::new();
        };
        let inputs: Vec<Term> = match input {
            Type::Bool => vec![Term::Bool(true), Term::Bool(false)],
            _ => nats.iter().map(|&n| Term::nat(n)).collect(),
        };
        inputs
            .iter()
            .filter_map(|c| Some((Action::constant(c)?, self.fire(c)?)))
            .collect()
    }
}

impl fmt::Display for ConstantRedex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstantRedex::Succ => f.write_str("n => n+1"),
            ConstantRedex::Pred => f.write_str("n => n-1 (0 => 0)"),
            ConstantRedex::IsZero => f.write_str("n => (n = 0)"),
            ConstantRedex::EqLeft(None) => f.write_str("n => eq n"),
            ConstantRedex::EqLeft(Some(r)) => write!(f, "n => eq n ({r})"),
            ConstantRedex::EqRight(m) => write!(f, "n => (n = {m})"),
            ConstantRedex::If(a, b) => write!(f, "true => {a}; false => {b}"),
        }
    }
}

impl fmt::Display for ContextTransition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ContextTransition::OnConstant {
                outer, slot, redex, ..
            } => {
                write!(f, "[{redex}] at {slot} in {outer}")
            }
            ContextTransition::Open { action, next } => write!(f, "{action} => {next}"),
        }
    }
}

/// Transitions of a context whose hole is in redex position. The bare hole
/// has none: there the program acts alone.
pub fn context_transitions(c: &LinearContext) -> Result<Vec<ContextTransition>, ContextError> {
    if c.is_hole() {
        return Ok(Vec::new());
    }
    let Decomposition { outer, slot, redex } =
        decompose(&c.body, &c.hole).ok_or(ContextError::NotEvaluationContext)?;
    let open =
        |action: Action, filler: Term, new_hole: Ident, ty: Type| -> Result<_, ContextError> {
            let body = substitute1(&outer, &slot, &filler);
            let next = LinearContext::new(body, new_hole, ty)?;
            Ok(vec![ContextTransition::Open { action, next }])
        };
    let x2 = fresh_hole(&c.body);
    let mismatch = || {
        ContextError::MalformedTrace(format!("hole type {} does not fit the context", c.holetype))
    };
    match redex {
        HoleRedex::Constant(redex) => {
            let input = match redex {
                ConstantRedex::If(..) => Type::Bool,
                _ => Type::Nat,
            };
            Ok(vec![ContextTransition::OnConstant {
                outer,
                slot,
                redex,
                input,
            }])
        }
        HoleRedex::App(arg) => {
            let (_, cod) = c.holetype.as_function().ok_or_else(mismatch)?;
            open(Action::app(&arg), Term::Var(x2.clone()), x2, cod.clone())
        }
        HoleRedex::Proj(i) => {
            let Type::With(a, b) = &c.holetype else {
                return Err(mismatch());
            };
            let ty = if i == ProjIndex::First { a } else { b };
            open(
                Action::ProjAct(i),
                Term::Var(x2.clone()),
                x2,
                (**ty).clone(),
            )
        }
        HoleRedex::LetPair { left, right, body } => {
            let Type::Tensor(a, b) = &c.holetype else {
                return Err(mismatch());
            };
            let label = substitute(
                &body,
                &[
                    (left, Term::var(TENSOR_LEFT)),
                    (right, Term::var(TENSOR_RIGHT)),
                ],
            );
            let ty = tensor_body_type(&label, a, b).map_err(ContextError::MalformedTrace)?;
            open(Action::tensor(&label), Term::Var(x2.clone()), x2, ty)
        }
        HoleRedex::Bind {
            binder,
            linearity,
            body,
        } => {
            let Type::Monad(inner) = &c.holetype else {
                return Err(mismatch());
            };
            let lam = Term::Lam {
                binder,
                binder_type: None,
                linearity,
                body: Box::new(body),
            };
            open(
                Action::TAct,
                Term::app(lam, Term::Var(x2.clone())),
                x2,
                (**inner).clone(),
            )
        }
        HoleRedex::Val => Ok(Vec::new()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq, parse_term, parse_type};

    fn ctx(body: &str, ty: &str) -> LinearContext {
        LinearContext::new(
            parse_term(body).unwrap(),
            Ident::new("x"),
            parse_type(ty).unwrap(),
        )
        .unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn conditional_accepts_booleans() {
        let tr = context_transitions(&ctx("if x then val(0) else omega[T Nat]", "Bool")).unwrap();
        assert_eq!(tr.len(), 1);
        let inst = tr[0].instances(&[]);
        assert_eq!(inst[0], (Action::ConstBool(true), t("val(0)")));
        assert_eq!(inst[1].0, Action::ConstBool(false));
        assert!(alpha_eq(&inst[1].1, &t("omega[T Nat]")));
    }

    #[test]
    fn pred_pattern() {
        let tr = context_transitions(&ctx("pred x", "Nat")).unwrap();
        assert_eq!(tr[0].fire(&t("3")), Some(t("2")));
        assert_eq!(tr[0].fire(&t("0")), Some(t("0")));
        assert_eq!(tr[0].fire(&t("true")), None);
        let tr = context_transitions(&ctx("succ x", "Nat")).unwrap();
        assert_eq!(tr[0].fire(&t("4")), Some(t("5")));
    }

    #[test]
    fn bind_hands_over_to_an_abstraction() {
        let tr = context_transitions(&ctx("bind z = x in val(z)", "T Nat")).unwrap();
        let ContextTransition::Open { action, next } = &tr[0] else {
            panic!()
        };
        assert_eq!(*action, Action::TAct);
        assert_eq!(next.hole, Ident::new("hole0"));
        assert_eq!(next.body, t("(fn z. val(z)) hole0"));
        assert_eq!(next.holetype, Type::Nat);
    }

    #[test]
    fn nested_redex_keeps_outer_context() {
        let tr = context_transitions(&ctx("succ (x 3)", "Nat -o Nat")).unwrap();
        let ContextTransition::Open { action, next } = &tr[0] else {
            panic!()
        };
        assert_eq!(action.to_string(), "@(3)");
        assert_eq!(next.body, t("succ hole0"));
        let tr = context_transitions(&ctx("letpair a b = x in b (x) a", "Nat (x) Bool")).unwrap();
        assert_eq!(tr[0].action().unwrap().to_string(), "tensor(z2 (x) z1)");
    }

    #[test]
    fn non_evaluation_context_is_rejected() {
        assert_eq!(
            context_transitions(&ctx("<x, x>", "Nat")).unwrap_err(),
            ContextError::NotEvaluationContext
        );
        assert!(context_transitions(&ctx("x", "Nat")).unwrap().is_empty());
    }
}
