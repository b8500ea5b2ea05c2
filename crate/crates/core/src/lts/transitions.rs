use crate::reduction::is_reducible;
use crate::syntax::{substitute, substitute1, Ident, ProjIndex, Term, Type};

use super::pool::{tensor_body_type, ArgumentPool, TENSOR_LEFT, TENSOR_RIGHT};
use super::{Action, LtsError};

/// One external transition `e →α e'`, with the type of `e'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transition {
    pub action: Action,
    pub target: Term,
    pub target_type: Type,
}

/// Terms of function type that accept `@e`: abstractions, the primitive
/// function constants, and `eq` applied to one literal.
fn accepts_arguments(e: &Term) -> bool {
    match e {
        Term::Lam { .. } | Term::Succ | Term::Pred | Term::IsZero | Term::Eq | Term::Fix(_) => true,
        Term::App(f, a) => **f == Term::Eq && a.as_nat().is_some(),
        _ => false,
    }
}

/// The transition of an irreducible term `e: ty` under `action`, if any.
/// Labels are not checked against the pool.
pub fn apply_action(e: &Term, ty: &Type, action: &Action) -> Option<(Term, Type)> {
    match (action, e, ty) {
        (Action::ConstNat(n), Term::Nat(m), _) if n == m => {
            Some((Term::omega(Type::Nat), Type::Nat))
        }
        (Action::ConstBool(b), Term::Bool(c), _) if b == c => {
            Some((Term::omega(Type::Bool), Type::Bool))
        }
        (Action::AppArg(arg), _, Type::LinArrow(_, cod) | Type::Arrow(_, cod))
            if accepts_arguments(e) =>
        {
            let target = match e {
                Term::Lam { binder, body, .. } => substitute1(body, binder, arg),
                _ => Term::app(e.clone(), arg.clone()),
            };
            Some((target, (**cod).clone()))
        }
        (Action::ProjAct(i), Term::Pair(a, b), Type::With(ta, tb)) => Some(match i {
            ProjIndex::First => ((**a).clone(), (**ta).clone()),
            ProjIndex::Second => ((**b).clone(), (**tb).clone()),
        }),
        (Action::TensorAct(body), Term::Tensor(a, b), Type::Tensor(ta, tb)) => {
            let result = tensor_body_type(body, ta, tb).ok()?;
            let target = substitute(
                body,
                &[
                    (Ident::new(TENSOR_LEFT), (**a).clone()),
                    (Ident::new(TENSOR_RIGHT), (**b).clone()),
                ],
            );
            Some((target, result))
        }
        (Action::TAct, Term::Val(v), Type::Monad(inner)) if !is_reducible(v) => {
            Some(((**v).clone(), (**inner).clone()))
        }
        _ => None,
    }
}

/// Candidate labels for a term of type `ty`, instantiated from the pool.
fn candidate_actions(e: &Term, ty: &Type, pool: &ArgumentPool) -> Vec<Action> {
    match (e, ty) {
        (Term::Nat(_) | Term::Bool(_), _) => Action::constant(e).into_iter().collect(),
        (_, Type::LinArrow(dom, _) | Type::Arrow(dom, _)) => {
            pool.args(dom).iter().map(Action::app).collect()
        }
        (_, Type::With(..)) => vec![
            Action::ProjAct(ProjIndex::First),
            Action::ProjAct(ProjIndex::Second),
        ],
        (_, Type::Tensor(a, b)) => pool
            .tensor_bodies(a, b)
            .iter()
            .map(|tb| Action::tensor(&tb.body))
            .collect(),
        (_, Type::Monad(_)) => vec![Action::TAct],
        _ => Vec::new(),
    }
}

/// External transitions of an irreducible term `e: ty`, labels drawn from
/// `pool`. Non-canonical irreducible terms (open ones) have none.
pub fn external_transitions(
    e: &Term,
    ty: &Type,
    pool: &ArgumentPool,
) -> Result<Vec<Transition>, LtsError> {
    if is_reducible(e) {
        return Err(LtsError::NotIrreducible(e.clone()));
    }
    Ok(candidate_actions(e, ty, pool)
        .into_iter()
        .filter_map(|action| {
            let (target, target_type) = apply_action(e, ty, &action)?;
            Some(Transition {
                action,
                target,
                target_type,
            })
        })
        .collect())
}

/// [`external_transitions`] for a closed program, typing it first.
pub fn program_transitions(e: &Term, pool: &ArgumentPool) -> Result<Vec<Transition>, LtsError> {
    let ty = crate::typing::check_program(e)?;
    external_transitions(e, &ty, pool)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq, parse_term};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn constant_steps_to_omega() {
        let tr = program_transitions(&t("7"), &ArgumentPool::default()).unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr[0].action.to_string(), "7");
        assert_eq!(tr[0].target, Term::omega(Type::Nat));
    }

    #[test]
    fn lambda_takes_each_pool_argument() {
        let tr = program_transitions(&t("fn x:Nat. succ x"), &ArgumentPool::default()).unwrap();
        let expected = [t("succ 0"), t("succ 1"), t("succ omega[Nat]")];
        assert_eq!(tr.len(), 3);
        for (got, want) in tr.iter().zip(&expected) {
            assert!(alpha_eq(&got.target, want));
        }
    }

    #[test]
    fn monadic_value_hands_over_its_content() {
        let tr = program_transitions(
            &t("val(fn! x:Nat. val(0) |~| val(1))"),
            &ArgumentPool::default(),
        )
        .unwrap();
        assert_eq!(tr.len(), 1);
        assert_eq!(tr[0].action, Action::TAct);
        assert!(alpha_eq(&tr[0].target, &t("fn! x:Nat. val(0) |~| val(1)")));
    }

    #[test]
    fn primitive_functions_take_arguments() {
        let pool = ArgumentPool::default();
        let tr = program_transitions(&t("succ"), &pool).unwrap();
        assert_eq!(tr.len(), 3);
        assert_eq!(tr[0].target, t("succ 0"));
        let tr = program_transitions(&t("eq 2"), &pool).unwrap();
        assert_eq!(tr[1].target, t("eq 2 1"));
    }

    #[test]
    fn pairs_and_tensors() {
        let pool = ArgumentPool::default();
        let tr = program_transitions(&t("<omega[Nat], 0>"), &pool).unwrap();
        assert_eq!(tr.len(), 2);
        assert_eq!(tr[1].target, t("0"));
        let tr = program_transitions(&t("1 (x) true"), &pool).unwrap();
        assert_eq!(tr[1].target, t("true (x) 1"));
        assert!(tr
            .iter()
            .all(|x| !crate::syntax::free_vars(&x.target).contains(&Ident::new("z1"))));
    }

    #[test]
    fn reducible_terms_are_rejected() {
        let err = program_transitions(&t("pred 1"), &ArgumentPool::default()).unwrap_err();
        assert!(matches!(err, LtsError::NotIrreducible(_)));
    }
}
