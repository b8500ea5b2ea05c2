use crate::lts::{tensor_body_type, Action, Trace};
use crate::syntax::{Ident, Linearity, Term, Type};
use crate::typing::check_program;

use super::{ContextError, LinearContext};

fn malformed(msg: String) -> ContextError {
    ContextError::MalformedTrace(msg)
}

fn fail() -> Term {
    Term::omega(Type::monad(Type::Nat))
}

fn binder(depth: usize) -> Ident {
    if depth == 0 {
        Ident::new("y")
    } else {
        Ident::new(format!("y{depth}"))
    }
}

/// `bind y = first in rest`, where `rest` is built for the hole `y`.
fn then(first: Term, actions: &[Action], ty: &Type, depth: usize) -> Result<Term, ContextError> {
    let y = binder(depth);
    let rest = build(actions, &Term::Var(y.clone()), ty, depth + 1)?;
    Ok(Term::Bind {
        binder: y,
        linearity: Linearity::Linear,
        computation: Box::new(first),
        body: Box::new(rest),
    })
}

fn build(actions: &[Action], hole: &Term, ty: &Type, depth: usize) -> Result<Term, ContextError> {
    let Some((a, rest)) = actions.split_first() else {
        return Ok(Term::val(hole.clone()));
    };
    if a.is_constant() && !rest.is_empty() {
        return Err(malformed(format!(
            "constant {a} is followed by further actions"
        )));
    }
    let mismatch = || malformed(format!("action {a} does not apply at type {ty}"));
    match (a, ty) {
        (Action::ConstNat(n), Type::Nat) => Ok(Term::if_(
            Term::apps(Term::Eq, [hole.clone(), Term::Nat(n.clone())]),
            Term::val(Term::nat(0)),
            fail(),
        )),
        (Action::ConstBool(b), Type::Bool) => {
            let (yes, no) = if *b {
                (Term::val(Term::nat(0)), fail())
            } else {
                (fail(), Term::val(Term::nat(0)))
            };
            Ok(Term::if_(hole.clone(), yes, no))
        }
        (Action::AppArg(arg), Type::LinArrow(dom, cod) | Type::Arrow(dom, cod)) => {
            let got = check_program(arg)?;
            if got != **dom {
                return Err(malformed(format!(
                    "argument {arg} has type {got}, expected {dom}"
                )));
            }
            then(
                Term::val(Term::app(hole.clone(), arg.clone())),
                rest,
                cod,
                depth,
            )
        }
        (Action::ProjAct(i), Type::With(l, r)) => {
            let next = if i.number() == 1 { l } else { r };
            then(Term::val(Term::proj(*i, hole.clone())), rest, next, depth)
        }
        (Action::TensorAct(body), Type::Tensor(l, r)) => {
            let next = tensor_body_type(body, l, r).map_err(malformed)?;
            let elim = Term::letpair(
                crate::lts::TENSOR_LEFT,
                crate::lts::TENSOR_RIGHT,
                hole.clone(),
                body.clone(),
            );
            then(Term::val(elim), rest, &next, depth)
        }
        (Action::TAct, Type::Monad(inner)) => then(hole.clone(), rest, inner, depth),
        _ => Err(mismatch()),
    }
}

/// The context that converges on a program exactly when the program can
/// take `s` (and, for a trace not ending in a constant, its residual
/// converges). The hole is `x`; binders are `y`, `y1`, `y2`, ...
pub fn synthesize_s_context(s: &Trace, holetype: &Type) -> Result<LinearContext, ContextError> {
    let x = Ident::new("x");
    let body = build(s.actions(), &Term::Var(x.clone()), holetype, 0)?;
    LinearContext::new(body, x, holetype.clone())
}
