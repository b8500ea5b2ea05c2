//! Linear contexts: plugging, context transitions, classification of
//! reductions of plugged terms, context traces and trace-recognising
//! contexts.

mod context_trace;
mod lcr;
mod scontext;
mod transitions;

pub use context_trace::context_trace;
pub use lcr::{classify_lcr, classify_step, LcrForm, NextContext};
pub use scontext::synthesize_s_context;
pub use transitions::{
    context_transitions, decompose, ConstantRedex, ContextTransition, HoleRedex,
};

use std::fmt;

use crate::lts::{LtsError, Trace};
use crate::reduction::EvalError;
use crate::syntax::{fresh_name, substitute1, Ident, Term, Type};
use crate::typing::{check_linear_context, check_program, TypeError};

/// Identifier marking the hole in context files.
pub const FILE_HOLE: &str = "HOLE";

/// A term with exactly one free variable, used linearly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearContext {
    pub body: Term,
    pub hole: Ident,
    pub holetype: Type,
    pub result: Type,
}

impl LinearContext {
    pub fn new(body: Term, hole: Ident, holetype: Type) -> Result<Self, ContextError> {
        let result = check_linear_context(&body, &hole, &holetype)?;
        Ok(LinearContext {
            body,
            hole,
            holetype,
            result,
        })
    }

    /// The identity context `x`.
    pub fn identity(hole: Ident, holetype: Type) -> Self {
        LinearContext {
            body: Term::Var(hole.clone()),
            hole,
            result: holetype.clone(),
            holetype,
        }
    }

    /// Whether the context is the bare hole.
    pub fn is_hole(&self) -> bool {
        matches!(&self.body, Term::Var(x) if *x == self.hole)
    }

    /// Whether the hole is in evaluation position.
    pub fn is_evaluation_context(&self) -> bool {
        self.is_hole() || decompose(&self.body, &self.hole).is_some()
    }

    /// `c[e/x]` for an `e` of the hole type.
    pub fn plug(&self, e: &Term) -> Result<Term, ContextError> {
        let ty = check_program(e)?;
        if ty != self.holetype {
            return Err(ContextError::TypeMismatch {
                expected: self.holetype.clone(),
                found: ty,
            });
        }
        Ok(self.plug_unchecked(e))
    }

    pub(crate) fn plug_unchecked(&self, e: &Term) -> Term {
        substitute1(&self.body, &self.hole, e)
    }

    /// Same context with its hole renamed to `name`.
    pub fn rename_hole(&self, name: Ident) -> Self {
        LinearContext {
            body: substitute1(&self.body, &self.hole, &Term::Var(name.clone())),
            hole: name,
            holetype: self.holetype.clone(),
            result: self.result.clone(),
        }
    }

    /// Rename the hole to `HOLE` for writing to a file.
    pub fn to_file_text(&self) -> String {
        self.rename_hole(Ident::new(FILE_HOLE)).body.to_string()
    }
}

impl fmt::Display for LinearContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} [{}: {}] : {}",
            self.body, self.hole, self.holetype, self.result
        )
    }
}

/// `hole0`, `hole1`, ...: the first such name not occurring in `avoid`.
pub(crate) fn fresh_hole(avoid: &Term) -> Ident {
    let names = avoid.all_names();
    (0..)
        .map(|i| Ident::new(format!("hole{i}")))
        .find(|n| !names.contains(n))
        .expect("unbounded supply")
}

pub(crate) fn fresh_var(base: &str, avoid: &Term) -> Ident {
    fresh_name(&Ident::new(base), &avoid.all_names())
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ContextError {
    #[error("ill-typed: {0}")]
    IllTyped(#[from] TypeError),
    #[error("program has type {found}, the hole expects {expected}")]
    TypeMismatch { expected: Type, found: Type },
    #[error("the hole is not in evaluation position")]
    NotEvaluationContext,
    #[error("plugged term does not reduce: {0}")]
    Irreducible(Term),
    #[error("no linear context reduction explains the step to {successor}")]
    UnclassifiableReduction { successor: Term },
    #[error("trace `{0}` is not taken within the bounds")]
    TraceNotTaken(Trace),
    #[error("malformed trace: {0}")]
    MalformedTrace(String),
    #[error(transparent)]
    Lts(#[from] LtsError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_type};

    fn ctx(body: &str, ty: &str) -> LinearContext {
        LinearContext::new(
            parse_term(body).unwrap(),
            Ident::new("x"),
            parse_type(ty).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn plug_examples() {
        assert_eq!(
            ctx("x", "Nat").plug(&parse_term("5").unwrap()).unwrap(),
            parse_term("5").unwrap()
        );
        assert_eq!(
            ctx("pred x", "Nat")
                .plug(&parse_term("3").unwrap())
                .unwrap(),
            parse_term("pred 3").unwrap()
        );
        // The double-application context is not linear (the hole sits in an
        // unrestricted position), so it is built without the linearity check.
        let c = LinearContext {
            body: parse_term("bind! f = HOLE in bind! x = f 0 in bind! y = f 0 in val(eq x y)")
                .unwrap(),
            hole: Ident::new(FILE_HOLE),
            holetype: parse_type("T (Nat -> T Nat)").unwrap(),
            result: parse_type("T Bool").unwrap(),
        };
        assert!(LinearContext::new(c.body.clone(), c.hole.clone(), c.holetype.clone()).is_err());
        let p = c
            .plug(&parse_term("val(fn! x:Nat. val(0) |~| val(1))").unwrap())
            .unwrap();
        assert_eq!(
            p,
            parse_term(
                "bind! f = val(fn! x:Nat. val(0) |~| val(1)) in bind! x = f 0 in bind! y = f 0 in val(eq x y)"
            )
            .unwrap()
        );
        assert!(matches!(
            ctx("pred x", "Nat").plug(&parse_term("true").unwrap()),
            Err(ContextError::TypeMismatch { .. })
        ));
    }

    #[test]
    fn evaluation_positions() {
        assert!(ctx("x", "Nat").is_evaluation_context());
        assert!(ctx("succ (pred x)", "Nat").is_evaluation_context());
        assert!(ctx("eq 3 x", "Nat").is_evaluation_context());
        assert!(ctx("bind y = val(x) in val(y)", "Nat").is_evaluation_context());
        assert!(!ctx("<x, x>", "Nat").is_evaluation_context());
        assert!(!ctx("(fn y:Nat. y) x", "Nat").is_evaluation_context());
        assert!(!ctx("x |~| x", "T Nat").is_evaluation_context());
    }
}
