//! External transitions, bounded trace sets and the trace preorder.

mod action;
mod pool;
mod traces;
mod transitions;

pub use action::{parse_trace, Action, Trace, TraceSyntaxError};
pub use pool::{tensor_body_type, ArgumentPool, PoolError, TensorBody, TENSOR_LEFT, TENSOR_RIGHT};
pub use traces::{
    classify_trace, equiv_of_sets, follow_trace, leq_of_sets, trace_equiv, trace_leq, traces,
    traces_at, Bounds, EquivReport, EquivVerdict, LeqVerdict, TraceClass, TraceSet,
};
pub use transitions::{apply_action, external_transitions, program_transitions, Transition};

use crate::reduction::EvalError;
use crate::syntax::{Term, Type};
use crate::typing::TypeError;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum LtsError {
    #[error("term is reducible: {0}")]
    NotIrreducible(Term),
    #[error("ill-typed: {0}")]
    IllTyped(#[from] TypeError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("programs have different types: {left} and {right}")]
    TypeMismatch { left: Type, right: Type },
    #[error("trace `{0}` is not in the set")]
    TraceNotInSet(Trace),
}
