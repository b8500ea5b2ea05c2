//! Linear PCF and its non-deterministic monadic extension.
//!
//! The crate provides a dual-context type checker, call-by-name small-step
//! reduction, a labelled transition system with bounded trace equivalence,
//! linear contexts with their reductions and trace-recognising contexts, and
//! executable checks of the calculus' metatheory.

pub mod contexts;
pub mod lts;
pub mod metatheory;
pub mod reduction;
pub mod syntax;
pub mod typing;

pub use syntax::{parse_term, parse_type, Ident, Linearity, ProjIndex, SyntaxError, Term, Type};
pub use typing::{check, check_linear_context, check_program, CheckResult, TypeError, TypingEnv};
