//! Executable checks of the calculus' metatheory.

mod checks;
mod enumerate;
mod generate;

pub use checks::{run_check, CheckConfig, CheckError, CheckReport, Failure, CHECKS};
pub use enumerate::{enum_size, Enumerator, Fragment, Universe};
pub use generate::{
    gen_linear_context, gen_linear_context_at, gen_open_term, gen_type, gen_typed_term, inhabited,
    GenConfig, GenError,
};
