//! Abstract syntax, substitution, alpha-equivalence and the concrete
//! grammar.

mod parse;
mod print;
mod subst;
mod term;
mod ty;

pub use parse::{parse_term, parse_type, SyntaxError};
pub use subst::{alpha_eq, free_vars, fresh_name, is_closed, occurs_free, substitute, substitute1};
pub use term::{Ident, Linearity, ProjIndex, Term};
pub use ty::Type;
