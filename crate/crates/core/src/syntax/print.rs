use std::fmt::{self, Write};

use super::{Linearity, Term};

// Term precedence levels; a subterm printed in a slot of higher level than
// its own gets parenthesised.
const CHOICE: u8 = 0;
const TENSOR: u8 = 1;
const APP: u8 = 2;
const ATOM: u8 = 3;

fn level(t: &Term) -> u8 {
    match t {
        Term::Choice(..) => CHOICE,
        Term::Tensor(..) => TENSOR,
        Term::App(..) if t.as_omega().is_some() => ATOM,
        Term::App(..) | Term::Proj(..) => APP,
        // binding forms: loosest of all, and only safe when nothing follows
        Term::Lam { .. } | Term::If(..) | Term::LetPair { .. } | Term::Bind { .. } => CHOICE,
        _ => ATOM,
    }
}

fn is_binding_form(t: &Term) -> bool {
    matches!(
        t,
        Term::Lam { .. } | Term::If(..) | Term::LetPair { .. } | Term::Bind { .. }
    )
}

/// Print `t` into a slot of precedence `slot`. `tail` is true when nothing
/// follows the slot before the enclosing delimiter, which is the only place a
/// binding form may appear without parentheses.
fn write_term(out: &mut impl Write, t: &Term, slot: u8, tail: bool) -> fmt::Result {
    let paren = if is_binding_form(t) {
        !(tail && slot <= APP)
    } else {
        level(t) < slot
    };
    if paren {
        out.write_char('(')?;
        write_bare(out, t, true)?;
        out.write_char(')')
    } else {
        write_bare(out, t, tail)
    }
}

fn write_bare(out: &mut impl Write, t: &Term, tail: bool) -> fmt::Result {
    if let Some(ty) = t.as_omega() {
        return write!(out, "omega[{ty}]");
    }
    match t {
        Term::Var(x) => write!(out, "{x}"),
        Term::Nat(n) => write!(out, "{n}"),
        Term::Bool(b) => write!(out, "{b}"),
        Term::Succ => out.write_str("succ"),
        Term::Pred => out.write_str("pred"),
        Term::IsZero => out.write_str("iszero"),
        Term::Eq => out.write_str("eq"),
        Term::Fix(ty) => write!(out, "fix[{ty}]"),
        Term::Lam {
            binder,
            binder_type,
            linearity,
            body,
        } => {
            let kw = match linearity {
                Linearity::Linear => "fn",
                Linearity::Nonlinear => "fn!",
            };
            match binder_type {
                Some(ty) => write!(out, "{kw} {binder}:{ty}. ")?,
                None => write!(out, "{kw} {binder}. ")?,
            }
            write_term(out, body, CHOICE, tail)
        }
        Term::App(f, a) => {
            write_term(out, f, APP, false)?;
            out.write_char(' ')?;
            write_term(out, a, ATOM, false)
        }
        Term::If(c, a, b) => {
            out.write_str("if ")?;
            write_term(out, c, CHOICE, true)?;
            out.write_str(" then ")?;
            write_term(out, a, CHOICE, true)?;
            out.write_str(" else ")?;
            write_term(out, b, CHOICE, tail)
        }
        Term::Pair(a, b) => {
            out.write_char('<')?;
            write_term(out, a, CHOICE, true)?;
            out.write_str(", ")?;
            write_term(out, b, CHOICE, true)?;
            out.write_char('>')
        }
        Term::Proj(i, e) => {
            write!(out, "proj{} ", i.number())?;
            write_term(out, e, ATOM, false)
        }
        Term::Tensor(a, b) => {
            write_term(out, a, TENSOR, false)?;
            out.write_str(" (x) ")?;
            write_term(out, b, APP, tail)
        }
        Term::LetPair {
            left,
            right,
            scrutinee,
            body,
        } => {
            write!(out, "letpair {left} {right} = ")?;
            write_term(out, scrutinee, CHOICE, true)?;
            out.write_str(" in ")?;
            write_term(out, body, CHOICE, tail)
        }
        Term::Val(e) => {
            out.write_str("val(")?;
            write_term(out, e, CHOICE, true)?;
            out.write_char(')')
        }
        Term::Bind {
            binder,
            linearity,
            computation,
            body,
        } => {
            let kw = match linearity {
                Linearity::Linear => "bind",
                Linearity::Nonlinear => "bind!",
            };
            write!(out, "{kw} {binder} = ")?;
            write_term(out, computation, CHOICE, true)?;
            out.write_str(" in ")?;
            write_term(out, body, CHOICE, tail)
        }
        Term::Choice(a, b) => {
            write_term(out, a, CHOICE, false)?;
            out.write_str(" |~| ")?;
            write_term(out, b, TENSOR, tail)
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_term(f, self, CHOICE, true)
    }
}

#[cfg(test)]
mod tests {
    use crate::syntax::parse_term;

    fn roundtrip(src: &str) {
        let t = parse_term(src).unwrap();
        let printed = t.to_string();
        assert_eq!(printed, src, "printer output differs");
        assert_eq!(parse_term(&printed).unwrap(), t);
    }

    #[test]
    fn canonical_spellings_roundtrip() {
        roundtrip("val(fn! x:Nat. val(0) |~| val(1))");
        roundtrip("omega[Nat]");
        roundtrip("omega[T Nat] |~| val(1)");
        roundtrip("if eq x 5 then val(0) else omega[T Nat]");
        roundtrip("bind y = x in if eq y 1 then val(0) else omega[T Nat]");
        roundtrip("letpair a b = p in b (x) a");
        roundtrip("fix[Nat] (fn! f:Nat. succ f)");
        roundtrip("proj1 <pred 1, 0>");
        roundtrip("(fn x:Nat. x) |~| fn x:Nat. x");
        roundtrip("a (x) (b (x) c)");
        roundtrip("f (g x) (proj2 y)");
        roundtrip("(fn x. val(x)) y");
    }

    #[test]
    fn binding_form_in_left_operand_is_parenthesised() {
        let t = parse_term("(if a then b else c) (x) d").unwrap();
        assert_eq!(t.to_string(), "(if a then b else c) (x) d");
        let t = parse_term("a (x) fn x:Nat. x").unwrap();
        assert_eq!(t.to_string(), "a (x) fn x:Nat. x");
    }
}
