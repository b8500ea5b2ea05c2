//! Recursive-descent parser for the concrete term and type grammar.
//!
//! Precedence, loosest first: `|~|`, `(x)`, application, atoms. The
//! binding forms `fn`, `if`, `letpair` and `bind` extend as far to the
//! right as possible. The character sequence `(x)` is always the tensor
//! operator; write `( x )` for a parenthesised variable named `x`.

use std::fmt;

use num_bigint::BigUint;

use super::{Ident, Linearity, ProjIndex, Term, Type};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("syntax error at {line}:{column}: {message}")]
pub struct SyntaxError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Nat(BigUint),
    // keywords
    Fn,
    FnBang,
    If,
    Then,
    Else,
    True,
    False,
    Succ,
    Pred,
    IsZero,
    EqKw,
    Fix,
    Omega,
    Proj1,
    Proj2,
    LetPair,
    In,
    Val,
    Bind,
    BindBang,
    // punctuation
    LParen,
    RParen,
    LBracket,
    RBracket,
    Lt,
    Gt,
    Comma,
    Colon,
    Dot,
    Equals,
    TensorOp,
    ChoiceOp,
    Amp,
    LinArrow,
    Arrow,
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Tok::Ident(s) => return write!(f, "identifier `{s}`"),
            Tok::Nat(n) => return write!(f, "literal `{n}`"),
            Tok::Fn => "`fn`",
            Tok::FnBang => "`fn!`",
            Tok::If => "`if`",
            Tok::Then => "`then`",
            Tok::Else => "`else`",
            Tok::True => "`true`",
            Tok::False => "`false`",
            Tok::Succ => "`succ`",
            Tok::Pred => "`pred`",
            Tok::IsZero => "`iszero`",
            Tok::EqKw => "`eq`",
            Tok::Fix => "`fix`",
            Tok::Omega => "`omega`",
            Tok::Proj1 => "`proj1`",
            Tok::Proj2 => "`proj2`",
            Tok::LetPair => "`letpair`",
            Tok::In => "`in`",
            Tok::Val => "`val`",
            Tok::Bind => "`bind`",
            Tok::BindBang => "`bind!`",
            Tok::LParen => "`(`",
            Tok::RParen => "`)`",
            Tok::LBracket => "`[`",
            Tok::RBracket => "`]`",
            Tok::Lt => "`<`",
            Tok::Gt => "`>`",
            Tok::Comma => "`,`",
            Tok::Colon => "`:`",
            Tok::Dot => "`.`",
            Tok::Equals => "`=`",
            Tok::TensorOp => "`(x)`",
            Tok::ChoiceOp => "`|~|`",
            Tok::Amp => "`&`",
            Tok::LinArrow => "`-o`",
            Tok::Arrow => "`->`",
            Tok::Eof => "end of input",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn keyword(word: &str) -> Option<Tok> {
    Some(match word {
        "fn" => Tok::Fn,
        "if" => Tok::If,
        "then" => Tok::Then,
        "else" => Tok::Else,
        "true" => Tok::True,
        "false" => Tok::False,
        "succ" => Tok::Succ,
        "pred" => Tok::Pred,
        "iszero" => Tok::IsZero,
        "eq" => Tok::EqKw,
        "fix" => Tok::Fix,
        "omega" => Tok::Omega,
        "proj1" => Tok::Proj1,
        "proj2" => Tok::Proj2,
        "letpair" => Tok::LetPair,
        "in" => Tok::In,
        "val" => Tok::Val,
        "bind" => Tok::Bind,
        _ => return None,
    })
}

fn lex(src: &str) -> Result<Vec<Spanned>, SyntaxError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0usize, 1usize, 1usize);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        if c == '\n' {
            i += 1;
            line += 1;
            col = 1;
            continue;
        }
        if c.is_whitespace() {
            advance(1, &mut i, &mut col);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                i += 1;
            }
            continue;
        }
        let rest: String = chars[i..chars.len().min(i + 3)].iter().collect();
        let tok = if rest.starts_with("(x)") {
            advance(3, &mut i, &mut col);
            Tok::TensorOp
        } else if rest.starts_with("|~|") {
            advance(3, &mut i, &mut col);
            Tok::ChoiceOp
        } else if rest.starts_with("-o") {
            advance(2, &mut i, &mut col);
            Tok::LinArrow
        } else if rest.starts_with("->") {
            advance(2, &mut i, &mut col);
            Tok::Arrow
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                advance(1, &mut i, &mut col);
            }
            let digits: String = chars[start..i].iter().collect();
            Tok::Nat(digits.parse().expect("digit string"))
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '\'')
            {
                advance(1, &mut i, &mut col);
            }
            let word: String = chars[start..i].iter().collect();
            let bang = i < chars.len() && chars[i] == '!';
            match (word.as_str(), bang) {
                ("fn", true) => {
                    advance(1, &mut i, &mut col);
                    Tok::FnBang
                }
                ("bind", true) => {
                    advance(1, &mut i, &mut col);
                    Tok::BindBang
                }
                _ => keyword(&word).unwrap_or(Tok::Ident(word)),
            }
        } else {
            let t = match c {
                '(' => Tok::LParen,
                ')' => Tok::RParen,
                '[' => Tok::LBracket,
                ']' => Tok::RBracket,
                '<' => Tok::Lt,
                '>' => Tok::Gt,
                ',' => Tok::Comma,
                ':' => Tok::Colon,
                '.' => Tok::Dot,
                '=' => Tok::Equals,
                '&' => Tok::Amp,
                other => {
                    return Err(SyntaxError {
                        line: tl,
                        column: tc,
                        message: format!("unexpected character `{other}`"),
                    })
                }
            };
            advance(1, &mut i, &mut col);
            t
        };
        out.push(Spanned {
            tok,
            line: tl,
            column: tc,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column: col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

type PResult<T> = Result<T, SyntaxError>;

impl Parser {
    fn new(src: &str) -> PResult<Self> {
        Ok(Parser {
            toks: lex(src)?,
            pos: 0,
        })
    }

    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error<T>(&self, message: impl Into<String>) -> PResult<T> {
        let s = &self.toks[self.pos];
        Err(SyntaxError {
            line: s.line,
            column: s.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, want: Tok) -> PResult<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            self.error(format!("expected {want}, found {}", self.peek()))
        }
    }

    fn ident(&mut self) -> PResult<Ident> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Ident::new(s))
            }
            other => self.error(format!("expected identifier, found {other}")),
        }
    }

    fn finish(&mut self) -> PResult<()> {
        if *self.peek() == Tok::Eof {
            Ok(())
        } else {
            self.error(format!("unexpected {} after end of term", self.peek()))
        }
    }

    // ---- types ----

    fn ty(&mut self) -> PResult<Type> {
        let lhs = self.ty_product()?;
        match self.peek() {
            Tok::LinArrow => {
                self.bump();
                Ok(Type::lin_arrow(lhs, self.ty()?))
            }
            Tok::Arrow => {
                self.bump();
                Ok(Type::arrow(lhs, self.ty()?))
            }
            _ => Ok(lhs),
        }
    }

    fn ty_product(&mut self) -> PResult<Type> {
        let mut lhs = self.ty_prefix()?;
        loop {
            match self.peek() {
                Tok::Amp => {
                    self.bump();
                    lhs = Type::with(lhs, self.ty_prefix()?);
                }
                Tok::TensorOp => {
                    self.bump();
                    lhs = Type::tensor(lhs, self.ty_prefix()?);
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn ty_prefix(&mut self) -> PResult<Type> {
        match self.peek().clone() {
            Tok::Ident(s) if s == "T" => {
                self.bump();
                Ok(Type::monad(self.ty_prefix()?))
            }
            Tok::Ident(s) if s == "Nat" => {
                self.bump();
                Ok(Type::Nat)
            }
            Tok::Ident(s) if s == "Bool" => {
                self.bump();
                Ok(Type::Bool)
            }
            Tok::LParen => {
                self.bump();
                let t = self.ty()?;
                self.expect(Tok::RParen)?;
                Ok(t)
            }
            other => self.error(format!("expected a type, found {other}")),
        }
    }

    // ---- terms ----

    fn expr(&mut self) -> PResult<Term> {
        let mut lhs = self.tensor_expr()?;
        while *self.peek() == Tok::ChoiceOp {
            self.bump();
            let rhs = self.tensor_expr()?;
            lhs = Term::choice(lhs, rhs);
        }
        Ok(lhs)
    }

    fn tensor_expr(&mut self) -> PResult<Term> {
        let mut lhs = self.app_expr()?;
        while *self.peek() == Tok::TensorOp {
            self.bump();
            let rhs = self.app_expr()?;
            lhs = Term::tensor(lhs, rhs);
        }
        Ok(lhs)
    }

    fn app_expr(&mut self) -> PResult<Term> {
        match self.peek() {
            Tok::Fn | Tok::FnBang | Tok::If | Tok::LetPair | Tok::Bind | Tok::BindBang => {
                return self.binding_form()
            }
            _ => {}
        }
        let mut head = match self.peek() {
            Tok::Proj1 | Tok::Proj2 => {
                let i = if self.bump() == Tok::Proj1 {
                    ProjIndex::First
                } else {
                    ProjIndex::Second
                };
                Term::proj(i, self.atom()?)
            }
            _ => self.atom()?,
        };
        while self.starts_atom() {
            let arg = self.atom()?;
            head = Term::app(head, arg);
        }
        Ok(head)
    }

    fn starts_atom(&self) -> bool {
        matches!(
            self.peek(),
            Tok::Ident(_)
                | Tok::Nat(_)
                | Tok::True
                | Tok::False
                | Tok::Succ
                | Tok::Pred
                | Tok::IsZero
                | Tok::EqKw
                | Tok::Fix
                | Tok::Omega
                | Tok::Lt
                | Tok::Val
                | Tok::LParen
        )
    }

    fn binding_form(&mut self) -> PResult<Term> {
        match self.bump() {
            tok @ (Tok::Fn | Tok::FnBang) => {
                let linearity = if tok == Tok::Fn {
                    Linearity::Linear
                } else {
                    Linearity::Nonlinear
                };
                let binder = self.ident()?;
                let binder_type = if *self.peek() == Tok::Colon {
                    self.bump();
                    Some(self.ty()?)
                } else {
                    None
                };
                self.expect(Tok::Dot)?;
                let body = self.expr()?;
                Ok(Term::Lam {
                    binder,
                    binder_type,
                    linearity,
                    body: Box::new(body),
                })
            }
            Tok::If => {
                let c = self.expr()?;
                self.expect(Tok::Then)?;
                let t = self.expr()?;
                self.expect(Tok::Else)?;
                let e = self.expr()?;
                Ok(Term::if_(c, t, e))
            }
            Tok::LetPair => {
                let left = self.ident()?;
                let right = self.ident()?;
                if left == right {
                    return self.error(format!("letpair binds `{left}` twice"));
                }
                self.expect(Tok::Equals)?;
                let scrutinee = self.expr()?;
                self.expect(Tok::In)?;
                let body = self.expr()?;
                Ok(Term::LetPair {
                    left,
                    right,
                    scrutinee: Box::new(scrutinee),
                    body: Box::new(body),
                })
            }
            tok @ (Tok::Bind | Tok::BindBang) => {
                let linearity = if tok == Tok::Bind {
                    Linearity::Linear
                } else {
                    Linearity::Nonlinear
                };
                let binder = self.ident()?;
                self.expect(Tok::Equals)?;
                let computation = self.expr()?;
                self.expect(Tok::In)?;
                let body = self.expr()?;
                Ok(Term::Bind {
                    binder,
                    linearity,
                    computation: Box::new(computation),
                    body: Box::new(body),
                })
            }
            _ => unreachable!("binding_form called on a non-binding token"),
        }
    }

    fn bracketed_type(&mut self) -> PResult<Type> {
        self.expect(Tok::LBracket)?;
        let t = self.ty()?;
        self.expect(Tok::RBracket)?;
        Ok(t)
    }

    fn atom(&mut self) -> PResult<Term> {
        match self.peek().clone() {
            Tok::Ident(s) => {
                self.bump();
                Ok(Term::var(s))
            }
            Tok::Nat(n) => {
                self.bump();
                Ok(Term::Nat(n))
            }
            Tok::True => {
                self.bump();
                Ok(Term::Bool(true))
            }
            Tok::False => {
                self.bump();
                Ok(Term::Bool(false))
            }
            Tok::Succ => {
                self.bump();
                Ok(Term::Succ)
            }
            Tok::Pred => {
                self.bump();
                Ok(Term::Pred)
            }
            Tok::IsZero => {
                self.bump();
                Ok(Term::IsZero)
            }
            Tok::EqKw => {
                self.bump();
                Ok(Term::Eq)
            }
            Tok::Fix => {
                self.bump();
                Ok(Term::Fix(self.bracketed_type()?))
            }
            Tok::Omega => {
                self.bump();
                Ok(Term::omega(self.bracketed_type()?))
            }
            Tok::Lt => {
                self.bump();
                let a = self.expr()?;
                self.expect(Tok::Comma)?;
                let b = self.expr()?;
                self.expect(Tok::Gt)?;
                Ok(Term::pair(a, b))
            }
            Tok::Val => {
                self.bump();
                if *self.peek() == Tok::TensorOp {
                    self.bump();
                    return Ok(Term::val(Term::var("x")));
                }
                self.expect(Tok::LParen)?;
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Term::val(e))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            // `(x)` lexes as the tensor operator; in operand position it can
            // only be the parenthesised variable `x`.
            Tok::TensorOp => {
                self.bump();
                Ok(Term::var("x"))
            }
            other => self.error(format!("expected a term, found {other}")),
        }
    }
}

/// Parse a complete term.
pub fn parse_term(src: &str) -> Result<Term, SyntaxError> {
    let mut p = Parser::new(src)?;
    let t = p.expr()?;
    p.finish()?;
    Ok(t)
}

/// Parse a complete type.
pub fn parse_type(src: &str) -> Result<Type, SyntaxError> {
    let mut p = Parser::new(src)?;
    let t = p.ty()?;
    p.finish()?;
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::alpha_eq;

    #[test]
    fn parses_the_choice_function() {
        let t = parse_term("val(fn! x:Nat. val(0) |~| val(1))").unwrap();
        let expected = Term::val(Term::lam(
            "x",
            Type::Nat,
            Linearity::Nonlinear,
            Term::choice(Term::val(Term::nat(0)), Term::val(Term::nat(1))),
        ));
        assert_eq!(t, expected);
    }

    #[test]
    fn omega_expands_to_fix_of_identity() {
        let t = parse_term("omega[Nat]").unwrap();
        assert!(alpha_eq(
            &t,
            &parse_term("fix[Nat] (fn! x:Nat. x)").unwrap()
        ));
        assert_eq!(t.as_omega(), Some(&Type::Nat));
    }

    #[test]
    fn unterminated_lambda_is_a_syntax_error() {
        let err = parse_term("(fn").unwrap_err();
        assert_eq!((err.line, err.column), (1, 4));
    }

    #[test]
    fn error_positions_track_lines() {
        let err = parse_term("succ\n  @").unwrap_err();
        assert_eq!((err.line, err.column), (2, 3));
    }

    #[test]
    fn unbound_identifiers_parse() {
        assert_eq!(parse_term("nowhere").unwrap(), Term::var("nowhere"));
    }

    #[test]
    fn application_is_left_associative() {
        let t = parse_term("eq 1 2").unwrap();
        assert_eq!(t, Term::apps(Term::Eq, [Term::nat(1), Term::nat(2)]));
    }

    #[test]
    fn choice_binds_loosest() {
        let t = parse_term("a (x) b |~| c").unwrap();
        assert_eq!(
            t,
            Term::choice(Term::tensor(Term::var("a"), Term::var("b")), Term::var("c"))
        );
    }

    #[test]
    fn arrows_are_right_associative() {
        let t = parse_type("Nat -o Nat -> Bool").unwrap();
        assert_eq!(
            t,
            Type::lin_arrow(Type::Nat, Type::arrow(Type::Nat, Type::Bool))
        );
        let t = parse_type("T Nat & Bool (x) Nat").unwrap();
        assert_eq!(
            t,
            Type::tensor(Type::with(Type::monad(Type::Nat), Type::Bool), Type::Nat)
        );
    }

    #[test]
    fn bang_forms() {
        let t = parse_term("bind! f = x in f").unwrap();
        assert!(matches!(
            t,
            Term::Bind {
                linearity: Linearity::Nonlinear,
                ..
            }
        ));
        let t = parse_term("fn! y. y").unwrap();
        assert!(matches!(
            t,
            Term::Lam {
                binder_type: None,
                linearity: Linearity::Nonlinear,
                ..
            }
        ));
    }

    #[test]
    fn letpair_rejects_duplicate_binders() {
        assert!(parse_term("letpair x x = p in x").is_err());
    }
}
