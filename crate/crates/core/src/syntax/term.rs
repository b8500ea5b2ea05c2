use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;

use super::Type;

/// A variable name. Cheap to clone and safe to share across threads.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ident(Arc<str>);

impl Ident {
    pub fn new(name: impl AsRef<str>) -> Self {
        Ident(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for Ident {
    fn from(s: &str) -> Self {
        Ident::new(s)
    }
}

/// How a binder may use its variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Linearity {
    /// Used exactly once (`fn x:τ.`, `bind x = ...`).
    Linear,
    /// Unrestricted (`fn! x:τ.`, `bind! x = ...`).
    Nonlinear,
}

/// Which component a projection selects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProjIndex {
    First,
    Second,
}

impl ProjIndex {
    pub fn number(self) -> u8 {
        match self {
            ProjIndex::First => 1,
            ProjIndex::Second => 2,
        }
    }
}

/// Terms of the language. Terms are identified up to alpha-equivalence
/// everywhere outside this module; structural `==` is only meaningful
/// after [`Term::alpha_normalize`].
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(Ident),
    Nat(BigUint),
    Bool(bool),
    Succ,
    Pred,
    IsZero,
    Eq,
    Fix(Type),
    /// `binder_type` is `None` only for the abstraction produced by
    /// reducing a `bind` redex; such a lambda always sits in the head of an
    /// application, where its argument determines the binder type.
    Lam {
        binder: Ident,
        binder_type: Option<Type>,
        linearity: Linearity,
        body: Box<Term>,
    },
    App(Box<Term>, Box<Term>),
    If(Box<Term>, Box<Term>, Box<Term>),
    Pair(Box<Term>, Box<Term>),
    Proj(ProjIndex, Box<Term>),
    Tensor(Box<Term>, Box<Term>),
    LetPair {
        left: Ident,
        right: Ident,
        scrutinee: Box<Term>,
        body: Box<Term>,
    },
    Val(Box<Term>),
    Bind {
        binder: Ident,
        linearity: Linearity,
        computation: Box<Term>,
        body: Box<Term>,
    },
    Choice(Box<Term>, Box<Term>),
}

impl Term {
    pub fn var(name: impl AsRef<str>) -> Term {
        Term::Var(Ident::new(name))
    }

    pub fn nat(n: u64) -> Term {
        Term::Nat(BigUint::from(n))
    }

    pub fn lam(binder: impl AsRef<str>, ty: Type, linearity: Linearity, body: Term) -> Term {
        Term::Lam {
            binder: Ident::new(binder),
            binder_type: Some(ty),
            linearity,
            body: Box::new(body),
        }
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }

    /// Left-nested application `f a1 a2 ...`.
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn if_(c: Term, t: Term, e: Term) -> Term {
        Term::If(Box::new(c), Box::new(t), Box::new(e))
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Box::new(a), Box::new(b))
    }

    pub fn proj(i: ProjIndex, e: Term) -> Term {
        Term::Proj(i, Box::new(e))
    }

    pub fn tensor(a: Term, b: Term) -> Term {
        Term::Tensor(Box::new(a), Box::new(b))
    }

    pub fn letpair(
        left: impl AsRef<str>,
        right: impl AsRef<str>,
        scrutinee: Term,
        body: Term,
    ) -> Term {
        Term::LetPair {
            left: Ident::new(left),
            right: Ident::new(right),
            scrutinee: Box::new(scrutinee),
            body: Box::new(body),
        }
    }

    pub fn val(e: Term) -> Term {
        Term::Val(Box::new(e))
    }

    pub fn bind(
        binder: impl AsRef<str>,
        linearity: Linearity,
        computation: Term,
        body: Term,
    ) -> Term {
        Term::Bind {
            binder: Ident::new(binder),
            linearity,
            computation: Box::new(computation),
            body: Box::new(body),
        }
    }

    pub fn choice(a: Term, b: Term) -> Term {
        Term::Choice(Box::new(a), Box::new(b))
    }

    /// `Ω_τ = fix_τ (fn! x:τ. x)`, the canonical divergent program.
    pub fn omega(ty: Type) -> Term {
        Term::app(
            Term::Fix(ty.clone()),
            Term::lam("x", ty, Linearity::Nonlinear, Term::var("x")),
        )
    }

    /// Whether the term is `Ω_τ` for some `τ`, up to the binder name.
    pub fn as_omega(&self) -> Option<&Type> {
        if let Term::App(f, a) = self {
            if let (
                Term::Fix(ty),
                Term::Lam {
                    binder,
                    binder_type: Some(bt),
                    linearity: Linearity::Nonlinear,
                    body,
                },
            ) = (&**f, &**a)
            {
                if bt == ty && matches!(&**body, Term::Var(v) if v == binder) {
                    return Some(ty);
                }
            }
        }
        None
    }

    pub fn as_nat(&self) -> Option<&BigUint> {
        match self {
            Term::Nat(n) => Some(n),
            _ => None,
        }
    }

    /// Number of abstract-syntax nodes. Type annotations do not count.
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_)
            | Term::Nat(_)
            | Term::Bool(_)
            | Term::Succ
            | Term::Pred
            | Term::IsZero
            | Term::Eq
            | Term::Fix(_) => 1,
            Term::Lam { body, .. } => 1 + body.size(),
            Term::Proj(_, e) | Term::Val(e) => 1 + e.size(),
            Term::App(a, b) | Term::Pair(a, b) | Term::Tensor(a, b) | Term::Choice(a, b) => {
                1 + a.size() + b.size()
            }
            Term::If(a, b, c) => 1 + a.size() + b.size() + c.size(),
            Term::LetPair {
                scrutinee, body, ..
            } => 1 + scrutinee.size() + body.size(),
            Term::Bind {
                computation, body, ..
            } => 1 + computation.size() + body.size(),
        }
    }

    /// Whether the term uses any monadic construct.
    pub fn is_monadic(&self) -> bool {
        match self {
            Term::Val(_) | Term::Bind { .. } | Term::Choice(..) => true,
            Term::Fix(ty) => type_is_monadic(ty),
            Term::Lam {
                binder_type, body, ..
            } => binder_type.as_ref().is_some_and(type_is_monadic) || body.is_monadic(),
            Term::Var(_)
            | Term::Nat(_)
            | Term::Bool(_)
            | Term::Succ
            | Term::Pred
            | Term::IsZero
            | Term::Eq => false,
            Term::Proj(_, e) => e.is_monadic(),
            Term::App(a, b) | Term::Pair(a, b) | Term::Tensor(a, b) => {
                a.is_monadic() || b.is_monadic()
            }
            Term::If(a, b, c) => a.is_monadic() || b.is_monadic() || c.is_monadic(),
            Term::LetPair {
                scrutinee, body, ..
            } => scrutinee.is_monadic() || body.is_monadic(),
        }
    }

    /// Whether the term mentions choice; the deterministic fragment excludes it.
    pub fn has_choice(&self) -> bool {
        match self {
            Term::Choice(..) => true,
            Term::Var(_)
            | Term::Nat(_)
            | Term::Bool(_)
            | Term::Succ
            | Term::Pred
            | Term::IsZero
            | Term::Eq
            | Term::Fix(_) => false,
            Term::Lam { body, .. } => body.has_choice(),
            Term::Proj(_, e) | Term::Val(e) => e.has_choice(),
            Term::App(a, b) | Term::Pair(a, b) | Term::Tensor(a, b) => {
                a.has_choice() || b.has_choice()
            }
            Term::If(a, b, c) => a.has_choice() || b.has_choice() || c.has_choice(),
            Term::LetPair {
                scrutinee, body, ..
            } => scrutinee.has_choice() || body.has_choice(),
            Term::Bind {
                computation, body, ..
            } => computation.has_choice() || body.has_choice(),
        }
    }

    /// Every identifier occurring in the term, bound or free.
    pub fn all_names(&self) -> BTreeSet<Ident> {
        let mut out = BTreeSet::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names(&self, out: &mut BTreeSet<Ident>) {
        match self {
            Term::Var(x) => {
                out.insert(x.clone());
            }
            Term::Nat(_)
            | Term::Bool(_)
            | Term::Succ
            | Term::Pred
            | Term::IsZero
            | Term::Eq
            | Term::Fix(_) => {}
            Term::Lam { binder, body, .. } => {
                out.insert(binder.clone());
                body.collect_names(out);
            }
            Term::Proj(_, e) | Term::Val(e) => e.collect_names(out),
            Term::App(a, b) | Term::Pair(a, b) | Term::Tensor(a, b) | Term::Choice(a, b) => {
                a.collect_names(out);
                b.collect_names(out);
            }
            Term::If(a, b, c) => {
                a.collect_names(out);
                b.collect_names(out);
                c.collect_names(out);
            }
            Term::LetPair {
                left,
                right,
                scrutinee,
                body,
            } => {
                out.insert(left.clone());
                out.insert(right.clone());
                scrutinee.collect_names(out);
                body.collect_names(out);
            }
            Term::Bind {
                binder,
                computation,
                body,
                ..
            } => {
                out.insert(binder.clone());
                computation.collect_names(out);
                body.collect_names(out);
            }
        }
    }
}

fn type_is_monadic(ty: &Type) -> bool {
    match ty {
        Type::Nat | Type::Bool => false,
        Type::Monad(_) => true,
        Type::With(a, b) | Type::Tensor(a, b) | Type::LinArrow(a, b) | Type::Arrow(a, b) => {
            type_is_monadic(a) || type_is_monadic(b)
        }
    }
}
