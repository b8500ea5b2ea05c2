use std::fmt;

/// Types of the linear language and its monadic extension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Nat,
    Bool,
    /// Additive product `τ & τ'`.
    With(Box<Type>, Box<Type>),
    /// Multiplicative product `τ (x) τ'`.
    Tensor(Box<Type>, Box<Type>),
    /// Linear function space `τ -o τ'`.
    LinArrow(Box<Type>, Box<Type>),
    /// Intuitionistic function space `τ -> τ'`.
    Arrow(Box<Type>, Box<Type>),
    /// Non-deterministic computations `T τ`.
    Monad(Box<Type>),
}

impl Type {
    pub fn with(a: Type, b: Type) -> Type {
        Type::With(Box::new(a), Box::new(b))
    }

    pub fn tensor(a: Type, b: Type) -> Type {
        Type::Tensor(Box::new(a), Box::new(b))
    }

    pub fn lin_arrow(a: Type, b: Type) -> Type {
        Type::LinArrow(Box::new(a), Box::new(b))
    }

    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }

    pub fn monad(a: Type) -> Type {
        Type::Monad(Box::new(a))
    }

    /// Domain and codomain of either arrow.
    pub fn as_function(&self) -> Option<(&Type, &Type)> {
        match self {
            Type::LinArrow(a, b) | Type::Arrow(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn is_function(&self) -> bool {
        self.as_function().is_some()
    }

    /// Number of constructors in the type tree.
    pub fn size(&self) -> usize {
        match self {
            Type::Nat | Type::Bool => 1,
            Type::Monad(a) => 1 + a.size(),
            Type::With(a, b) | Type::Tensor(a, b) | Type::LinArrow(a, b) | Type::Arrow(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }
}

// Precedence levels used by the printer:
//   0: arrows (right associative)
//   1: & and (x) (left associative)
//   2: T prefix
//   3: atoms
fn type_prec(ty: &Type) -> u8 {
    match ty {
        Type::LinArrow(..) | Type::Arrow(..) => 0,
        Type::With(..) | Type::Tensor(..) => 1,
        Type::Monad(_) => 2,
        Type::Nat | Type::Bool => 3,
    }
}

fn fmt_type(ty: &Type, min_prec: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let paren = type_prec(ty) < min_prec;
    if paren {
        f.write_str("(")?;
    }
    match ty {
        Type::Nat => f.write_str("Nat")?,
        Type::Bool => f.write_str("Bool")?,
        Type::With(a, b) => {
            fmt_type(a, 1, f)?;
            f.write_str(" & ")?;
            fmt_type(b, 2, f)?;
        }
        Type::Tensor(a, b) => {
            fmt_type(a, 1, f)?;
            f.write_str(" (x) ")?;
            fmt_type(b, 2, f)?;
        }
        Type::LinArrow(a, b) => {
            fmt_type(a, 1, f)?;
            f.write_str(" -o ")?;
            fmt_type(b, 0, f)?;
        }
        Type::Arrow(a, b) => {
            fmt_type(a, 1, f)?;
            f.write_str(" -> ")?;
            fmt_type(b, 0, f)?;
        }
        Type::Monad(a) => {
            f.write_str("T ")?;
            fmt_type(a, 2, f)?;
        }
    }
    if paren {
        f.write_str(")")?;
    }
    Ok(())
}

impl fmt::Display for Type {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_type(self, 0, f)
    }
}
