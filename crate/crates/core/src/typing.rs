//! Dual-context type checking with algorithmic linear-resource tracking.
//!
//! Context splitting is realised by threading: subterms are checked left to
//! right, each against the linear variables not yet consumed. Constructs
//! whose premises share one linear context (pairs, the branches of `if`,
//! the arms of a choice) check each part from the same starting state and
//! require identical consumption.

use std::collections::{BTreeMap, BTreeSet};

use crate::syntax::{free_vars, Ident, Linearity, Term, Type};

/// `Γ; Δ`: non-linear and linear assumptions with disjoint domains.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct TypingEnv {
    gamma: BTreeMap<Ident, Type>,
    delta: BTreeMap<Ident, Type>,
}

impl TypingEnv {
    pub fn empty() -> Self {
        Self::default()
    }

    pub fn new(
        gamma: BTreeMap<Ident, Type>,
        delta: BTreeMap<Ident, Type>,
    ) -> Result<Self, TypeError> {
        if let Some(x) = gamma.keys().find(|x| delta.contains_key(*x)) {
            return Err(TypeError::EnvironmentOverlap(x.clone()));
        }
        Ok(TypingEnv { gamma, delta })
    }

    /// A single linear assumption `∅; x:τ`.
    pub fn linear(x: Ident, ty: Type) -> Self {
        TypingEnv {
            gamma: BTreeMap::new(),
            delta: [(x, ty)].into(),
        }
    }

    pub fn with_linear(mut self, x: Ident, ty: Type) -> Result<Self, TypeError> {
        if self.gamma.contains_key(&x) {
            return Err(TypeError::EnvironmentOverlap(x));
        }
        self.delta.insert(x, ty);
        Ok(self)
    }

    pub fn with_nonlinear(mut self, x: Ident, ty: Type) -> Result<Self, TypeError> {
        if self.delta.contains_key(&x) {
            return Err(TypeError::EnvironmentOverlap(x));
        }
        self.gamma.insert(x, ty);
        Ok(self)
    }

    pub fn gamma(&self) -> &BTreeMap<Ident, Type> {
        &self.gamma
    }

    pub fn delta(&self) -> &BTreeMap<Ident, Type> {
        &self.delta
    }

    /// Linearity of a variable in this environment, if bound.
    pub fn linearity_of(&self, x: &Ident) -> Option<Linearity> {
        if self.delta.contains_key(x) {
            Some(Linearity::Linear)
        } else if self.gamma.contains_key(x) {
            Some(Linearity::Nonlinear)
        } else {
            None
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckResult {
    pub inferred: Type,
    /// Linear variables of the input environment used by the term.
    pub consumed: BTreeSet<Ident>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LinearityIssue {
    UsedTwice,
    Unused,
    /// Used where the rules demand an empty linear context: the argument of
    /// a non-linear application or the computation of a non-linear bind.
    Unrestricted,
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum TypeError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(Ident),
    #[error("linearity violation on `{var}`: {issue:?}")]
    LinearityViolation { var: Ident, issue: LinearityIssue },
    #[error("type mismatch in {construct}: expected {expected}, found {found}")]
    TypeMismatch {
        construct: &'static str,
        expected: String,
        found: Type,
    },
    #[error("{construct} parts consume different linear variables: {left:?} vs {right:?}")]
    BranchConsumptionMismatch {
        construct: &'static str,
        left: Vec<Ident>,
        right: Vec<Ident>,
    },
    #[error("`{0}` is bound in both the linear and the non-linear environment")]
    EnvironmentOverlap(Ident),
    #[error("abstraction over `{0}` needs a type annotation here")]
    MissingAnnotation(Ident),
    #[error("the hole `{0}` is not used")]
    HoleUnused(Ident),
    #[error("linear context mentions free variable `{0}` besides the hole")]
    ExtraFreeVariable(Ident),
}

impl TypeError {
    pub fn kind(&self) -> &'static str {
        match self {
            TypeError::UnboundVariable(_) => "UnboundVariable",
            TypeError::LinearityViolation { .. } => "LinearityViolation",
            TypeError::TypeMismatch { .. } => "TypeMismatch",
            TypeError::BranchConsumptionMismatch { .. } => "BranchConsumptionMismatch",
            TypeError::EnvironmentOverlap(_) => "EnvironmentOverlap",
            TypeError::MissingAnnotation(_) => "MissingAnnotation",
            TypeError::HoleUnused(_) => "HoleUnused",
            TypeError::ExtraFreeVariable(_) => "ExtraFreeVariable",
        }
    }
}

type TResult<T> = Result<T, TypeError>;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Slot {
    Available,
    Consumed,
}

enum Binding {
    Nonlinear,
    Linear(usize),
}

struct Entry {
    name: Ident,
    ty: Type,
    binding: Binding,
}

struct Checker {
    scope: Vec<Entry>,
    slots: Vec<Slot>,
    /// Linear slots below this index may not be used (unrestricted region).
    barrier: usize,
}

fn mismatch<T>(construct: &'static str, expected: impl Into<String>, found: &Type) -> TResult<T> {
    Err(TypeError::TypeMismatch {
        construct,
        expected: expected.into(),
        found: found.clone(),
    })
}

fn nat_lin_bool() -> Type {
    Type::lin_arrow(Type::Nat, Type::lin_arrow(Type::Nat, Type::Bool))
}

/// Type of a constant, if `e` is one.
pub fn constant_type(e: &Term) -> Option<Type> {
    Some(match e {
        Term::Nat(_) => Type::Nat,
        Term::Bool(_) => Type::Bool,
        Term::Succ | Term::Pred => Type::lin_arrow(Type::Nat, Type::Nat),
        Term::IsZero => Type::lin_arrow(Type::Nat, Type::Bool),
        Term::Eq => nat_lin_bool(),
        Term::Fix(ty) => Type::arrow(Type::arrow(ty.clone(), ty.clone()), ty.clone()),
        _ => return None,
    })
}

impl Checker {
    fn lookup(&self, x: &Ident) -> Option<&Entry> {
        self.scope.iter().rev().find(|e| &e.name == x)
    }

    fn push_linear(&mut self, name: Ident, ty: Type) -> usize {
        let id = self.slots.len();
        self.slots.push(Slot::Available);
        self.scope.push(Entry {
            name,
            ty,
            binding: Binding::Linear(id),
        });
        id
    }

    fn push_nonlinear(&mut self, name: Ident, ty: Type) {
        self.scope.push(Entry {
            name,
            ty,
            binding: Binding::Nonlinear,
        });
    }

    fn pop_linear(&mut self, id: usize) -> TResult<()> {
        let entry = self.scope.pop().expect("scope underflow");
        debug_assert!(matches!(entry.binding, Binding::Linear(i) if i == id));
        let used = self.slots[id] == Slot::Consumed;
        self.slots.truncate(id);
        if used {
            Ok(())
        } else {
            Err(TypeError::LinearityViolation {
                var: entry.name,
                issue: LinearityIssue::Unused,
            })
        }
    }

    fn pop_nonlinear(&mut self) {
        self.scope.pop();
    }

    fn unrestricted<T>(&mut self, f: impl FnOnce(&mut Self) -> TResult<T>) -> TResult<T> {
        let saved = self.barrier;
        self.barrier = self.slots.len();
        let r = f(self);
        self.barrier = saved;
        r
    }

    /// Check two parts against the same starting linear state and demand
    /// identical consumption.
    fn shared(&mut self, construct: &'static str, a: &Term, b: &Term) -> TResult<(Type, Type)> {
        let start = self.slots.clone();
        let ta = self.infer(a)?;
        let after_a = std::mem::replace(&mut self.slots, start);
        let tb = self.infer(b)?;
        if after_a != self.slots {
            let names = |slots: &[Slot]| -> Vec<Ident> {
                self.scope
                    .iter()
                    .filter_map(|e| match e.binding {
                        Binding::Linear(i) if slots[i] == Slot::Consumed => Some(e.name.clone()),
                        _ => None,
                    })
                    .collect()
            };
            return Err(TypeError::BranchConsumptionMismatch {
                construct,
                left: names(&after_a),
                right: names(&self.slots),
            });
        }
        Ok((ta, tb))
    }

    fn infer(&mut self, e: &Term) -> TResult<Type> {
        if let Some(ty) = constant_type(e) {
            return Ok(ty);
        }
        match e {
            Term::Var(x) => {
                let entry = self
                    .lookup(x)
                    .ok_or_else(|| TypeError::UnboundVariable(x.clone()))?;
                let ty = entry.ty.clone();
                if let Binding::Linear(id) = entry.binding {
                    if id < self.barrier {
                        return Err(TypeError::LinearityViolation {
                            var: x.clone(),
                            issue: LinearityIssue::Unrestricted,
                        });
                    }
                    if self.slots[id] == Slot::Consumed {
                        return Err(TypeError::LinearityViolation {
                            var: x.clone(),
                            issue: LinearityIssue::UsedTwice,
                        });
                    }
                    self.slots[id] = Slot::Consumed;
                }
                Ok(ty)
            }
            Term::Lam {
                binder,
                binder_type,
                linearity,
                body,
            } => {
                let dom = binder_type
                    .clone()
                    .ok_or_else(|| TypeError::MissingAnnotation(binder.clone()))?;
                let cod = self.under_binder(binder, &dom, *linearity, body)?;
                Ok(match linearity {
                    Linearity::Linear => Type::lin_arrow(dom, cod),
                    Linearity::Nonlinear => Type::arrow(dom, cod),
                })
            }
            Term::App(f, a) => {
                if let Term::Lam {
                    binder,
                    binder_type: None,
                    linearity,
                    body,
                } = &**f
                {
                    // Head abstraction left by a bind redex: the argument fixes
                    // the binder type.
                    let dom = match linearity {
                        Linearity::Linear => self.infer(a)?,
                        Linearity::Nonlinear => self.unrestricted(|c| c.infer(a))?,
                    };
                    return self.under_binder(binder, &dom, *linearity, body);
                }
                let fty = self.infer(f)?;
                match fty {
                    Type::LinArrow(dom, cod) => {
                        let aty = self.infer(a)?;
                        if aty != *dom {
                            return mismatch("application argument", dom.to_string(), &aty);
                        }
                        Ok(*cod)
                    }
                    Type::Arrow(dom, cod) => {
                        let aty = self.unrestricted(|c| c.infer(a))?;
                        if aty != *dom {
                            return mismatch("application argument", dom.to_string(), &aty);
                        }
                        Ok(*cod)
                    }
                    other => mismatch("application", "a function type", &other),
                }
            }
            Term::If(c, a, b) => {
                let cty = self.infer(c)?;
                if cty != Type::Bool {
                    return mismatch("conditional", "Bool", &cty);
                }
                let (ta, tb) = self.shared("conditional", a, b)?;
                if ta != tb {
                    return mismatch("conditional branch", ta.to_string(), &tb);
                }
                Ok(ta)
            }
            Term::Pair(a, b) => {
                let (ta, tb) = self.shared("pair", a, b)?;
                Ok(Type::with(ta, tb))
            }
            Term::Proj(i, p) => match self.infer(p)? {
                Type::With(a, b) => Ok(if i.number() == 1 { *a } else { *b }),
                other => mismatch("projection", "a & type", &other),
            },
            Term::Tensor(a, b) => {
                let ta = self.infer(a)?;
                let tb = self.infer(b)?;
                Ok(Type::tensor(ta, tb))
            }
            Term::LetPair {
                left,
                right,
                scrutinee,
                body,
            } => {
                let sty = self.infer(scrutinee)?;
                let Type::Tensor(ta, tb) = sty else {
                    return mismatch("letpair", "a (x) type", &sty);
                };
                let il = self.push_linear(left.clone(), *ta);
                let ir = self.push_linear(right.clone(), *tb);
                let bty = self.infer(body);
                let right_ok = self.pop_linear(ir);
                let left_ok = self.pop_linear(il);
                let bty = bty?;
                right_ok?;
                left_ok?;
                Ok(bty)
            }
            Term::Val(inner) => Ok(Type::monad(self.infer(inner)?)),
            Term::Bind {
                binder,
                linearity,
                computation,
                body,
            } => {
                let cty = match linearity {
                    Linearity::Linear => self.infer(computation)?,
                    Linearity::Nonlinear => self.unrestricted(|c| c.infer(computation))?,
                };
                let Type::Monad(inner) = cty else {
                    return mismatch("bind computation", "a T type", &cty);
                };
                let bty = self.under_binder(binder, &inner, *linearity, body)?;
                if !matches!(bty, Type::Monad(_)) {
                    return mismatch("bind body", "a T type", &bty);
                }
                Ok(bty)
            }
            Term::Choice(a, b) => {
                let (ta, tb) = self.shared("choice", a, b)?;
                if !matches!(ta, Type::Monad(_)) {
                    return mismatch("choice", "a T type", &ta);
                }
                if ta != tb {
                    return mismatch("choice arm", ta.to_string(), &tb);
                }
                Ok(ta)
            }
            Term::Nat(_)
            | Term::Bool(_)
            | Term::Succ
            | Term::Pred
            | Term::IsZero
            | Term::Eq
            | Term::Fix(_) => unreachable!("constants handled above"),
        }
    }

    fn under_binder(
        &mut self,
        binder: &Ident,
        ty: &Type,
        linearity: Linearity,
        body: &Term,
    ) -> TResult<Type> {
        match linearity {
            Linearity::Linear => {
                let id = self.push_linear(binder.clone(), ty.clone());
                let r = self.infer(body);
                let used = self.pop_linear(id);
                let r = r?;
                used?;
                Ok(r)
            }
            Linearity::Nonlinear => {
                self.push_nonlinear(binder.clone(), ty.clone());
                let r = self.infer(body);
                self.pop_nonlinear();
                r
            }
        }
    }
}

/// Check `e` under `env`. Succeeds iff `Γ; Δ' ⊢ e : τ` is derivable where
/// `Δ'` is the reported `consumed` part of the linear environment.
pub fn check(env: &TypingEnv, e: &Term) -> Result<CheckResult, TypeError> {
    let mut c = Checker {
        scope: Vec::new(),
        slots: Vec::new(),
        barrier: 0,
    };
    for (x, ty) in &env.gamma {
        c.push_nonlinear(x.clone(), ty.clone());
    }
    let mut ids = Vec::new();
    for (x, ty) in &env.delta {
        ids.push((x.clone(), c.push_linear(x.clone(), ty.clone())));
    }
    let inferred = c.infer(e)?;
    let consumed = ids
        .into_iter()
        .filter(|(_, id)| c.slots[*id] == Slot::Consumed)
        .map(|(x, _)| x)
        .collect();
    Ok(CheckResult { inferred, consumed })
}

/// Type of a closed program: `∅; ∅ ⊢ e : τ`.
pub fn check_program(e: &Term) -> Result<Type, TypeError> {
    Ok(check(&TypingEnv::empty(), e)?.inferred)
}

/// Type of a linear context: `∅; hole:holetype ⊢ c : σ`, with the hole used
/// exactly once and no other free variable.
pub fn check_linear_context(c: &Term, hole: &Ident, holetype: &Type) -> Result<Type, TypeError> {
    if let Some(extra) = free_vars(c).into_iter().find(|x| x != hole) {
        return Err(TypeError::ExtraFreeVariable(extra));
    }
    let r = check(&TypingEnv::linear(hole.clone(), holetype.clone()), c)?;
    if !r.consumed.contains(hole) {
        return Err(TypeError::HoleUnused(hole.clone()));
    }
    Ok(r.inferred)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse_term;

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn ty(s: &str) -> Type {
        crate::syntax::parse_type(s).unwrap()
    }

    #[test]
    fn linear_variable_is_consumed() {
        let env = TypingEnv::linear(Ident::new("x"), Type::Nat);
        let r = check(&env, &t("x")).unwrap();
        assert_eq!(r.inferred, Type::Nat);
        assert_eq!(r.consumed, [Ident::new("x")].into());
    }

    #[test]
    fn fix_type() {
        assert_eq!(
            check_program(&t("fix[Nat]")).unwrap(),
            ty("(Nat -> Nat) -> Nat")
        );
    }

    #[test]
    fn choice_function_type() {
        // val: T(Nat -> T Nat), derived by hand from the val, fn!, choice rules.
        let r = check_program(&t("val(fn! x:Nat. val(0) |~| val(1))")).unwrap();
        assert_eq!(r, ty("T (Nat -> T Nat)"));
    }

    #[test]
    fn double_linear_use_is_rejected() {
        let env = TypingEnv::linear(Ident::new("x"), Type::Nat);
        let err = check(&env, &t("x (x) x")).unwrap_err();
        assert_eq!(
            err,
            TypeError::LinearityViolation {
                var: Ident::new("x"),
                issue: LinearityIssue::UsedTwice
            }
        );
    }

    #[test]
    fn program_examples() {
        assert_eq!(check_program(&t("succ")).unwrap(), ty("Nat -o Nat"));
        assert_eq!(check_program(&t("omega[Bool]")).unwrap(), Type::Bool);
        assert_eq!(
            check_program(&t("fn x:Nat. <x, x>")).unwrap(),
            ty("Nat -o Nat & Nat")
        );
        assert_eq!(check_program(&t("eq")).unwrap(), ty("Nat -o Nat -o Bool"));
    }

    #[test]
    fn linear_context_examples() {
        let x = Ident::new("x");
        assert_eq!(
            check_linear_context(&t("x"), &x, &Type::Nat).unwrap(),
            Type::Nat
        );
        assert_eq!(
            check_linear_context(&t("bind y = x in val(eq y 1)"), &x, &ty("T Nat")).unwrap(),
            ty("T Bool")
        );
        assert_eq!(
            check_linear_context(&t("<x, x>"), &x, &Type::Nat).unwrap(),
            ty("Nat & Nat")
        );
        assert_eq!(
            check_linear_context(&t("0"), &x, &Type::Nat).unwrap_err(),
            TypeError::HoleUnused(x.clone())
        );
        assert_eq!(
            check_linear_context(&t("x (x) y"), &x, &Type::Nat).unwrap_err(),
            TypeError::ExtraFreeVariable(Ident::new("y"))
        );
    }

    #[test]
    fn unused_linear_binder() {
        let err = check_program(&t("fn x:Nat. 0")).unwrap_err();
        assert_eq!(
            err,
            TypeError::LinearityViolation {
                var: Ident::new("x"),
                issue: LinearityIssue::Unused
            }
        );
        assert!(check_program(&t("fn! x:Nat. 0")).is_ok());
    }

    #[test]
    fn nonlinear_argument_must_not_use_linear_variables() {
        let env = TypingEnv::linear(Ident::new("x"), Type::Nat);
        let err = check(&env, &t("(fn! y:Nat. y) x")).unwrap_err();
        assert_eq!(
            err,
            TypeError::LinearityViolation {
                var: Ident::new("x"),
                issue: LinearityIssue::Unrestricted
            }
        );
        let err = check(&env, &t("bind! y = val(x) in val(y)")).unwrap_err();
        assert!(matches!(
            err,
            TypeError::LinearityViolation {
                issue: LinearityIssue::Unrestricted,
                ..
            }
        ));
    }

    #[test]
    fn branches_must_agree() {
        let env = TypingEnv::linear(Ident::new("x"), Type::Nat);
        let err = check(&env, &t("if true then x else 0")).unwrap_err();
        assert_eq!(err.kind(), "BranchConsumptionMismatch");
        let r = check(&env, &t("if iszero x then 1 else 0")).unwrap();
        assert_eq!(r.inferred, Type::Nat);
        let env = TypingEnv::linear(Ident::new("m"), ty("T Nat"));
        assert!(check(&env, &t("m |~| m")).is_ok());
        assert_eq!(
            check(&env, &t("m |~| val(0)")).unwrap_err().kind(),
            "BranchConsumptionMismatch"
        );
    }

    #[test]
    fn application_returns_codomain() {
        assert_eq!(check_program(&t("succ 1")).unwrap(), Type::Nat);
        assert_eq!(check_program(&t("iszero 1")).unwrap(), Type::Bool);
        assert_eq!(
            check_program(&t("(fn! f:Nat -> Nat. f 0) succ"))
                .unwrap_err()
                .kind(),
            "TypeMismatch"
        );
    }

    #[test]
    fn unannotated_head_lambda() {
        assert_eq!(check_program(&t("(fn x. val(x)) 3")).unwrap(), ty("T Nat"));
        assert_eq!(
            check_program(&t("(fn! x. val(<x, x>)) 3")).unwrap(),
            ty("T (Nat & Nat)")
        );
        assert_eq!(
            check_program(&t("fn x. x")).unwrap_err().kind(),
            "MissingAnnotation"
        );
    }

    #[test]
    fn environment_domains_are_disjoint() {
        let err = TypingEnv::linear(Ident::new("x"), Type::Nat)
            .with_nonlinear(Ident::new("x"), Type::Nat)
            .unwrap_err();
        assert_eq!(err, TypeError::EnvironmentOverlap(Ident::new("x")));
    }

    #[test]
    fn unconsumed_environment_variables_are_reported() {
        let env = TypingEnv::linear(Ident::new("x"), Type::Nat)
            .with_linear(Ident::new("y"), Type::Bool)
            .unwrap();
        let r = check(&env, &t("succ x")).unwrap();
        assert_eq!(r.consumed, [Ident::new("x")].into());
    }
}
