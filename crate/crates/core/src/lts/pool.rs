use std::collections::BTreeMap;

use crate::syntax::{parse_term, parse_type, Ident, Linearity, ProjIndex, Term, Type};
use crate::typing::{check, check_program, TypingEnv};

/// Names of the two linear variables of a tensor-action body.
pub const TENSOR_LEFT: &str = "z1";
pub const TENSOR_RIGHT: &str = "z2";

/// Finite sets of label terms used to instantiate `@e` and `(x)e` actions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArgumentPool {
    /// Nat literals `0 .. size_bound - 1` are in the default Nat pool.
    pub size_bound: usize,
    args: BTreeMap<Type, Vec<Term>>,
    bodies: BTreeMap<(Type, Type), Vec<Term>>,
}

impl Default for ArgumentPool {
    fn default() -> Self {
        ArgumentPool::new(2)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum PoolError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: `{term}` does not have type {expected}: {reason}")]
    IllTyped {
        line: usize,
        term: String,
        expected: String,
        reason: String,
    },
}

/// A tensor-action body paired with its result type.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TensorBody {
    pub body: Term,
    pub result: Type,
}

impl ArgumentPool {
    pub fn new(size_bound: usize) -> Self {
        ArgumentPool {
            size_bound: size_bound.max(1),
            args: BTreeMap::new(),
            bodies: BTreeMap::new(),
        }
    }

    /// Replace the candidates at `ty`. The term must be a closed program of
    /// that type.
    pub fn set_args(&mut self, ty: Type, terms: Vec<Term>) {
        self.args.insert(ty, terms);
    }

    pub fn set_tensor_bodies(&mut self, left: Type, right: Type, bodies: Vec<Term>) {
        self.bodies.insert((left, right), bodies);
    }

    /// Parse a pool file. Entries for a type replace the default candidates
    /// for that type.
    ///
    /// ```text
    /// type Nat : 0
    /// type Nat -> Nat : fn! n:Nat. succ n
    /// tensor Nat (x) Bool : if z2 then z1 else z1
    /// ```
    pub fn parse(text: &str, size_bound: usize) -> Result<Self, PoolError> {
        let mut pool = ArgumentPool::new(size_bound);
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let syntax = |message: String| PoolError::Syntax { line, message };
            let (kind, rest) = content
                .split_once(char::is_whitespace)
                .ok_or_else(|| syntax("expected `type` or `tensor`".into()))?;
            let (ty_text, term_text) = rest
                .split_once(':')
                .ok_or_else(|| syntax("expected `:`".into()))?;
            let ty = parse_type(ty_text.trim()).map_err(|e| syntax(e.to_string()))?;
            let term = parse_term(term_text.trim()).map_err(|e| syntax(e.to_string()))?;
            let ill = |reason: String| PoolError::IllTyped {
                line,
                term: term.to_string(),
                expected: ty.to_string(),
                reason,
            };
            match kind {
                "type" => {
                    let got = check_program(&term).map_err(|e| ill(e.to_string()))?;
                    if got != ty {
                        return Err(ill(format!("it has type {got}")));
                    }
                    pool.args.entry(ty).or_default().push(term);
                }
                "tensor" => {
                    let Type::Tensor(l, r) = &ty else {
                        return Err(syntax("a tensor entry needs a type `A (x) B`".into()));
                    };
                    tensor_body_type(&term, l, r).map_err(ill)?;
                    pool.bodies
                        .entry(((**l).clone(), (**r).clone()))
                        .or_default()
                        .push(term);
                }
                other => return Err(syntax(format!("unknown entry kind `{other}`"))),
            }
        }
        Ok(pool)
    }

    /// Closed candidate arguments of type `ty`, `Ω` last.
    pub fn args(&self, ty: &Type) -> Vec<Term> {
        if let Some(v) = self.args.get(ty) {
            return v.clone();
        }
        let mut out = self.proper_args(ty);
        out.push(Term::omega(ty.clone()));
        out
    }

    /// Candidates without `Ω`, used to build compound candidates.
    fn proper_args(&self, ty: &Type) -> Vec<Term> {
        if let Some(v) = self.args.get(ty) {
            return v
                .iter()
                .filter(|t| t.as_omega().is_none())
                .cloned()
                .collect();
        }
        match ty {
            Type::Nat => (0..self.size_bound as u64).map(Term::nat).collect(),
            Type::Bool => vec![Term::Bool(true), Term::Bool(false)],
            Type::With(a, b) => {
                let (xs, ys) = (self.args(a), self.args(b));
                xs.iter()
                    .flat_map(|x| ys.iter().map(move |y| Term::pair(x.clone(), y.clone())))
                    .collect()
            }
            Type::Tensor(a, b) => {
                let (xs, ys) = (self.args(a), self.args(b));
                xs.iter()
                    .flat_map(|x| ys.iter().map(move |y| Term::tensor(x.clone(), y.clone())))
                    .collect()
            }
            Type::Monad(a) => self.args(a).into_iter().map(Term::val).collect(),
            Type::Arrow(dom, cod) => {
                let z = Term::var("z");
                let mut out: Vec<Term> = self
                    .args(cod)
                    .into_iter()
                    .map(|r| Term::lam("z", (**dom).clone(), Linearity::Nonlinear, r))
                    .collect();
                if dom == cod {
                    out.push(Term::lam("z", (**dom).clone(), Linearity::Nonlinear, z));
                }
                out
            }
            Type::LinArrow(dom, cod) => {
                let mut out = Vec::new();
                if dom == cod {
                    out.push(Term::lam(
                        "z",
                        (**dom).clone(),
                        Linearity::Linear,
                        Term::var("z"),
                    ));
                }
                let results = self.proper_args(cod);
                for r in results.iter().take(2) {
                    if let Some(body) = self.consume(dom, Term::var("z"), r.clone(), cod, 0) {
                        out.push(Term::lam("z", (**dom).clone(), Linearity::Linear, body));
                    }
                }
                if let [r0, r1, ..] = results.as_slice() {
                    if let Some(body) =
                        self.discriminate(dom, Term::var("z"), r0.clone(), r1.clone())
                    {
                        out.push(Term::lam("z", (**dom).clone(), Linearity::Linear, body));
                    }
                }
                out
            }
        }
    }

    /// A term that uses `e: ty` exactly once and then returns `r: result`.
    fn consume(&self, ty: &Type, e: Term, r: Term, result: &Type, depth: usize) -> Option<Term> {
        match ty {
            Type::Nat => Some(Term::if_(Term::app(Term::IsZero, e), r.clone(), r)),
            Type::Bool => Some(Term::if_(e, r.clone(), r)),
            Type::With(a, _) => self.consume(a, Term::proj(ProjIndex::First, e), r, result, depth),
            Type::Tensor(a, b) => {
                let (l, rr) = (format!("p{depth}"), format!("q{depth}"));
                let inner = self.consume(b, Term::var(&rr), r, result, depth + 1)?;
                let body = self.consume(a, Term::var(&l), inner, result, depth + 1)?;
                Some(Term::letpair(l, rr, e, body))
            }
            Type::LinArrow(dom, cod) | Type::Arrow(dom, cod) => {
                let arg = self.proper_args(dom).into_iter().next()?;
                self.consume(cod, Term::app(e, arg), r, result, depth)
            }
            Type::Monad(a) => {
                if !matches!(result, Type::Monad(_)) {
                    return None;
                }
                let y = format!("m{depth}");
                let body = self.consume(a, Term::var(&y), r, result, depth + 1)?;
                Some(Term::bind(y, Linearity::Linear, e, body))
            }
        }
    }

    /// Like `consume`, but the result depends on a ground value.
    fn discriminate(&self, ty: &Type, e: Term, r0: Term, r1: Term) -> Option<Term> {
        match ty {
            Type::Nat => Some(Term::if_(Term::app(Term::IsZero, e), r0, r1)),
            Type::Bool => Some(Term::if_(e, r0, r1)),
            _ => None,
        }
    }

    /// Bodies for `(x)e` actions on a tensor of type `left (x) right`.
    pub fn tensor_bodies(&self, left: &Type, right: &Type) -> Vec<TensorBody> {
        let bodies = match self.bodies.get(&(left.clone(), right.clone())) {
            Some(v) => v.clone(),
            None => self.default_bodies(left, right),
        };
        bodies
            .into_iter()
            .filter_map(|body| {
                let result = tensor_body_type(&body, left, right).ok()?;
                Some(TensorBody { body, result })
            })
            .collect()
    }

    fn default_bodies(&self, left: &Type, right: &Type) -> Vec<Term> {
        let z1 = Term::var(TENSOR_LEFT);
        let z2 = Term::var(TENSOR_RIGHT);
        let mut out = vec![
            Term::tensor(z1.clone(), z2.clone()),
            Term::tensor(z2.clone(), z1.clone()),
        ];
        if let Some(b) = self.consume(right, z2.clone(), z1.clone(), left, 0) {
            out.push(b);
        }
        if let Some(b) = self.consume(left, z1.clone(), z2.clone(), right, 0) {
            out.push(b);
        }
        out.push(Term::val(Term::tensor(z1, z2)));
        out
    }
}

/// Result type of a tensor-action body, which must use exactly `z1` and `z2`.
pub fn tensor_body_type(body: &Term, left: &Type, right: &Type) -> Result<Type, String> {
    let (z1, z2) = (Ident::new(TENSOR_LEFT), Ident::new(TENSOR_RIGHT));
    let extra: Vec<_> = crate::syntax::free_vars(body)
        .into_iter()
        .filter(|x| *x != z1 && *x != z2)
        .collect();
    if !extra.is_empty() {
        return Err(format!("unexpected free variables {extra:?}"));
    }
    let env = TypingEnv::linear(z1.clone(), left.clone())
        .with_linear(z2.clone(), right.clone())
        .map_err(|e| e.to_string())?;
    let r = check(&env, body).map_err(|e| e.to_string())?;
    if r.consumed.len() != 2 {
        return Err(format!("must use both {z1} and {z2}"));
    }
    Ok(r.inferred)
}
