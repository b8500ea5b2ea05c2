//! Random, type-directed generation of well-typed terms and linear contexts.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::enumerate::{Fragment, Universe};
use crate::contexts::LinearContext;
use crate::syntax::{Ident, Linearity, ProjIndex, Term, Type};

#[derive(Clone, Debug)]
pub struct GenConfig {
    pub seed: u64,
    pub max_size: usize,
    /// Types the generator may pick for targets and intermediate results.
    pub type_whitelist: Vec<Type>,
    pub fragment: Fragment,
    /// Probability of choosing a redex-shaped production.
    pub redex_bias: f64,
}

impl GenConfig {
    pub fn new(fragment: Fragment, seed: u64, max_size: usize) -> Self {
        GenConfig {
            seed,
            max_size: max_size.max(1),
            type_whitelist: Universe::for_fragment(fragment).types,
            fragment,
            redex_bias: 0.3,
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        GenConfig {
            seed,
            ..self.clone()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum GenError {
    #[error("no term of type {ty} fits in size {max_size}")]
    Unconstructible { ty: Type, max_size: usize },
    #[error("a linear {holetype} cannot be used up in a context of type {result}")]
    UnusableHole { holetype: Type, result: Type },
}

type Env = Vec<(Ident, Type)>;

/// Whether a linear variable of type `s` can be used up without a `bind`.
fn pure_consumable(s: &Type) -> bool {
    match s {
        Type::Nat | Type::Bool => true,
        Type::With(a, _) => pure_consumable(a),
        Type::Tensor(a, b) => pure_consumable(a) && pure_consumable(b),
        Type::LinArrow(_, c) | Type::Arrow(_, c) => pure_consumable(c),
        Type::Monad(_) => false,
    }
}

/// Whether a linear variable of type `s` can be used up in a term of type `t`.
fn absorbs(s: &Type, t: &Type) -> bool {
    pure_consumable(s) || matches!(t, Type::Monad(_))
}

/// Whether some closed term has type `t` (within this generator's means).
pub fn inhabited(t: &Type) -> bool {
    match t {
        Type::Nat | Type::Bool => true,
        Type::With(a, b) | Type::Tensor(a, b) => inhabited(a) && inhabited(b),
        Type::LinArrow(a, b) => inhabited(b) && absorbs(a, b) && domains_inhabited(a),
        Type::Arrow(_, b) | Type::Monad(b) => inhabited(b),
    }
}

/// Consuming a variable of type `s` applies it to closed arguments.
fn domains_inhabited(s: &Type) -> bool {
    match s {
        Type::LinArrow(d, c) | Type::Arrow(d, c) => inhabited(d) && domains_inhabited(c),
        Type::With(a, _) => domains_inhabited(a),
        Type::Tensor(a, b) => domains_inhabited(a) && domains_inhabited(b),
        Type::Monad(a) => domains_inhabited(a),
        _ => true,
    }
}

fn with(env: &Env, x: &Ident, t: &Type) -> Env {
    let mut e = env.clone();
    e.push((x.clone(), t.clone()));
    e
}

struct Gen<'a> {
    rng: ChaCha8Rng,
    cfg: &'a GenConfig,
    types: Vec<Type>,
    counter: usize,
}

#[derive(Clone, Copy)]
enum Prod {
    Lam,
    Pair,
    Tensor,
    Val,
    Choice,
    App,
    If,
    Proj,
    LetPair,
    Bind,
    Var,
}

#[derive(Clone, Copy)]
enum Redex {
    BetaLinear,
    BetaNonlinear,
    IfLiteral,
    ProjPair,
    LetPairTensor,
    Primitive,
    BindVal,
    Choice,
    Fix,
    Omega,
}

impl<'a> Gen<'a> {
    fn new(cfg: &'a GenConfig) -> Self {
        let monadic = cfg.fragment == Fragment::Nlpcf;
        let types = cfg
            .type_whitelist
            .iter()
            .filter(|t| inhabited(t) && (monadic || !has_monad(t)))
            .cloned()
            .collect();
        Gen {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
            cfg,
            types,
            counter: 0,
        }
    }

    fn monadic(&self) -> bool {
        self.cfg.fragment == Fragment::Nlpcf
    }

    fn fresh(&mut self) -> Ident {
        self.counter += 1;
        Ident::new(format!("v{}", self.counter - 1))
    }

    fn random_type(&mut self) -> Type {
        if self.types.is_empty() || self.rng.gen_bool(0.4) {
            return if self.rng.gen_bool(0.6) {
                Type::Nat
            } else {
                Type::Bool
            };
        }
        self.types.choose(&mut self.rng).expect("nonempty").clone()
    }

    fn literal(&mut self, t: &Type) -> Term {
        match t {
            Type::Bool => Term::Bool(self.rng.gen()),
            _ => Term::nat(self.rng.gen_range(0..3)),
        }
    }

    /// Random composition of `total` into `k` positive parts.
    fn split(&mut self, total: usize, k: usize) -> Vec<usize> {
        if total <= k {
            return vec![1; k];
        }
        let mut cuts: Vec<usize> = (0..k - 1).map(|_| self.rng.gen_range(1..total)).collect();
        cuts.sort_unstable();
        let mut out = Vec::with_capacity(k);
        let mut prev = 0;
        for c in cuts {
            out.push((c - prev).max(1));
            prev = c;
        }
        out.push((total - prev).max(1));
        out
    }

    /// Distribute linear variables among premises whose types can absorb them.
    fn partition(&mut self, delta: &Env, targets: &[&Type]) -> Option<Vec<Env>> {
        let mut parts = vec![Vec::new(); targets.len()];
        for (x, s) in delta {
            let ok: Vec<usize> = (0..targets.len())
                .filter(|&i| absorbs(s, targets[i]))
                .collect();
            let &i = ok.choose(&mut self.rng)?;
            parts[i].push((x.clone(), s.clone()));
        }
        Some(parts)
    }

    fn all_absorb(delta: &Env, t: &Type) -> bool {
        delta.iter().all(|(_, s)| absorbs(s, t))
    }

    /// Smallest closed inhabitant, up to the choice of literals.
    fn minimal(&mut self, t: &Type) -> Term {
        let nat_nat = Type::lin_arrow(Type::Nat, Type::Nat);
        match t {
            Type::Nat | Type::Bool => self.literal(t),
            _ if *t == nat_nat => {
                if self.rng.gen() {
                    Term::Succ
                } else {
                    Term::Pred
                }
            }
            _ if *t == Type::lin_arrow(Type::Nat, Type::Bool) => Term::IsZero,
            _ if *t == Type::lin_arrow(Type::Nat, Type::lin_arrow(Type::Nat, Type::Bool)) => {
                Term::Eq
            }
            Type::Arrow(f, r) if matches!(&**f, Type::Arrow(a, b) if a == b && b == r) => {
                Term::Fix((**r).clone())
            }
            Type::LinArrow(a, b) => {
                let x = self.fresh();
                let body = self.base(&Vec::new(), &vec![(x.clone(), (**a).clone())], b);
                Term::lam(x.as_str(), (**a).clone(), Linearity::Linear, body)
            }
            Type::Arrow(a, b) => {
                let x = self.fresh();
                Term::lam(
                    x.as_str(),
                    (**a).clone(),
                    Linearity::Nonlinear,
                    self.minimal(b),
                )
            }
            Type::With(a, b) => Term::pair(self.minimal(a), self.minimal(b)),
            Type::Tensor(a, b) => Term::tensor(self.minimal(a), self.minimal(b)),
            Type::Monad(a) => Term::val(self.minimal(a)),
        }
    }

    /// Use up `e: s` around `body: t`.
    fn consume(&mut self, e: Term, s: &Type, body: Term) -> Term {
        match s {
            Type::Nat => Term::if_(Term::app(Term::IsZero, e), body.clone(), body),
            Type::Bool => Term::if_(e, body.clone(), body),
            Type::With(a, _) => self.consume(Term::proj(ProjIndex::First, e), a, body),
            Type::Tensor(a, b) => {
                let (p, q) = (self.fresh(), self.fresh());
                let inner = self.consume(Term::Var(q.clone()), b, body);
                let inner = self.consume(Term::Var(p.clone()), a, inner);
                Term::letpair(p.as_str(), q.as_str(), e, inner)
            }
            Type::LinArrow(d, c) | Type::Arrow(d, c) => {
                let arg = self.minimal(d);
                self.consume(Term::app(e, arg), c, body)
            }
            Type::Monad(a) => {
                let y = self.fresh();
                let inner = self.consume(Term::Var(y.clone()), a, body);
                Term::bind(y.as_str(), Linearity::Linear, e, inner)
            }
        }
    }

    /// Smallest-effort term of type `t` using exactly `delta`.
    fn base(&mut self, gamma: &Env, delta: &Env, t: &Type) -> Term {
        let mut rest = delta.clone();
        let candidates: Vec<usize> = (0..rest.len()).filter(|&i| rest[i].1 == *t).collect();
        let mut core = match candidates.choose(&mut self.rng) {
            Some(&i) => Term::Var(rest.remove(i).0),
            None => {
                let vars: Vec<&Ident> = gamma
                    .iter()
                    .filter(|(_, s)| s == t)
                    .map(|(x, _)| x)
                    .collect();
                match vars.choose(&mut self.rng) {
                    Some(&x) if self.rng.gen_bool(0.5) => Term::Var(x.clone()),
                    _ => self.minimal(t),
                }
            }
        };
        for (x, s) in rest {
            core = self.consume(Term::Var(x), &s, core);
        }
        core
    }

    fn gen(&mut self, gamma: &Env, delta: &Env, t: &Type, budget: usize) -> Term {
        if budget <= 1 {
            return self.base(gamma, delta, t);
        }
        if self.rng.gen_bool(self.cfg.redex_bias) {
            let mut redexes = vec![
                Redex::BetaLinear,
                Redex::BetaNonlinear,
                Redex::IfLiteral,
                Redex::ProjPair,
                Redex::LetPairTensor,
                Redex::Primitive,
                Redex::BindVal,
                Redex::Choice,
                Redex::Fix,
                Redex::Omega,
            ];
            redexes.shuffle(&mut self.rng);
            for r in redexes {
                if let Some(e) = self.redex(r, gamma, delta, t, budget) {
                    return e;
                }
            }
        }
        let mut prods = vec![
            Prod::Lam,
            Prod::Pair,
            Prod::Tensor,
            Prod::Val,
            Prod::Choice,
            Prod::App,
            Prod::If,
            Prod::Proj,
            Prod::LetPair,
            Prod::Bind,
            Prod::Var,
        ];
        prods.shuffle(&mut self.rng);
        for p in prods {
            if let Some(e) = self.production(p, gamma, delta, t, budget) {
                return e;
            }
        }
        self.base(gamma, delta, t)
    }

    fn production(
        &mut self,
        p: Prod,
        gamma: &Env,
        delta: &Env,
        t: &Type,
        budget: usize,
    ) -> Option<Term> {
        let b = budget - 1;
        match (p, t) {
            (Prod::Lam, Type::LinArrow(a, r)) => {
                if !absorbs(a, r) || !Self::all_absorb(delta, r) {
                    return None;
                }
                let x = self.fresh();
                let body = self.gen(gamma, &with(delta, &x, a), r, b);
                Some(Term::lam(
                    x.as_str(),
                    (**a).clone(),
                    Linearity::Linear,
                    body,
                ))
            }
            (Prod::Lam, Type::Arrow(a, r)) => {
                if !Self::all_absorb(delta, r) {
                    return None;
                }
                let x = self.fresh();
                let body = self.gen(&with(gamma, &x, a), delta, r, b);
                Some(Term::lam(
                    x.as_str(),
                    (**a).clone(),
                    Linearity::Nonlinear,
                    body,
                ))
            }
            (Prod::Pair, Type::With(l, r)) => {
                if !Self::all_absorb(delta, l) || !Self::all_absorb(delta, r) {
                    return None;
                }
                let s = self.split(b, 2);
                Some(Term::pair(
                    self.gen(gamma, delta, l, s[0]),
                    self.gen(gamma, delta, r, s[1]),
                ))
            }
            (Prod::Tensor, Type::Tensor(l, r)) => {
                let parts = self.partition(delta, &[l, r])?;
                let s = self.split(b, 2);
                Some(Term::tensor(
                    self.gen(gamma, &parts[0], l, s[0]),
                    self.gen(gamma, &parts[1], r, s[1]),
                ))
            }
            (Prod::Val, Type::Monad(a)) if self.monadic() => {
                if !Self::all_absorb(delta, a) {
                    return None;
                }
                Some(Term::val(self.gen(gamma, delta, a, b)))
            }
            (Prod::Choice, Type::Monad(_)) if self.monadic() => {
                let s = self.split(b, 2);
                Some(Term::choice(
                    self.gen(gamma, delta, t, s[0]),
                    self.gen(gamma, delta, t, s[1]),
                ))
            }
            (Prod::App, _) => {
                let dom = self.random_type();
                let s = self.split(b, 2);
                if self.rng.gen_bool(0.5) {
                    if !absorbs(&dom, t) {
                        return None;
                    }
                    let phi = Type::lin_arrow(dom.clone(), t.clone());
                    let parts = self.partition(delta, &[&phi, &dom])?;
                    Some(Term::app(
                        self.gen(gamma, &parts[0], &phi, s[0]),
                        self.gen(gamma, &parts[1], &dom, s[1]),
                    ))
                } else {
                    let phi = Type::arrow(dom.clone(), t.clone());
                    if !Self::all_absorb(delta, &phi) {
                        return None;
                    }
                    Some(Term::app(
                        self.gen(gamma, delta, &phi, s[0]),
                        self.gen(gamma, &Vec::new(), &dom, s[1]),
                    ))
                }
            }
            (Prod::If, _) if budget >= 4 => {
                let parts = self.partition(delta, &[&Type::Bool, t])?;
                let s = self.split(b, 3);
                Some(Term::if_(
                    self.gen(gamma, &parts[0], &Type::Bool, s[0]),
                    self.gen(gamma, &parts[1], t, s[1]),
                    self.gen(gamma, &parts[1], t, s[2]),
                ))
            }
            (Prod::Proj, _) => {
                let other = self.random_type();
                let (w, i) = if self.rng.gen() {
                    (Type::with(t.clone(), other), ProjIndex::First)
                } else {
                    (Type::with(other, t.clone()), ProjIndex::Second)
                };
                if !Self::all_absorb(delta, &w) {
                    return None;
                }
                Some(Term::proj(i, self.gen(gamma, delta, &w, b)))
            }
            (Prod::LetPair, _) if budget >= 3 => {
                let (l, r) = (self.random_type(), self.random_type());
                if !absorbs(&l, t) || !absorbs(&r, t) {
                    return None;
                }
                let tt = Type::tensor(l.clone(), r.clone());
                let parts = self.partition(delta, &[&tt, t])?;
                let (p, q) = (self.fresh(), self.fresh());
                let s = self.split(b, 2);
                let scrut = self.gen(gamma, &parts[0], &tt, s[0]);
                let body = self.gen(gamma, &with(&with(&parts[1], &p, &l), &q, &r), t, s[1]);
                Some(Term::letpair(p.as_str(), q.as_str(), scrut, body))
            }
            (Prod::Bind, Type::Monad(_)) if self.monadic() && budget >= 3 => {
                let a = self.random_type();
                let comp_ty = Type::monad(a.clone());
                let y = self.fresh();
                let s = self.split(b, 2);
                if self.rng.gen_bool(0.5) {
                    let parts = self.partition(delta, &[&comp_ty, t])?;
                    let c = self.gen(gamma, &parts[0], &comp_ty, s[0]);
                    let body = self.gen(gamma, &with(&parts[1], &y, &a), t, s[1]);
                    Some(Term::bind(y.as_str(), Linearity::Linear, c, body))
                } else {
                    let c = self.gen(gamma, &Vec::new(), &comp_ty, s[0]);
                    let body = self.gen(&with(gamma, &y, &a), delta, t, s[1]);
                    Some(Term::bind(y.as_str(), Linearity::Nonlinear, c, body))
                }
            }
            (Prod::Var, _) if delta.is_empty() => {
                let vars: Vec<&Ident> = gamma
                    .iter()
                    .filter(|(_, s)| s == t)
                    .map(|(x, _)| x)
                    .collect();
                vars.choose(&mut self.rng).map(|&x| Term::Var(x.clone()))
            }
            _ => None,
        }
    }

    fn redex(
        &mut self,
        r: Redex,
        gamma: &Env,
        delta: &Env,
        t: &Type,
        budget: usize,
    ) -> Option<Term> {
        let b = budget.saturating_sub(2).max(1);
        match r {
            Redex::BetaLinear => {
                let a = self.random_type();
                if !absorbs(&a, t) {
                    return None;
                }
                let parts = self.partition(delta, &[t, &a])?;
                let x = self.fresh();
                let s = self.split(b, 2);
                let body = self.gen(gamma, &with(&parts[0], &x, &a), t, s[0]);
                let arg = self.gen(gamma, &parts[1], &a, s[1]);
                Some(Term::app(
                    Term::lam(x.as_str(), a, Linearity::Linear, body),
                    arg,
                ))
            }
            Redex::BetaNonlinear => {
                let a = self.random_type();
                let x = self.fresh();
                let s = self.split(b, 2);
                let body = self.gen(&with(gamma, &x, &a), delta, t, s[0]);
                let arg = self.gen(gamma, &Vec::new(), &a, s[1]);
                Some(Term::app(
                    Term::lam(x.as_str(), a, Linearity::Nonlinear, body),
                    arg,
                ))
            }
            Redex::IfLiteral => {
                let s = self.split(b, 2);
                let c = Term::Bool(self.rng.gen());
                Some(Term::if_(
                    c,
                    self.gen(gamma, delta, t, s[0]),
                    self.gen(gamma, delta, t, s[1]),
                ))
            }
            Redex::ProjPair => {
                let other = self.random_type();
                if !Self::all_absorb(delta, &other) {
                    return None;
                }
                let s = self.split(b, 2);
                let (mine, theirs) = (
                    self.gen(gamma, delta, t, s[0]),
                    self.gen(gamma, delta, &other, s[1]),
                );
                Some(if self.rng.gen() {
                    Term::proj(ProjIndex::First, Term::pair(mine, theirs))
                } else {
                    Term::proj(ProjIndex::Second, Term::pair(theirs, mine))
                })
            }
            Redex::LetPairTensor => {
                let (l, r) = (self.random_type(), self.random_type());
                if !absorbs(&l, t) || !absorbs(&r, t) {
                    return None;
                }
                let parts = self.partition(delta, &[&l, &r, t])?;
                let (p, q) = (self.fresh(), self.fresh());
                let s = self.split(b, 3);
                let scrut = Term::tensor(
                    self.gen(gamma, &parts[0], &l, s[0]),
                    self.gen(gamma, &parts[1], &r, s[1]),
                );
                let body = self.gen(gamma, &with(&with(&parts[2], &p, &l), &q, &r), t, s[2]);
                Some(Term::letpair(p.as_str(), q.as_str(), scrut, body))
            }
            Redex::Primitive => match t {
                Type::Nat => {
                    let f = if self.rng.gen() {
                        Term::Succ
                    } else {
                        Term::Pred
                    };
                    Some(Term::app(f, self.gen(gamma, delta, &Type::Nat, budget - 1)))
                }
                Type::Bool if self.rng.gen() => Some(Term::app(
                    Term::IsZero,
                    self.gen(gamma, delta, &Type::Nat, budget - 1),
                )),
                Type::Bool => {
                    let parts = self.partition(delta, &[&Type::Nat, &Type::Nat])?;
                    let s = self.split(b, 2);
                    let l = self.gen(gamma, &parts[0], &Type::Nat, s[0]);
                    let r = self.gen(gamma, &parts[1], &Type::Nat, s[1]);
                    Some(Term::apps(Term::Eq, [l, r]))
                }
                _ => None,
            },
            Redex::BindVal if self.monadic() && matches!(t, Type::Monad(_)) => {
                let a = self.random_type();
                let y = self.fresh();
                let s = self.split(b, 2);
                if self.rng.gen_bool(0.5) {
                    let parts = self.partition(delta, &[&Type::monad(a.clone()), t])?;
                    let v = self.gen(gamma, &parts[0], &a, s[0]);
                    let body = self.gen(gamma, &with(&parts[1], &y, &a), t, s[1]);
                    Some(Term::bind(
                        y.as_str(),
                        Linearity::Linear,
                        Term::val(v),
                        body,
                    ))
                } else {
                    let v = self.gen(gamma, &Vec::new(), &a, s[0]);
                    let body = self.gen(&with(gamma, &y, &a), delta, t, s[1]);
                    Some(Term::bind(
                        y.as_str(),
                        Linearity::Nonlinear,
                        Term::val(v),
                        body,
                    ))
                }
            }
            Redex::Choice => self.production(Prod::Choice, gamma, delta, t, budget),
            Redex::Fix if delta.is_empty() && self.rng.gen_bool(0.3) => {
                let f = self.fresh();
                let body = self.gen(
                    &with(gamma, &f, t),
                    &Vec::new(),
                    t,
                    budget.saturating_sub(3).max(1),
                );
                Some(Term::app(
                    Term::Fix(t.clone()),
                    Term::lam(f.as_str(), t.clone(), Linearity::Nonlinear, body),
                ))
            }
            Redex::Omega if delta.is_empty() && self.rng.gen_bool(0.2) => {
                Some(Term::omega(t.clone()))
            }
            _ => None,
        }
    }

    /// Term of type `t` over `gamma; delta` with size at most `max_size`.
    fn top(&mut self, gamma: &Env, delta: &Env, t: &Type) -> Result<Term, GenError> {
        let max = self.cfg.max_size;
        let unconstructible = || GenError::Unconstructible {
            ty: t.clone(),
            max_size: max,
        };
        if !inhabited(t) || !Self::all_absorb(delta, t) {
            return Err(unconstructible());
        }
        for _ in 0..32 {
            let budget = self.rng.gen_range(1..=max);
            let e = self.gen(gamma, delta, t, budget);
            if e.size() <= max {
                return Ok(e);
            }
        }
        let e = self.base(gamma, delta, t);
        if e.size() <= max {
            Ok(e)
        } else {
            Err(unconstructible())
        }
    }
}

fn has_monad(t: &Type) -> bool {
    match t {
        Type::Nat | Type::Bool => false,
        Type::Monad(_) => true,
        Type::With(a, b) | Type::Tensor(a, b) | Type::LinArrow(a, b) | Type::Arrow(a, b) => {
            has_monad(a) || has_monad(b)
        }
    }
}

/// A closed term of type `target`, deterministic in `cfg.seed`.
pub fn gen_typed_term(cfg: &GenConfig, target: &Type) -> Result<Term, GenError> {
    Gen::new(cfg).top(&Vec::new(), &Vec::new(), target)
}

/// A term over the given environments that uses every linear variable.
pub fn gen_open_term(
    cfg: &GenConfig,
    gamma: &[(Ident, Type)],
    delta: &[(Ident, Type)],
    target: &Type,
) -> Result<Term, GenError> {
    Gen::new(cfg).top(&gamma.to_vec(), &delta.to_vec(), target)
}

/// A random whitelisted type, from `cfg.seed`.
pub fn gen_type(cfg: &GenConfig) -> Type {
    Gen::new(cfg).random_type()
}

/// A linear context with hole `x: holetype` and a randomly chosen result.
pub fn gen_linear_context(cfg: &GenConfig, holetype: &Type) -> Result<LinearContext, GenError> {
    let mut g = Gen::new(cfg);
    let mut result = g.random_type();
    for _ in 0..8 {
        if absorbs(holetype, &result) {
            break;
        }
        result = g.random_type();
    }
    if !absorbs(holetype, &result) {
        result = holetype.clone();
    }
    gen_context_in(&mut g, holetype, &result)
}

/// A linear context with hole `x: holetype` and result type `result`.
pub fn gen_linear_context_at(
    cfg: &GenConfig,
    holetype: &Type,
    result: &Type,
) -> Result<LinearContext, GenError> {
    if !absorbs(holetype, result) {
        return Err(GenError::UnusableHole {
            holetype: holetype.clone(),
            result: result.clone(),
        });
    }
    gen_context_in(&mut Gen::new(cfg), holetype, result)
}

fn gen_context_in(
    g: &mut Gen<'_>,
    holetype: &Type,
    result: &Type,
) -> Result<LinearContext, GenError> {
    let x = Ident::new("x");
    let body = g.top(&Vec::new(), &vec![(x.clone(), holetype.clone())], result)?;
    Ok(LinearContext::new(body, x, holetype.clone()).expect("generated contexts are well-typed"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::{check, check_program, TypingEnv};

    #[test]
    fn size_one() {
        let cfg = GenConfig::new(Fragment::Lpcf, 3, 1);
        assert!(gen_typed_term(&cfg, &Type::Nat).unwrap().as_nat().is_some());
        let f = gen_typed_term(&cfg, &Type::lin_arrow(Type::Nat, Type::Nat)).unwrap();
        assert!(matches!(f, Term::Succ | Term::Pred));
        let big = Type::with(Type::Nat, Type::Nat);
        assert!(matches!(
            gen_typed_term(&cfg, &big),
            Err(GenError::Unconstructible { .. })
        ));
    }

    #[test]
    fn generated_terms_typecheck() {
        for fragment in [Fragment::Lpcf, Fragment::Nlpcf] {
            let base = GenConfig::new(fragment, 0, 12);
            for seed in 0..300 {
                let cfg = base.with_seed(seed);
                let ty = gen_type(&cfg);
                let e = gen_typed_term(&cfg, &ty).unwrap();
                assert!(e.size() <= 12);
                assert_eq!(check_program(&e), Ok(ty.clone()), "{e}");
                let c = match gen_linear_context(&cfg, &ty) {
                    Ok(c) => c,
                    Err(GenError::Unconstructible { .. }) => continue,
                    Err(e) => panic!("{e}"),
                };
                let env = TypingEnv::linear(c.hole.clone(), ty.clone());
                assert_eq!(check(&env, &c.body).unwrap().inferred, c.result);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let cfg = GenConfig::new(Fragment::Nlpcf, 42, 12);
        let t = Type::monad(Type::Nat);
        assert_eq!(gen_typed_term(&cfg, &t), gen_typed_term(&cfg, &t));
    }

    #[test]
    fn monadic_hole_needs_monadic_result() {
        let cfg = GenConfig::new(Fragment::Nlpcf, 1, 12);
        let err = gen_linear_context_at(&cfg, &Type::monad(Type::Nat), &Type::Nat);
        assert!(matches!(err, Err(GenError::UnusableHole { .. })));
        let c =
            gen_linear_context_at(&cfg, &Type::monad(Type::Nat), &Type::monad(Type::Bool)).unwrap();
        assert_eq!(c.result, Type::monad(Type::Bool));
    }
}
