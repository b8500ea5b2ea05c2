//! Exhaustive enumeration of well-typed terms by exact size.

use std::collections::HashMap;
use std::sync::Arc;

use crate::syntax::{Ident, Linearity, ProjIndex, Term, Type};

/// Which language the generated terms belong to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Fragment {
    /// No monadic constructs.
    Lpcf,
    /// With `val`, `bind` and choice.
    Nlpcf,
}

/// The finite set of types an enumeration may use for targets, function
/// heads, projections, tensor eliminations and binds.
#[derive(Clone, Debug)]
pub struct Universe {
    pub types: Vec<Type>,
    pub fragment: Fragment,
    pub literals: Vec<u64>,
    /// Offer `omega[τ]` as a single node besides its expansion.
    pub omega_atoms: bool,
}

fn ty(s: &str) -> Type {
    crate::syntax::parse_type(s).expect("built-in type")
}

impl Universe {
    pub fn lpcf() -> Self {
        let types = [
            "Nat",
            "Bool",
            "Nat -o Nat",
            "Nat -> Nat",
            "Nat -o Bool",
            "Nat -o Nat -o Bool",
            "(Nat -> Nat) -> Nat",
            "Nat & Nat",
            "Nat (x) Nat",
            "Bool -o Bool",
            "(Nat -o Nat) -o Nat",
            "Bool & Nat",
            "Nat (x) Bool",
        ];
        Universe {
            types: types.map(ty).into(),
            fragment: Fragment::Lpcf,
            literals: vec![0, 1],
            omega_atoms: false,
        }
    }

    pub fn nlpcf() -> Self {
        let mut u = Universe::lpcf();
        u.fragment = Fragment::Nlpcf;
        u.types.extend(
            [
                "T Nat",
                "T Bool",
                "Nat -> T Nat",
                "Nat -o T Nat",
                "T Nat -o T Nat",
                "T (Nat -> T Nat)",
                "(T Nat -> T Nat) -> T Nat",
            ]
            .map(ty),
        );
        u
    }

    pub fn for_fragment(f: Fragment) -> Self {
        match f {
            Fragment::Lpcf => Universe::lpcf(),
            Fragment::Nlpcf => Universe::nlpcf(),
        }
    }

    pub fn with_omega_atoms(mut self) -> Self {
        self.omega_atoms = true;
        self
    }

    fn monadic(&self) -> bool {
        self.fragment == Fragment::Nlpcf
    }
}

type Env = Vec<(Ident, Type)>;
type Key = (Env, Env, Type, usize);

/// Memoised enumerator: `terms(Γ, Δ, τ, n)` lists every term of exactly
/// size `n` with `Γ; Δ ⊢ e : τ` that uses all of `Δ`. Binders are named
/// `v0, v1, ...`.
pub struct Enumerator {
    uni: Universe,
    memo: HashMap<Key, Arc<Vec<Term>>>,
}

fn index_of(name: &Ident) -> Option<usize> {
    name.as_str().strip_prefix('v')?.parse().ok()
}

fn fresh(gamma: &Env, delta: &Env) -> Ident {
    let next = gamma
        .iter()
        .chain(delta)
        .filter_map(|(x, _)| index_of(x))
        .max()
        .map_or(0, |i| i + 1);
    Ident::new(format!("v{next}"))
}

fn with(env: &Env, x: Ident, t: Type) -> Env {
    let mut e = env.clone();
    e.push((x, t));
    e.sort();
    e
}

fn splits(delta: &Env) -> Vec<(Env, Env)> {
    let k = delta.len();
    (0..1usize << k)
        .map(|mask| {
            let (mut l, mut r) = (Vec::new(), Vec::new());
            for (i, b) in delta.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    l.push(b.clone());
                } else {
                    r.push(b.clone());
                }
            }
            (l, r)
        })
        .collect()
}

impl Enumerator {
    pub fn new(uni: Universe) -> Self {
        Enumerator {
            uni,
            memo: HashMap::new(),
        }
    }

    pub fn universe(&self) -> &Universe {
        &self.uni
    }

    /// Closed terms of type `ty` and exact size `n`.
    pub fn closed(&mut self, ty: &Type, n: usize) -> Arc<Vec<Term>> {
        self.terms(&Vec::new(), &Vec::new(), ty, n)
    }

    /// Terms with the single linear free variable `hole: holetype`.
    pub fn contexts(
        &mut self,
        hole: &Ident,
        holetype: &Type,
        result: &Type,
        n: usize,
    ) -> Arc<Vec<Term>> {
        self.terms(
            &Vec::new(),
            &vec![(hole.clone(), holetype.clone())],
            result,
            n,
        )
    }

    pub fn terms(&mut self, gamma: &Env, delta: &Env, ty: &Type, n: usize) -> Arc<Vec<Term>> {
        if n == 0 {
            return Arc::new(Vec::new());
        }
        let key = (gamma.clone(), delta.clone(), ty.clone(), n);
        if let Some(v) = self.memo.get(&key) {
            return v.clone();
        }
        let out = Arc::new(self.produce(gamma, delta, ty, n));
        self.memo.insert(key, out.clone());
        out
    }

    fn function_types_into(&self, cod: &Type) -> Vec<Type> {
        self.uni
            .types
            .iter()
            .filter(|t| t.as_function().is_some_and(|(_, c)| c == cod))
            .cloned()
            .collect()
    }

    fn produce(&mut self, gamma: &Env, delta: &Env, ty: &Type, n: usize) -> Vec<Term> {
        let mut out = Vec::new();
        if n == 1 {
            self.atoms(gamma, delta, ty, &mut out);
            return out;
        }
        let empty: Env = Vec::new();

        // introductions
        match ty {
            Type::LinArrow(dom, cod) => {
                let x = fresh(gamma, delta);
                for b in self
                    .terms(gamma, &with(delta, x.clone(), (**dom).clone()), cod, n - 1)
                    .iter()
                {
                    out.push(Term::lam(
                        x.as_str(),
                        (**dom).clone(),
                        Linearity::Linear,
                        b.clone(),
                    ));
                }
            }
            Type::Arrow(dom, cod) => {
                let x = fresh(gamma, delta);
                for b in self
                    .terms(&with(gamma, x.clone(), (**dom).clone()), delta, cod, n - 1)
                    .iter()
                {
                    out.push(Term::lam(
                        x.as_str(),
                        (**dom).clone(),
                        Linearity::Nonlinear,
                        b.clone(),
                    ));
                }
            }
            Type::With(a, b) => {
                for k in 1..n - 1 {
                    let ls = self.terms(gamma, delta, a, k);
                    let rs = self.terms(gamma, delta, b, n - 1 - k);
                    for l in ls.iter() {
                        for r in rs.iter() {
                            out.push(Term::pair(l.clone(), r.clone()));
                        }
                    }
                }
            }
            Type::Tensor(a, b) => {
                for (d1, d2) in splits(delta) {
                    for k in 1..n - 1 {
                        let ls = self.terms(gamma, &d1, a, k);
                        let rs = self.terms(gamma, &d2, b, n - 1 - k);
                        for l in ls.iter() {
                            for r in rs.iter() {
                                out.push(Term::tensor(l.clone(), r.clone()));
                            }
                        }
                    }
                }
            }
            Type::Monad(a) if self.uni.monadic() => {
                for v in self.terms(gamma, delta, a, n - 1).iter() {
                    out.push(Term::val(v.clone()));
                }
                for k in 1..n - 1 {
                    let ls = self.terms(gamma, delta, ty, k);
                    let rs = self.terms(gamma, delta, ty, n - 1 - k);
                    for l in ls.iter() {
                        for r in rs.iter() {
                            out.push(Term::choice(l.clone(), r.clone()));
                        }
                    }
                }
                let binds: Vec<Type> = self
                    .uni
                    .types
                    .iter()
                    .filter_map(|t| match t {
                        Type::Monad(inner) => Some((**inner).clone()),
                        _ => None,
                    })
                    .collect();
                let y = fresh(gamma, delta);
                for inner in binds {
                    let comp_ty = Type::monad(inner.clone());
                    for k in 1..n - 1 {
                        let m = n - 1 - k;
                        for (d1, d2) in splits(delta) {
                            let cs = self.terms(gamma, &d1, &comp_ty, k);
                            if cs.is_empty() {
                                continue;
                            }
                            let bs = self.terms(gamma, &with(&d2, y.clone(), inner.clone()), ty, m);
                            for c in cs.iter() {
                                for b in bs.iter() {
                                    out.push(Term::bind(
                                        y.as_str(),
                                        Linearity::Linear,
                                        c.clone(),
                                        b.clone(),
                                    ));
                                }
                            }
                        }
                        let cs = self.terms(gamma, &empty, &comp_ty, k);
                        if cs.is_empty() {
                            continue;
                        }
                        let bs = self.terms(&with(gamma, y.clone(), inner.clone()), delta, ty, m);
                        for c in cs.iter() {
                            for b in bs.iter() {
                                out.push(Term::bind(
                                    y.as_str(),
                                    Linearity::Nonlinear,
                                    c.clone(),
                                    b.clone(),
                                ));
                            }
                        }
                    }
                }
            }
            _ => {}
        }

        // eliminations
        for phi in self.function_types_into(ty) {
            let (dom, _) = phi.as_function().expect("function type");
            let dom = dom.clone();
            let linear = matches!(phi, Type::LinArrow(..));
            for k in 1..n - 1 {
                let m = n - 1 - k;
                if linear {
                    for (d1, d2) in splits(delta) {
                        let fs = self.terms(gamma, &d1, &phi, k);
                        if fs.is_empty() {
                            continue;
                        }
                        let args = self.terms(gamma, &d2, &dom, m);
                        for f in fs.iter() {
                            for a in args.iter() {
                                out.push(Term::app(f.clone(), a.clone()));
                            }
                        }
                    }
                } else {
                    let omega_atoms = self.uni.omega_atoms;
                    let fs = self.terms(gamma, delta, &phi, k);
                    if fs.is_empty() {
                        continue;
                    }
                    let args = self.terms(gamma, &empty, &dom, m);
                    for f in fs.iter() {
                        for a in args.iter() {
                            let t = Term::app(f.clone(), a.clone());
                            if !(omega_atoms && t.as_omega().is_some()) {
                                out.push(t);
                            }
                        }
                    }
                }
            }
        }
        if n >= 4 {
            for (d1, d2) in splits(delta) {
                for k in 1..n - 2 {
                    let cs = self.terms(gamma, &d1, &Type::Bool, k);
                    if cs.is_empty() {
                        continue;
                    }
                    for a in 1..n - 1 - k {
                        let b = n - 1 - k - a;
                        let ts = self.terms(gamma, &d2, ty, a);
                        let es = self.terms(gamma, &d2, ty, b);
                        for c in cs.iter() {
                            for t in ts.iter() {
                                for e in es.iter() {
                                    out.push(Term::if_(c.clone(), t.clone(), e.clone()));
                                }
                            }
                        }
                    }
                }
            }
        }
        let products: Vec<Type> = self
            .uni
            .types
            .iter()
            .filter(|t| matches!(t, Type::With(..)))
            .cloned()
            .collect();
        for w in &products {
            let Type::With(a, b) = w else { unreachable!() };
            for (i, comp) in [(ProjIndex::First, a), (ProjIndex::Second, b)] {
                if **comp == *ty {
                    for p in self.terms(gamma, delta, w, n - 1).iter() {
                        out.push(Term::proj(i, p.clone()));
                    }
                }
            }
        }
        let tensors: Vec<Type> = self
            .uni
            .types
            .iter()
            .filter(|t| matches!(t, Type::Tensor(..)))
            .cloned()
            .collect();
        if n >= 3 {
            let p = fresh(gamma, delta);
            let q = Ident::new(format!("v{}", index_of(&p).expect("v-name") + 1));
            for tt in &tensors {
                let Type::Tensor(a, b) = tt else {
                    unreachable!()
                };
                for (d1, d2) in splits(delta) {
                    for k in 1..n - 1 {
                        let ss = self.terms(gamma, &d1, tt, k);
                        if ss.is_empty() {
                            continue;
                        }
                        let inner = with(
                            &with(&d2, p.clone(), (**a).clone()),
                            q.clone(),
                            (**b).clone(),
                        );
                        let bs = self.terms(gamma, &inner, ty, n - 1 - k);
                        for s in ss.iter() {
                            for body in bs.iter() {
                                out.push(Term::letpair(
                                    p.as_str(),
                                    q.as_str(),
                                    s.clone(),
                                    body.clone(),
                                ));
                            }
                        }
                    }
                }
            }
        }
        out
    }

    fn atoms(&self, gamma: &Env, delta: &Env, ty: &Type, out: &mut Vec<Term>) {
        match delta.as_slice() {
            [(x, t)] if t == ty => out.push(Term::Var(x.clone())),
            [] => {}
            _ => return,
        }
        if !delta.is_empty() {
            return;
        }
        for (x, t) in gamma {
            if t == ty {
                out.push(Term::Var(x.clone()));
            }
        }
        match ty {
            Type::Nat => out.extend(self.uni.literals.iter().map(|&n| Term::nat(n))),
            Type::Bool => out.extend([Term::Bool(true), Term::Bool(false)]),
            _ => {}
        }
        let nat_nat = Type::lin_arrow(Type::Nat, Type::Nat);
        if *ty == nat_nat {
            out.extend([Term::Succ, Term::Pred]);
        }
        if *ty == Type::lin_arrow(Type::Nat, Type::Bool) {
            out.push(Term::IsZero);
        }
        if *ty == Type::lin_arrow(Type::Nat, Type::lin_arrow(Type::Nat, Type::Bool)) {
            out.push(Term::Eq);
        }
        if let Type::Arrow(f, r) = ty {
            if let Type::Arrow(a, b) = &**f {
                if a == b && b == r {
                    out.push(Term::Fix((**r).clone()));
                }
            }
        }
        if self.uni.omega_atoms
            && self.uni.types.contains(&Type::arrow(
                Type::arrow(ty.clone(), ty.clone()),
                ty.clone(),
            ))
        {
            out.push(Term::omega(ty.clone()));
        }
    }
}

/// Size used by enumerations with omega atoms: `omega[τ]` counts as one node.
pub fn enum_size(t: &Term, omega_atoms: bool) -> usize {
    if omega_atoms && t.as_omega().is_some() {
        return 1;
    }
    match t {
        Term::Lam { body, .. } => 1 + enum_size(body, omega_atoms),
        Term::Proj(_, e) | Term::Val(e) => 1 + enum_size(e, omega_atoms),
        Term::App(a, b) | Term::Pair(a, b) | Term::Tensor(a, b) | Term::Choice(a, b) => {
            1 + enum_size(a, omega_atoms) + enum_size(b, omega_atoms)
        }
        Term::If(a, b, c) => {
            1 + enum_size(a, omega_atoms) + enum_size(b, omega_atoms) + enum_size(c, omega_atoms)
        }
        Term::LetPair {
            scrutinee, body, ..
        } => 1 + enum_size(scrutinee, omega_atoms) + enum_size(body, omega_atoms),
        Term::Bind {
            computation, body, ..
        } => 1 + enum_size(computation, omega_atoms) + enum_size(body, omega_atoms),
        _ => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::typing::{check, check_program, TypingEnv};

    #[test]
    fn small_sizes() {
        let mut en = Enumerator::new(Universe::lpcf());
        assert_eq!(en.closed(&Type::Nat, 1).len(), 2);
        let shown: Vec<String> = en
            .closed(&Type::Nat, 2)
            .iter()
            .map(|t| t.to_string())
            .collect();
        assert!(shown.is_empty(), "{shown:?}");
        let three: Vec<String> = en
            .closed(&Type::Nat, 3)
            .iter()
            .map(|t| t.to_string())
            .collect();
        assert!(three.contains(&"succ 0".to_string()));
        assert!(!three.contains(&"proj1 <0, 1>".to_string()));
        assert!(en
            .closed(&Type::Nat, 4)
            .iter()
            .any(|t| t.to_string() == "proj1 <0, 1>"));
    }

    #[test]
    fn everything_enumerated_typechecks() {
        for uni in [Universe::lpcf(), Universe::nlpcf()] {
            let types = uni.types.clone();
            let mut en = Enumerator::new(uni);
            for ty in &types {
                for n in 1..=5 {
                    for t in en.closed(ty, n).iter() {
                        assert_eq!(check_program(t).as_ref(), Ok(ty), "{t}");
                        assert_eq!(t.size(), n, "{t}");
                    }
                }
            }
            let x = Ident::new("x");
            for n in 1..=5 {
                for t in en.contexts(&x, &Type::Nat, &Type::Nat, n).iter() {
                    let r = check(&TypingEnv::linear(x.clone(), Type::Nat), t).unwrap();
                    assert_eq!(r.consumed.len(), 1, "{t}");
                }
            }
        }
    }

    #[test]
    fn omega_atoms_are_single_nodes() {
        let mut en = Enumerator::new(Universe::lpcf().with_omega_atoms());
        let atoms = en.closed(&Type::Nat, 1);
        assert!(atoms.iter().any(|t| t.as_omega().is_some()));
        for n in 1..=4 {
            for t in en.closed(&Type::Nat, n).iter() {
                assert_eq!(enum_size(t, true), n);
            }
        }
    }
}
