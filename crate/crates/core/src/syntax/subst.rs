//! Free variables, capture-avoiding simultaneous substitution and
//! alpha-equivalence.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{Ident, Term};

/// Free identifiers of `e`.
pub fn free_vars(e: &Term) -> BTreeSet<Ident> {
    let mut out = BTreeSet::new();
    let mut bound = Vec::new();
    collect_free(e, &mut bound, &mut out);
    out
}

fn collect_free(e: &Term, bound: &mut Vec<Ident>, out: &mut BTreeSet<Ident>) {
    match e {
        Term::Var(x) => {
            if !bound.contains(x) {
                out.insert(x.clone());
            }
        }
        Term::Nat(_)
        | Term::Bool(_)
        | Term::Succ
        | Term::Pred
        | Term::IsZero
        | Term::Eq
        | Term::Fix(_) => {}
        Term::Lam { binder, body, .. } => {
            bound.push(binder.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
        Term::Proj(_, a) | Term::Val(a) => collect_free(a, bound, out),
        Term::App(a, b) | Term::Pair(a, b) | Term::Tensor(a, b) | Term::Choice(a, b) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
        }
        Term::If(a, b, c) => {
            collect_free(a, bound, out);
            collect_free(b, bound, out);
            collect_free(c, bound, out);
        }
        Term::LetPair {
            left,
            right,
            scrutinee,
            body,
        } => {
            collect_free(scrutinee, bound, out);
            bound.push(left.clone());
            bound.push(right.clone());
            collect_free(body, bound, out);
            bound.truncate(bound.len() - 2);
        }
        Term::Bind {
            binder,
            computation,
            body,
            ..
        } => {
            collect_free(computation, bound, out);
            bound.push(binder.clone());
            collect_free(body, bound, out);
            bound.pop();
        }
    }
}

pub fn is_closed(e: &Term) -> bool {
    free_vars(e).is_empty()
}

/// Whether `x` occurs free in `e`.
pub fn occurs_free(x: &Ident, e: &Term) -> bool {
    match e {
        Term::Var(y) => x == y,
        Term::Nat(_)
        | Term::Bool(_)
        | Term::Succ
        | Term::Pred
        | Term::IsZero
        | Term::Eq
        | Term::Fix(_) => false,
        Term::Lam { binder, body, .. } => binder != x && occurs_free(x, body),
        Term::Proj(_, a) | Term::Val(a) => occurs_free(x, a),
        Term::App(a, b) | Term::Pair(a, b) | Term::Tensor(a, b) | Term::Choice(a, b) => {
            occurs_free(x, a) || occurs_free(x, b)
        }
        Term::If(a, b, c) => occurs_free(x, a) || occurs_free(x, b) || occurs_free(x, c),
        Term::LetPair {
            left,
            right,
            scrutinee,
            body,
        } => occurs_free(x, scrutinee) || (left != x && right != x && occurs_free(x, body)),
        Term::Bind {
            binder,
            computation,
            body,
            ..
        } => occurs_free(x, computation) || (binder != x && occurs_free(x, body)),
    }
}

/// A name based on `base` that is not in `avoid`. Trailing digits of
/// `base` are stripped first so repeated renaming does not grow names.
pub fn fresh_name(base: &Ident, avoid: &BTreeSet<Ident>) -> Ident {
    if !avoid.contains(base) {
        return base.clone();
    }
    let stem = base.as_str().trim_end_matches(|c: char| c.is_ascii_digit());
    let stem = if stem.is_empty() { "v" } else { stem };
    (1..)
        .map(|i| Ident::new(format!("{stem}{i}")))
        .find(|cand| !avoid.contains(cand))
        .expect("unbounded candidate supply")
}

/// Simultaneous capture-avoiding substitution `e[e1/x1, ..., en/xn]`.
///
/// Variables in `bindings` must be pairwise distinct; a later duplicate
/// silently wins.
pub fn substitute(e: &Term, bindings: &[(Ident, Term)]) -> Term {
    let map: BTreeMap<Ident, &Term> = bindings.iter().map(|(x, t)| (x.clone(), t)).collect();
    if map.is_empty() {
        return e.clone();
    }
    let mut ranges_fv = BTreeSet::new();
    for t in map.values() {
        ranges_fv.extend(free_vars(t));
    }
    subst_rec(e, &map, &ranges_fv)
}

/// `e[t/x]`.
pub fn substitute1(e: &Term, x: &Ident, t: &Term) -> Term {
    substitute(e, &[(x.clone(), t.clone())])
}

fn subst_rec(e: &Term, map: &BTreeMap<Ident, &Term>, ranges_fv: &BTreeSet<Ident>) -> Term {
    if map.is_empty() {
        return e.clone();
    }
    match e {
        Term::Var(x) => match map.get(x) {
            Some(t) => (*t).clone(),
            None => e.clone(),
        },
        Term::Nat(_)
        | Term::Bool(_)
        | Term::Succ
        | Term::Pred
        | Term::IsZero
        | Term::Eq
        | Term::Fix(_) => e.clone(),
        Term::Lam {
            binder,
            binder_type,
            linearity,
            body,
        } => {
            let (binders, body) = under_binders(std::slice::from_ref(binder), body, map, ranges_fv);
            Term::Lam {
                binder: binders.into_iter().next().expect("one binder"),
                binder_type: binder_type.clone(),
                linearity: *linearity,
                body: Box::new(body),
            }
        }
        Term::App(a, b) => Term::app(subst_rec(a, map, ranges_fv), subst_rec(b, map, ranges_fv)),
        Term::If(a, b, c) => Term::if_(
            subst_rec(a, map, ranges_fv),
            subst_rec(b, map, ranges_fv),
            subst_rec(c, map, ranges_fv),
        ),
        Term::Pair(a, b) => Term::pair(subst_rec(a, map, ranges_fv), subst_rec(b, map, ranges_fv)),
        Term::Proj(i, a) => Term::proj(*i, subst_rec(a, map, ranges_fv)),
        Term::Tensor(a, b) => {
            Term::tensor(subst_rec(a, map, ranges_fv), subst_rec(b, map, ranges_fv))
        }
        Term::LetPair {
            left,
            right,
            scrutinee,
            body,
        } => {
            let scrutinee = subst_rec(scrutinee, map, ranges_fv);
            let (binders, body) =
                under_binders(&[left.clone(), right.clone()], body, map, ranges_fv);
            let mut it = binders.into_iter();
            Term::LetPair {
                left: it.next().expect("left binder"),
                right: it.next().expect("right binder"),
                scrutinee: Box::new(scrutinee),
                body: Box::new(body),
            }
        }
        Term::Val(a) => Term::val(subst_rec(a, map, ranges_fv)),
        Term::Bind {
            binder,
            linearity,
            computation,
            body,
        } => {
            let computation = subst_rec(computation, map, ranges_fv);
            let (binders, body) = under_binders(std::slice::from_ref(binder), body, map, ranges_fv);
            Term::Bind {
                binder: binders.into_iter().next().expect("one binder"),
                linearity: *linearity,
                computation: Box::new(computation),
                body: Box::new(body),
            }
        }
        Term::Choice(a, b) => {
            Term::choice(subst_rec(a, map, ranges_fv), subst_rec(b, map, ranges_fv))
        }
    }
}

/// Push a substitution under a group of binders, renaming any binder that
/// would capture a free variable of the substituted terms.
fn under_binders(
    binders: &[Ident],
    body: &Term,
    map: &BTreeMap<Ident, &Term>,
    ranges_fv: &BTreeSet<Ident>,
) -> (Vec<Ident>, Term) {
    let mut inner: BTreeMap<Ident, &Term> = map.clone();
    for b in binders {
        inner.remove(b);
    }
    if inner.is_empty() {
        return (binders.to_vec(), body.clone());
    }
    let needs_rename = binders.iter().any(|b| ranges_fv.contains(b));
    if !needs_rename {
        return (binders.to_vec(), subst_rec(body, &inner, ranges_fv));
    }
    let mut avoid = ranges_fv.clone();
    avoid.extend(free_vars(body));
    avoid.extend(inner.keys().cloned());
    avoid.extend(binders.iter().cloned());
    let mut renamed = Vec::with_capacity(binders.len());
    let mut renames: Vec<(Ident, Term)> = Vec::new();
    for b in binders {
        if ranges_fv.contains(b) {
            let fresh = fresh_name(b, &avoid);
            avoid.insert(fresh.clone());
            renames.push((b.clone(), Term::Var(fresh.clone())));
            renamed.push(fresh);
        } else {
            renamed.push(b.clone());
        }
    }
    // Rename first, then substitute; the fresh names avoid every range.
    let body = substitute(body, &renames);
    (renamed, subst_rec(&body, &inner, ranges_fv))
}

/// Alpha-equivalence: equality up to consistent renaming of bound variables.
pub fn alpha_eq(e1: &Term, e2: &Term) -> bool {
    let mut env1 = Vec::new();
    let mut env2 = Vec::new();
    alpha_rec(e1, e2, &mut env1, &mut env2)
}

fn lookup_depth(env: &[Ident], x: &Ident) -> Option<usize> {
    env.iter().rposition(|y| y == x)
}

fn alpha_rec(a: &Term, b: &Term, ea: &mut Vec<Ident>, eb: &mut Vec<Ident>) -> bool {
    match (a, b) {
        (Term::Var(x), Term::Var(y)) => match (lookup_depth(ea, x), lookup_depth(eb, y)) {
            (Some(i), Some(j)) => i == j,
            (None, None) => x == y,
            _ => false,
        },
        (Term::Nat(m), Term::Nat(n)) => m == n,
        (Term::Bool(p), Term::Bool(q)) => p == q,
        (Term::Succ, Term::Succ)
        | (Term::Pred, Term::Pred)
        | (Term::IsZero, Term::IsZero)
        | (Term::Eq, Term::Eq) => true,
        (Term::Fix(s), Term::Fix(t)) => s == t,
        (
            Term::Lam {
                binder: x,
                binder_type: tx,
                linearity: lx,
                body: bx,
            },
            Term::Lam {
                binder: y,
                binder_type: ty,
                linearity: ly,
                body: by,
            },
        ) => {
            if tx != ty || lx != ly {
                return false;
            }
            ea.push(x.clone());
            eb.push(y.clone());
            let r = alpha_rec(bx, by, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        (Term::App(a1, a2), Term::App(b1, b2))
        | (Term::Pair(a1, a2), Term::Pair(b1, b2))
        | (Term::Tensor(a1, a2), Term::Tensor(b1, b2))
        | (Term::Choice(a1, a2), Term::Choice(b1, b2)) => {
            alpha_rec(a1, b1, ea, eb) && alpha_rec(a2, b2, ea, eb)
        }
        (Term::If(a1, a2, a3), Term::If(b1, b2, b3)) => {
            alpha_rec(a1, b1, ea, eb) && alpha_rec(a2, b2, ea, eb) && alpha_rec(a3, b3, ea, eb)
        }
        (Term::Proj(i, x), Term::Proj(j, y)) => i == j && alpha_rec(x, y, ea, eb),
        (Term::Val(x), Term::Val(y)) => alpha_rec(x, y, ea, eb),
        (
            Term::LetPair {
                left: l1,
                right: r1,
                scrutinee: s1,
                body: b1,
            },
            Term::LetPair {
                left: l2,
                right: r2,
                scrutinee: s2,
                body: b2,
            },
        ) => {
            if !alpha_rec(s1, s2, ea, eb) {
                return false;
            }
            ea.push(l1.clone());
            ea.push(r1.clone());
            eb.push(l2.clone());
            eb.push(r2.clone());
            let r = alpha_rec(b1, b2, ea, eb);
            ea.truncate(ea.len() - 2);
            eb.truncate(eb.len() - 2);
            r
        }
        (
            Term::Bind {
                binder: x,
                linearity: lx,
                computation: c1,
                body: b1,
            },
            Term::Bind {
                binder: y,
                linearity: ly,
                computation: c2,
                body: b2,
            },
        ) => {
            if lx != ly || !alpha_rec(c1, c2, ea, eb) {
                return false;
            }
            ea.push(x.clone());
            eb.push(y.clone());
            let r = alpha_rec(b1, b2, ea, eb);
            ea.pop();
            eb.pop();
            r
        }
        _ => false,
    }
}

impl Term {
    /// Representative of the alpha-equivalence class: every binder is renamed
    /// by its binding depth, so alpha-equivalent terms normalize to
    /// structurally equal terms. Free variables are left untouched.
    pub fn alpha_normalize(&self) -> Term {
        let free = free_vars(self);
        let mut names: HashMap<usize, Ident> = HashMap::new();
        let mut scope: Vec<(Ident, Ident)> = Vec::new();
        normalize_rec(self, &free, &mut names, &mut scope)
    }
}

fn depth_name(depth: usize, free: &BTreeSet<Ident>, names: &mut HashMap<usize, Ident>) -> Ident {
    names
        .entry(depth)
        .or_insert_with(|| {
            let mut cand = format!("v{depth}");
            while free.contains(&Ident::new(&cand)) {
                cand.push('_');
            }
            Ident::new(cand)
        })
        .clone()
}

fn normalize_rec(
    e: &Term,
    free: &BTreeSet<Ident>,
    names: &mut HashMap<usize, Ident>,
    scope: &mut Vec<(Ident, Ident)>,
) -> Term {
    let mut go = |t: &Term, scope: &mut Vec<(Ident, Ident)>| normalize_rec(t, free, names, scope);
    match e {
        Term::Var(x) => match scope.iter().rev().find(|(old, _)| old == x) {
            Some((_, new)) => Term::Var(new.clone()),
            None => e.clone(),
        },
        Term::Nat(_)
        | Term::Bool(_)
        | Term::Succ
        | Term::Pred
        | Term::IsZero
        | Term::Eq
        | Term::Fix(_) => e.clone(),
        Term::Lam {
            binder,
            binder_type,
            linearity,
            body,
        } => {
            let new = depth_name(scope.len(), free, names);
            scope.push((binder.clone(), new.clone()));
            let body = normalize_rec(body, free, names, scope);
            scope.pop();
            Term::Lam {
                binder: new,
                binder_type: binder_type.clone(),
                linearity: *linearity,
                body: Box::new(body),
            }
        }
        Term::App(a, b) => {
            let a = go(a, scope);
            Term::app(a, go(b, scope))
        }
        Term::If(a, b, c) => {
            let a = go(a, scope);
            let b = go(b, scope);
            Term::if_(a, b, go(c, scope))
        }
        Term::Pair(a, b) => {
            let a = go(a, scope);
            Term::pair(a, go(b, scope))
        }
        Term::Proj(i, a) => Term::proj(*i, go(a, scope)),
        Term::Tensor(a, b) => {
            let a = go(a, scope);
            Term::tensor(a, go(b, scope))
        }
        Term::Choice(a, b) => {
            let a = go(a, scope);
            Term::choice(a, go(b, scope))
        }
        Term::Val(a) => Term::val(go(a, scope)),
        Term::LetPair {
            left,
            right,
            scrutinee,
            body,
        } => {
            let scrutinee = normalize_rec(scrutinee, free, names, scope);
            let nl = depth_name(scope.len(), free, names);
            let nr = depth_name(scope.len() + 1, free, names);
            scope.push((left.clone(), nl.clone()));
            scope.push((right.clone(), nr.clone()));
            let body = normalize_rec(body, free, names, scope);
            scope.truncate(scope.len() - 2);
            Term::LetPair {
                left: nl,
                right: nr,
                scrutinee: Box::new(scrutinee),
                body: Box::new(body),
            }
        }
        Term::Bind {
            binder,
            linearity,
            computation,
            body,
        } => {
            let computation = normalize_rec(computation, free, names, scope);
            let new = depth_name(scope.len(), free, names);
            scope.push((binder.clone(), new.clone()));
            let body = normalize_rec(body, free, names, scope);
            scope.pop();
            Term::Bind {
                binder: new,
                linearity: *linearity,
                computation: Box::new(computation),
                body: Box::new(body),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, Linearity, Type};

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    #[test]
    fn substitute_variable_case() {
        let r = substitute(&t("x"), &[(Ident::new("x"), Term::nat(5))]);
        assert_eq!(r, Term::nat(5));
    }

    #[test]
    fn substitute_avoids_capture() {
        let r = substitute1(&t("fn! y:Nat. x"), &Ident::new("x"), &t("y"));
        let Term::Lam { binder, body, .. } = &r else {
            panic!("expected lambda, got {r:?}")
        };
        assert_ne!(binder.as_str(), "y");
        assert_eq!(**body, t("y"));
        assert!(alpha_eq(&r, &t("fn! z:Nat. y")));
    }

    #[test]
    fn substitute_beta_body() {
        let r = substitute1(&t("succ x"), &Ident::new("x"), &Term::nat(3));
        assert_eq!(r, t("succ 3"));
    }

    #[test]
    fn substitution_is_simultaneous() {
        let r = substitute(
            &t("<x, y>"),
            &[(Ident::new("x"), t("y")), (Ident::new("y"), t("x"))],
        );
        assert_eq!(r, t("<y, x>"));
    }

    #[test]
    fn shadowed_binders_are_untouched() {
        let e = t("fn x:Nat. x");
        assert_eq!(substitute1(&e, &Ident::new("x"), &Term::nat(1)), e);
        let e = t("letpair x y = z in x (x) y");
        let r = substitute1(&e, &Ident::new("x"), &Term::nat(1));
        assert_eq!(r, e);
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_eq(&t("fn x:Nat. x"), &t("fn y:Nat. y")));
        assert!(alpha_eq(
            &t("fn x:Nat. fn! y:Nat. x"),
            &t("fn y:Nat. fn! x:Nat. y")
        ));
        assert!(!alpha_eq(&t("fn x:Nat. x"), &t("fn x:Nat. succ x")));
        assert!(!alpha_eq(&t("fn x:Nat. y"), &t("fn y:Nat. y")));
        assert!(!alpha_eq(&t("fn x:Nat. x"), &t("fn! x:Nat. x")));
    }

    #[test]
    fn free_var_examples() {
        assert_eq!(free_vars(&t("fn x:Nat. x (x) y")), [Ident::new("y")].into());
        assert!(free_vars(&t("fix[Nat]")).is_empty());
        assert_eq!(
            free_vars(&t("letpair x y = z in x (x) y")),
            [Ident::new("z")].into()
        );
    }

    #[test]
    fn normalize_identifies_alpha_class() {
        let a = t("fn x:Nat. letpair p q = w in bind z = x in val(p)");
        let b = t("fn k:Nat. letpair r s = w in bind m = k in val(r)");
        assert_eq!(a.alpha_normalize(), b.alpha_normalize());
        assert!(alpha_eq(&a, &a.alpha_normalize()));
    }

    #[test]
    fn normalize_keeps_free_names_distinct() {
        let e = Term::lam(
            "a",
            Type::Nat,
            Linearity::Linear,
            Term::app(Term::var("v0"), Term::var("a")),
        );
        let n = e.alpha_normalize();
        assert!(alpha_eq(&e, &n));
        assert_eq!(free_vars(&n), [Ident::new("v0")].into());
    }
}
