use std::collections::HashSet;

use crate::lts::{apply_action, follow_trace, Trace};
use crate::reduction::step;
use crate::syntax::{Term, Type};

use super::lcr::classify_step;
use super::{ContextError, LinearContext};

enum Side {
    Open(LinearContext),
    Closed(Term, Type),
}

struct Replay<'a> {
    s: &'a Trace,
    fuel: usize,
    seen: HashSet<(Term, Term, usize)>,
}

impl Replay<'_> {
    fn rest(&self, i: usize) -> Trace {
        Trace(self.s.actions()[i..].to_vec())
    }

    fn takes(&self, e: &Term, ty: &Type, i: usize) -> Result<bool, ContextError> {
        Ok(!follow_trace(e, ty, &self.rest(i), self.fuel)?.is_empty())
    }

    fn run(
        &mut self,
        side: Side,
        e: &Term,
        i: usize,
        t: &mut Vec<crate::lts::Action>,
        budget: usize,
    ) -> Result<bool, ContextError> {
        let c = match side {
            Side::Closed(term, ty) => return self.takes(&term, &ty, i),
            Side::Open(c) => c,
        };
        if c.is_hole() {
            if self.takes(e, &c.holetype, i)? {
                t.extend(self.rest(i).0);
                return Ok(true);
            }
            return Ok(false);
        }
        if i == self.s.len() {
            return Ok(true);
        }
        if !self
            .seen
            .insert((c.body.alpha_normalize(), e.alpha_normalize(), i))
        {
            return Ok(false);
        }
        let plugged = c.plug_unchecked(e);
        let succs = step(&plugged);
        if succs.is_empty() {
            // Irreducible: only the context can act, the program is untouched.
            let Some((body, ty)) = apply_action(&c.body, &c.result, &self.s.actions()[i]) else {
                return Ok(false);
            };
            let next = LinearContext {
                body,
                hole: c.hole.clone(),
                holetype: c.holetype.clone(),
                result: ty,
            };
            return self.run(Side::Open(next), e, i + 1, t, self.fuel);
        }
        if budget == 0 {
            return Ok(false);
        }
        for s in succs {
            let form = classify_step(&c, e, &s.term)?;
            let labels: Vec<_> = form.interaction_labels().into_iter().cloned().collect();
            let (c2, e2) = form.residual(&c, e);
            let side = match c2 {
                Some(c2) => Side::Open(c2),
                None => Side::Closed(e2.clone(), c.result.clone()),
            };
            let mark = t.len();
            t.extend(labels);
            if self.run(side, &e2, i, t, budget - 1)? {
                return Ok(true);
            }
            t.truncate(mark);
        }
        Ok(false)
    }
}

/// The trace of `e` induced by one run of `c[e/x]` taking `s`: the labels
/// of interactions between `c` and `e`, followed by the rest of `s` once the
/// context has become the bare hole. `fuel` bounds each internal run.
pub fn context_trace(
    c: &LinearContext,
    e: &Term,
    s: &Trace,
    fuel: usize,
) -> Result<Trace, ContextError> {
    c.plug(e)?;
    let mut replay = Replay {
        s,
        fuel,
        seen: HashSet::new(),
    };
    let mut t = Vec::new();
    if replay.run(Side::Open(c.clone()), e, 0, &mut t, fuel)? {
        Ok(Trace(t))
    } else {
        Err(ContextError::TraceNotTaken(s.clone()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lts::parse_trace;
    use crate::syntax::{parse_term, parse_type, Ident};

    fn ctx(body: &str, ty: &str) -> LinearContext {
        LinearContext::new(
            parse_term(body).unwrap(),
            Ident::new("x"),
            parse_type(ty).unwrap(),
        )
        .unwrap()
    }

    fn t(s: &str) -> Term {
        parse_term(s).unwrap()
    }

    fn tr(s: &str) -> Trace {
        parse_trace(s).unwrap()
    }

    #[test]
    fn bare_hole_passes_the_trace_through() {
        let e = t("val(fn! x:Nat. val(0) |~| val(1))");
        let c = ctx("x", "T (Nat -> T Nat)");
        let s = tr("T, @(0), T, 1");
        assert_eq!(context_trace(&c, &e, &s, 100).unwrap(), s);
    }

    #[test]
    fn constant_consumed_by_context() {
        let c = ctx("pred x", "Nat");
        assert_eq!(context_trace(&c, &t("3"), &tr("2"), 100).unwrap(), tr("3"));
        assert_eq!(context_trace(&c, &t("3"), &tr("ε"), 100).unwrap(), tr("ε"));
        assert!(matches!(
            context_trace(&c, &t("3"), &tr("5"), 100),
            Err(ContextError::TraceNotTaken(_))
        ));
    }

    #[test]
    fn monadic_context_picks_a_witness() {
        let c = ctx("bind y = x in val(succ y)", "T Nat");
        let e = t("val(2) |~| val(3)");
        assert_eq!(context_trace(&c, &e, &tr("T, 3"), 100).unwrap(), tr("T, 2"));
        assert_eq!(context_trace(&c, &e, &tr("T, 4"), 100).unwrap(), tr("T, 3"));
        assert!(context_trace(&c, &e, &tr("T, 5"), 100).is_err());
    }
}
