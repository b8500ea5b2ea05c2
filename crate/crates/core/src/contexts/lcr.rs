use std::fmt;

use crate::lts::{apply_action, Action};
use crate::reduction::step;
use crate::syntax::{alpha_eq, substitute1, Term};

use super::transitions::{context_transitions, ContextTransition};
use super::{ContextError, LinearContext};

/// What remains on the context side after an interaction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NextContext {
    Open(LinearContext),
    /// The context consumed the program (constant interactions).
    Closed(Term),
}

/// How one reduction step of `c[e/x]` arises.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LcrForm {
    /// `c ⇝ c'` on its own.
    ContextStep(LinearContext),
    /// `c` is an evaluation context and `e ⇝ e'`.
    ProgramStep(Term),
    /// `c →α c'` and `e →α e'` meet. When the program is a primitive
    /// function, `c'[e'/x']` is the plugged term itself and the actual step
    /// is classified in `continued`.
    Interaction {
        action: Action,
        next_context: NextContext,
        next_program: Term,
        continued: Option<Box<LcrForm>>,
    },
}

impl LcrForm {
    pub fn kind(&self) -> &'static str {
        match self {
            LcrForm::ContextStep(_) => "context-step",
            LcrForm::ProgramStep(_) => "program-step",
            LcrForm::Interaction { .. } => "interaction",
        }
    }

    /// Labels of the interaction chain, outermost first.
    pub fn interaction_labels(&self) -> Vec<&Action> {
        let mut out = Vec::new();
        let mut cur = self;
        while let LcrForm::Interaction {
            action, continued, ..
        } = cur
        {
            out.push(action);
            match continued {
                Some(next) => cur = next,
                None => break,
            }
        }
        out
    }

    /// The context and program after the step, following any chain of
    /// interactions. `None` for the context when it was consumed.
    pub fn residual(&self, c: &LinearContext, e: &Term) -> (Option<LinearContext>, Term) {
        match self {
            LcrForm::ContextStep(c2) => (Some(c2.clone()), e.clone()),
            LcrForm::ProgramStep(e2) => (Some(c.clone()), e2.clone()),
            LcrForm::Interaction {
                next_context,
                next_program,
                continued,
                ..
            } => match (next_context, continued) {
                (NextContext::Closed(t), _) => (None, t.clone()),
                (NextContext::Open(c2), None) => (Some(c2.clone()), next_program.clone()),
                (NextContext::Open(c2), Some(k)) => k.residual(c2, next_program),
            },
        }
    }
}

impl fmt::Display for LcrForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LcrForm::ContextStep(c) => write!(f, "context-step {}", c.body),
            LcrForm::ProgramStep(e) => write!(f, "program-step {e}"),
            LcrForm::Interaction {
                action,
                next_context,
                next_program,
                continued,
            } => {
                write!(f, "interaction {action}: ")?;
                match next_context {
                    NextContext::Open(c) => write!(f, "context {} ", c.body)?,
                    NextContext::Closed(t) => write!(f, "closed {t} ")?,
                }
                write!(f, "program {next_program}")?;
                if let Some(k) = continued {
                    write!(f, "; then {k}")?;
                }
                Ok(())
            }
        }
    }
}

/// Classify the step `c[e/x] ⇝ successor`.
pub fn classify_step(
    c: &LinearContext,
    e: &Term,
    successor: &Term,
) -> Result<LcrForm, ContextError> {
    let unclassifiable = || ContextError::UnclassifiableReduction {
        successor: successor.clone(),
    };

    for s in step(&c.body) {
        if alpha_eq(&substitute1(&s.term, &c.hole, e), successor) {
            let next = LinearContext::new(s.term, c.hole.clone(), c.holetype.clone())?;
            return Ok(LcrForm::ContextStep(next));
        }
    }

    if c.is_evaluation_context() {
        for s in step(e) {
            if alpha_eq(&c.plug_unchecked(&s.term), successor) {
                return Ok(LcrForm::ProgramStep(s.term));
            }
        }
    }

    if !c.is_evaluation_context() || !step(e).is_empty() {
        return Err(unclassifiable());
    }
    let plugged = c.plug_unchecked(e);
    for tr in context_transitions(c)? {
        match &tr {
            ContextTransition::OnConstant { .. } => {
                let (Some(action), Some(closed)) = (Action::constant(e), tr.fire(e)) else {
                    continue;
                };
                if alpha_eq(&closed, successor) {
                    let ty = crate::typing::constant_type(e).expect("literal");
                    return Ok(LcrForm::Interaction {
                        action,
                        next_context: NextContext::Closed(closed),
                        next_program: Term::omega(ty),
                        continued: None,
                    });
                }
            }
            ContextTransition::Open { action, next } => {
                let Some((e2, _)) = apply_action(e, &c.holetype, action) else {
                    continue;
                };
                let joined = next.plug_unchecked(&e2);
                let continued = if alpha_eq(&joined, successor) {
                    None
                } else if alpha_eq(&joined, &plugged) {
                    Some(Box::new(classify_step(next, &e2, successor)?))
                } else {
                    continue;
                };
                return Ok(LcrForm::Interaction {
                    action: action.clone(),
                    next_context: NextContext::Open(next.clone()),
                    next_program: e2,
                    continued,
                });
            }
        }
    }
    Err(unclassifiable())
}

/// Classify every one-step successor of `c[e/x]`, in reduction order.
pub fn classify_lcr(c: &LinearContext, e: &Term) -> Result<Vec<(Term, LcrForm)>, ContextError> {
    let plugged = c.plug(e)?;
    let succs = step(&plugged);
    if succs.is_empty() {
        return Err(ContextError::Irreducible(plugged));
    }
    succs
        .into_iter()
        .map(|s| {
            let form = classify_step(c, e, &s.term)?;
            Ok((s.term, form))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{parse_term, parse_type, Ident, Type};

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

    #[test]
    fn constant_interaction_closes_the_context() {
        let r = classify_lcr(&ctx("pred x", "Nat"), &t("3")).unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].0, t("2"));
        assert_eq!(
            r[0].1,
            LcrForm::Interaction {
                action: Action::ConstNat(3u32.into()),
                next_context: NextContext::Closed(t("2")),
                next_program: Term::omega(Type::Nat),
                continued: None,
            }
        );
    }

    #[test]
    fn program_step_under_bare_hole() {
        let r = classify_lcr(&ctx("x", "Nat"), &t("pred 3")).unwrap();
        assert_eq!(r[0].1, LcrForm::ProgramStep(t("2")));
    }

    #[test]
    fn context_step_alone() {
        let r = classify_lcr(&ctx("if true then x else x", "Nat"), &t("5")).unwrap();
        assert_eq!(r[0].1, LcrForm::ContextStep(ctx("x", "Nat")));
    }

    #[test]
    fn primitive_program_chains_interactions() {
        let r = classify_lcr(&ctx("x 1 2", "Nat -o Nat -o Bool"), &t("eq")).unwrap();
        assert_eq!(r[0].0, t("false"));
        let labels: Vec<String> = r[0]
            .1
            .interaction_labels()
            .iter()
            .map(|a| a.to_string())
            .collect();
        assert_eq!(labels, ["@(1)", "@(2)"]);
        let (c2, e2) = r[0]
            .1
            .residual(&ctx("x 1 2", "Nat -o Nat -o Bool"), &t("eq"));
        assert!(c2.unwrap().is_hole());
        assert_eq!(e2, t("false"));
    }

    #[test]
    fn monadic_interaction() {
        let c = ctx("bind z = x in val(succ z)", "T Nat");
        let r = classify_lcr(&c, &t("val(4)")).unwrap();
        let LcrForm::Interaction {
            action,
            next_program,
            continued,
            ..
        } = &r[0].1
        else {
            panic!()
        };
        assert_eq!(*action, Action::TAct);
        assert_eq!(*next_program, t("4"));
        assert!(continued.is_none());
    }

    #[test]
    fn nondeterministic_context_steps() {
        let r = classify_lcr(&ctx("x |~| x", "T Nat"), &t("val(0)")).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().all(|(_, f)| f.kind() == "context-step"));
    }
}
