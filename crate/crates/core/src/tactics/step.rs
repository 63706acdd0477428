//! Deterministic application of script steps. Search and replay both go
//! through [`apply_step`], so a recorded step and its result index always
//! reproduce the same state.

use crate::kernel::induction::{cases_scheme, induction_scheme};
use crate::kernel::rewrite::RuleSet;
use crate::kernel::{Attr, Context, Goal, Lemma, Name, ProofState, Var};
use crate::lazy_stream::LazyStream;

use super::prove::{blast, Fastforce};
use super::rules::{elim, intro};
use super::script::ScriptTactic;
use super::simp::{auto, clarsimp, simp_goal};

/// Unsafe-step depth of `fastforce`.
pub const FASTFORCE_DEPTH: usize = 12;

/// Result states of one script step, in order. Nothing is computed until
/// the stream is forced.
pub fn apply_step(tac: &ScriptTactic, s: &ProofState) -> LazyStream<ProofState> {
    let (tac, s) = (tac.clone(), s.clone());
    LazyStream::suspend(move || step(&tac, &s))
}

fn lemmas<'a>(ctx: &'a Context, labels: &[Name]) -> Option<Vec<&'a Lemma>> {
    labels.iter().map(|l| ctx.lemma(l)).collect()
}

fn find_var(g: &Goal, name: &str) -> Option<Var> {
    g.all_vars().into_iter().find(|v| &*v.name == name)
}

fn find_vars(g: &Goal, names: &[Name]) -> Option<Vec<Var>> {
    names.iter().map(|n| find_var(g, n)).collect()
}

fn single(s: ProofState) -> LazyStream<ProofState> {
    LazyStream::unit(s)
}

fn step(tac: &ScriptTactic, s: &ProofState) -> LazyStream<ProofState> {
    let ctx = s.context().clone();
    let none = LazyStream::empty;
    match tac {
        ScriptTactic::Defer => {
            let mut goals = s.goals().to_vec();
            if goals.is_empty() {
                return none();
            }
            goals.rotate_left(1);
            return single(s.with_goals(goals));
        }
        ScriptTactic::Subgoal => return s.push_focus().map_or_else(none, single),
        ScriptTactic::Done => return s.pop_focus().map_or_else(none, single),
        ScriptTactic::User(n) if &**n == "assumption" => return step(&ScriptTactic::Assumption, s),
        ScriptTactic::User(n) => return ctx.user_tactic(n).map_or_else(none, |t| t(s)),
        ScriptTactic::Auto { simp_add } => {
            let Some(extra) = lemmas(&ctx, simp_add) else {
                return none();
            };
            let rules = RuleSet::simp_set(&ctx, &extra);
            return match auto(s.goals(), &rules) {
                Ok(Some(goals)) => single(s.with_goals(goals)),
                _ => none(),
            };
        }
        _ => {}
    }
    let Some(g) = s.first_goal() else {
        return none();
    };
    let replaced = |goals: Vec<Goal>| single(s.replace_first(goals));
    match tac {
        ScriptTactic::Simp { add } | ScriptTactic::Clarsimp { add } => {
            let Some(extra) = lemmas(&ctx, add) else {
                return none();
            };
            let rules = RuleSet::simp_set(&ctx, &extra);
            let result = match tac {
                ScriptTactic::Simp { .. } => simp_goal(g, &rules).map(|r| r.map(|(gs, _)| gs)),
                _ => clarsimp(g, &rules),
            };
            match result {
                Ok(Some(goals)) => replaced(goals),
                _ => none(),
            }
        }
        ScriptTactic::Fastforce { simp_add, intro } => {
            let (Some(extra), Some(mut intros)) = (lemmas(&ctx, simp_add), lemmas(&ctx, intro)) else {
                return none();
            };
            for l in ctx.lemmas.iter().filter(|l| l.has(Attr::Intro)) {
                if !intros.iter().any(|m| m.label == l.label) {
                    intros.push(l);
                }
            }
            let rules = RuleSet::simp_set(&ctx, &extra);
            match Fastforce::new(&rules, intros).prove(g, FASTFORCE_DEPTH) {
                true => replaced(Vec::new()),
                false => none(),
            }
        }
        ScriptTactic::Blast => match blast(g) {
            true => replaced(Vec::new()),
            false => none(),
        },
        ScriptTactic::Assumption => match g.hyps.contains(&g.concl) {
            true => replaced(Vec::new()),
            false => none(),
        },
        ScriptTactic::Rule(r) => intro(r, g, &ctx).map_or_else(none, replaced),
        ScriptTactic::Erule(r) => {
            LazyStream::from_vec(elim(r, g, &ctx).into_iter().map(|gs| s.replace_first(gs)).collect())
        }
        ScriptTactic::Induct { vars, arbitrary, rule } => {
            let (Some(vs), Some(arb)) = (find_vars(g, vars), find_vars(g, arbitrary)) else {
                return none();
            };
            induction_scheme(g, &vs, &arb, rule.as_deref(), &ctx).map_or_else(|_| none(), replaced)
        }
        ScriptTactic::Cases { var, rule } => {
            let Some(v) = find_var(g, var) else {
                return none();
            };
            cases_scheme(g, &v, rule.as_deref(), &ctx).map_or_else(|_| none(), replaced)
        }
        ScriptTactic::Defer
        | ScriptTactic::Subgoal
        | ScriptTactic::Done
        | ScriptTactic::User(_)
        | ScriptTactic::Auto { .. } => {
            unreachable!("handled above")
        }
    }
}
