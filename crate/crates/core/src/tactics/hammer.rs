//! Internal stand-in for sledgehammer: relevance filtering, bounded proof
//! search, and reconstruction as a single replayable step.

use crate::kernel::rewrite::RuleSet;
use crate::kernel::{Attr, Context, Goal, Lemma, Name, ProofState};

use super::script::ScriptTactic;
use super::simp::simp_goal;
use super::step::apply_step;

/// Lemmas sharing at least one symbol with `g`, best first; ties keep
/// declaration order. Induction rules are never relevant.
pub fn relevant_lemmas<'a>(g: &Goal, ctx: &'a Context, k: usize) -> Vec<&'a Lemma> {
    let symbols = g.symbols();
    let mut scored: Vec<(usize, &Lemma)> = ctx
        .lemmas
        .iter()
        .filter(|l| !l.has(Attr::Induct))
        .map(|l| (l.symbols().intersection(&symbols).count(), l))
        .filter(|(score, _)| *score > 0)
        .collect();
    scored.sort_by_key(|(score, _)| std::cmp::Reverse(*score));
    scored.into_iter().take(k).map(|(_, l)| l).collect()
}

fn discharges(t: &ScriptTactic, s: &ProofState) -> bool {
    apply_step(t, s)
        .head()
        .is_some_and(|r| r.depth() == s.depth() && r.goals() == &s.goals()[1..])
}

/// Drops items one at a time, keeping each removal that still works.
fn minimize(mut items: Vec<Name>, works: impl Fn(&[Name]) -> bool) -> Vec<Name> {
    let mut i = 0;
    while i < items.len() {
        let mut fewer = items.clone();
        fewer.remove(i);
        if works(&fewer) {
            items = fewer;
        } else {
            i += 1;
        }
    }
    items
}

fn in_declaration_order(ctx: &Context, mut names: Vec<Name>) -> Vec<Name> {
    names.sort_by_key(|n| ctx.lemmas.iter().position(|l| l.label == *n));
    names
}

/// A step that discharges the first goal of `s` using at most `k` relevant
/// lemmas, or `None`.
pub fn hammer(s: &ProofState, k: usize) -> Option<ScriptTactic> {
    let g = s.first_goal()?;
    let ctx = s.context();
    let relevant = relevant_lemmas(g, ctx, k);
    let (plain, conditional): (Vec<&Lemma>, Vec<&Lemma>) = relevant.into_iter().partition(|l| l.hyps.is_empty());
    let labels = |ls: &[&Lemma]| in_declaration_order(ctx, ls.iter().map(|l| l.label.clone()).collect());
    let simp = |add: &[Name]| ScriptTactic::Simp { add: add.to_vec() };

    let rules = RuleSet::simp_set(ctx, &plain);
    if let Ok(Some((goals, used))) = simp_goal(g, &rules) {
        if goals.is_empty() {
            let all = labels(&plain);
            let used: Vec<Name> = all.iter().filter(|l| used.contains(*l)).cloned().collect();
            let start = if discharges(&simp(&used), s) { used } else { all };
            return Some(simp(&minimize(start, |add| discharges(&simp(add), s))));
        }
    }

    let bare = ScriptTactic::Fastforce {
        simp_add: vec![],
        intro: vec![],
    };
    if discharges(&bare, s) {
        return Some(bare);
    }

    let ff = |simp_add: &[Name], intro: &[Name]| ScriptTactic::Fastforce {
        simp_add: simp_add.to_vec(),
        intro: intro.to_vec(),
    };
    let (simp_add, intro) = (labels(&plain), labels(&conditional));
    if (simp_add.is_empty() && intro.is_empty()) || !discharges(&ff(&simp_add, &intro), s) {
        return None;
    }
    let simp_add = minimize(simp_add, |xs| discharges(&ff(xs, &intro), s));
    let intro = minimize(intro, |xs| discharges(&ff(&simp_add, xs), s));
    Some(ff(&simp_add, &intro))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::theory::parse_theory;

    const ADD: &str = "
datatype nat = Zero | Suc nat
fun add Zero y = y
fun add (Suc x) y = Suc (add x y)
lemma add_zero: add x Zero = x
lemma add_suc: add x (Suc y) = Suc (add x y)
lemma unrelated: Suc x = Suc x
goal g1: add (add a Zero) b = add a b
goal g3: add x (Suc Zero) = Suc x
goal g2: add x y = add y x
";

    #[test]
    fn relevance_ranks_by_overlap_then_declaration() {
        let th = parse_theory(ADD).unwrap();
        let ranked: Vec<&str> = relevant_lemmas(th.goal("g1").unwrap(), &th.context, 8)
            .iter()
            .map(|l| &*l.label)
            .collect();
        assert_eq!(ranked, vec!["add_zero", "add_suc"]);
    }

    #[test]
    fn hammer_reconstructs_minimal_simp_steps() {
        let th = parse_theory(ADD).unwrap();
        let s = th.proof_state(&["g1"]).unwrap();
        assert_eq!(hammer(&s, 8).unwrap().to_line(), "apply (simp add: add_zero)");
        let s = th.proof_state(&["g3"]).unwrap();
        assert_eq!(hammer(&s, 8).unwrap().to_line(), "apply (simp add: add_zero add_suc)");
        let s = th.proof_state(&["g2"]).unwrap();
        assert_eq!(hammer(&s, 8), None);
    }
}
