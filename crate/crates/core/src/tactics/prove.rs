//! Bounded complete-search provers: `fastforce` and the propositional
//! tableau behind `blast`.

use crate::kernel::rewrite::RuleSet;
use crate::kernel::{Formula, Goal, Lemma, Subst};

use super::rules::intro_lemma;
use super::simp::{clarify, implication_chain, mentions_generalized};

/// Nodes one `fastforce` call may expand.
const FASTFORCE_NODES: usize = 4_000;
/// Sequents one `blast` call may expand.
const BLAST_NODES: usize = 20_000;

pub(crate) struct Fastforce<'a> {
    rules: &'a RuleSet,
    intro: Vec<&'a Lemma>,
    nodes: usize,
}

impl<'a> Fastforce<'a> {
    pub(crate) fn new(rules: &'a RuleSet, intro: Vec<&'a Lemma>) -> Self {
        Fastforce {
            rules,
            intro,
            nodes: FASTFORCE_NODES,
        }
    }

    /// Whether `g` is discharged within `depth` unsafe steps.
    pub(crate) fn prove(&mut self, g: &Goal, depth: usize) -> bool {
        if self.nodes == 0 {
            return false;
        }
        self.nodes -= 1;
        let Ok(goals) = clarify(g, self.rules, true) else {
            return false;
        };
        goals.iter().all(|g| self.unsafe_step(g, depth))
    }

    fn prove_all(&mut self, goals: &[Goal], depth: usize) -> bool {
        goals.iter().all(|g| self.prove(g, depth))
    }

    fn unsafe_step(&mut self, g: &Goal, depth: usize) -> bool {
        if depth == 0 || self.nodes == 0 {
            return false;
        }
        let d = depth - 1;
        if let Formula::Or(a, b) = &g.concl {
            for side in [a, b] {
                let sub = Goal {
                    concl: (**side).clone(),
                    ..g.clone()
                };
                if self.prove(&sub, d) {
                    return true;
                }
            }
        }
        for l in self.intro.clone() {
            if let Some(subs) = intro_lemma(l, g) {
                if self.prove_all(&subs, d) {
                    return true;
                }
            }
        }
        for (i, h) in g.hyps.iter().enumerate() {
            let mut rest = g.clone();
            rest.hyps.remove(i);
            if mentions_generalized(h, g) {
                if self.backchain(h, g, d) {
                    return true;
                }
                continue;
            }
            match h {
                Formula::Implies(a, b) => {
                    let left = Goal {
                        concl: (**a).clone(),
                        ..rest.clone()
                    };
                    let mut right = rest.clone();
                    right.hyps.push((**b).clone());
                    if self.prove(&left, d) && self.prove(&right, d) {
                        return true;
                    }
                }
                Formula::Not(a) => {
                    let sub = Goal {
                        concl: (**a).clone(),
                        ..rest
                    };
                    if self.prove(&sub, d) {
                        return true;
                    }
                }
                _ => {}
            }
        }
        false
    }

    /// Uses a generalized hypothesis `p1 --> .. --> c` backwards: `c` must
    /// match the conclusion, and the instantiated premises become goals.
    fn backchain(&mut self, h: &Formula, g: &Goal, depth: usize) -> bool {
        let (prems, concl) = implication_chain(h);
        let mut s = Subst::new();
        if !concl.match_into(&g.concl, &|v| g.generalized.contains(&v.name), &mut s) {
            return false;
        }
        let subs: Vec<Goal> = prems
            .iter()
            .map(|p| Goal {
                concl: p.subst(&s),
                ..g.clone()
            })
            .collect();
        if subs.iter().any(|x| mentions_generalized(&x.concl, g)) {
            return false;
        }
        self.prove_all(&subs, depth)
    }
}

/// Classical propositional validity of `hyps ==> concl`, atoms opaque and
/// `t = t` valid.
pub(crate) fn blast(g: &Goal) -> bool {
    let mut nodes = BLAST_NODES;
    sequent(g.hyps.clone(), vec![g.concl.clone()], &mut nodes)
}

fn is_compound(f: &Formula) -> bool {
    matches!(
        f,
        Formula::True | Formula::False | Formula::Not(_) | Formula::And(..) | Formula::Or(..) | Formula::Implies(..)
    )
}

fn sequent(mut left: Vec<Formula>, mut right: Vec<Formula>, nodes: &mut usize) -> bool {
    if *nodes == 0 {
        return false;
    }
    *nodes -= 1;
    if left.contains(&Formula::False)
        || right.contains(&Formula::True)
        || right.iter().any(|f| matches!(f, Formula::Eq(a, b) if a == b))
        || left.iter().any(|f| right.contains(f))
    {
        return true;
    }
    if let Some(i) = left.iter().position(is_compound) {
        let f = left.remove(i);
        return match f {
            Formula::True | Formula::False => sequent(left, right, nodes),
            Formula::Not(a) => {
                right.push(*a);
                sequent(left, right, nodes)
            }
            Formula::And(a, b) => {
                left.push(*a);
                left.push(*b);
                sequent(left, right, nodes)
            }
            Formula::Or(a, b) => {
                let mut l2 = left.clone();
                left.push(*a);
                l2.push(*b);
                sequent(left, right.clone(), nodes) && sequent(l2, right, nodes)
            }
            Formula::Implies(a, b) => {
                let mut r2 = right.clone();
                r2.push(*a);
                let first = sequent(left.clone(), r2, nodes);
                left.push(*b);
                first && sequent(left, right, nodes)
            }
            _ => unreachable!("only compound formulas are selected"),
        };
    }
    if let Some(i) = right.iter().position(is_compound) {
        let f = right.remove(i);
        return match f {
            Formula::True | Formula::False => sequent(left, right, nodes),
            Formula::Not(a) => {
                left.push(*a);
                sequent(left, right, nodes)
            }
            Formula::And(a, b) => {
                let mut r2 = right.clone();
                right.push(*a);
                r2.push(*b);
                sequent(left.clone(), right, nodes) && sequent(left, r2, nodes)
            }
            Formula::Or(a, b) => {
                right.push(*a);
                right.push(*b);
                sequent(left, right, nodes)
            }
            Formula::Implies(a, b) => {
                left.push(*a);
                right.push(*b);
                sequent(left, right, nodes)
            }
            _ => unreachable!("only compound formulas are selected"),
        };
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::theory::{parse_goal, parse_theory};

    fn goal(text: &str) -> Goal {
        let th = parse_theory("datatype nat = Zero | Suc nat").unwrap();
        parse_goal(&th.context, "g", text).unwrap()
    }

    #[test]
    fn tableau_decides_propositional_tautologies() {
        for valid in [
            "a | ~ a",
            "(a --> b) --> ~ b --> ~ a",
            "a & b ==> b & a",
            "((a --> b) --> a) --> a",
            "Suc x = Suc x",
        ] {
            assert!(blast(&goal(valid)), "{valid}");
        }
        for invalid in ["a | b", "a --> b", "(a --> b) --> b --> a"] {
            assert!(!blast(&goal(invalid)), "{invalid}");
        }
    }

    #[test]
    fn fastforce_uses_implications_and_disjunctions() {
        let rules = RuleSet::default();
        let g = goal("a --> b ==> b --> c ==> a ==> c | d");
        assert!(Fastforce::new(&rules, vec![]).prove(&g, 12));
        let h = goal("a --> b ==> c");
        assert!(!Fastforce::new(&rules, vec![]).prove(&h, 12));
    }
}
