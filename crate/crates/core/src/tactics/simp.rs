//! Simplification and safe propositional decomposition.

use std::collections::{BTreeSet, VecDeque};

use crate::kernel::rewrite::{rewrite_formula, simplify_eq, RuleSet};
use crate::kernel::{child_labels, Formula, Goal, KernelError, Name, Subst, Term, DEFAULT_REWRITE_BUDGET};

/// Work limit for one goal's simp/safe fixpoint.
const CLARIFY_FUEL: usize = 256;

fn flatten_conj(f: &Formula, out: &mut Vec<Formula>) {
    match f {
        Formula::And(a, b) => {
            flatten_conj(a, out);
            flatten_conj(b, out);
        }
        other => out.push(other.clone()),
    }
}

pub(crate) fn mentions_generalized(f: &Formula, g: &Goal) -> bool {
    g.generalized.iter().any(|v| f.contains_var(v))
}

/// Goals left by a simp step and the labels of the rules that fired.
pub(crate) type Simplified = (Vec<Goal>, BTreeSet<Name>);

/// Simplifies one goal: hypotheses with `base`, then the conclusion with
/// `base` plus the simplified hypotheses. `None` if nothing changed;
/// otherwise the resulting goals (empty when discharged) and the labels of
/// the rules that fired.
pub(crate) fn simp_goal(g: &Goal, base: &RuleSet) -> Result<Option<Simplified>, KernelError> {
    let mut used = BTreeSet::new();
    let mut hyps = Vec::with_capacity(g.hyps.len());
    for h in &g.hyps {
        let r = rewrite_formula(h, base, DEFAULT_REWRITE_BUDGET)?;
        used.extend(r.used);
        match r.result {
            Formula::False => return Ok(Some((Vec::new(), used))),
            Formula::True => {}
            f => hyps.push(f),
        }
    }
    let mut flat = Vec::new();
    for h in &hyps {
        flatten_conj(h, &mut flat);
    }
    let mut rules = base.clone();
    rules.add_hypotheses(&Goal {
        hyps: flat,
        ..g.clone()
    });
    let r = rewrite_formula(&g.concl, &rules, DEFAULT_REWRITE_BUDGET)?;
    used.extend(r.used);
    if r.result == Formula::True {
        return Ok(Some((Vec::new(), used)));
    }
    let out = Goal {
        label: g.label.clone(),
        hyps,
        concl: r.result,
        generalized: g.generalized.clone(),
    };
    if out == *g {
        return Ok(None);
    }
    Ok(Some((vec![out], used)))
}

fn with_hyps(g: &Goal, hyps: Vec<Formula>) -> Goal {
    Goal { hyps, ..g.clone() }
}

fn replace_hyp(g: &Goal, i: usize, with: &[Formula]) -> Goal {
    let mut hyps = g.hyps.clone();
    hyps.splice(i..=i, with.iter().cloned());
    with_hyps(g, hyps)
}

/// Premises and final conclusion of a right-nested implication.
pub(crate) fn implication_chain(f: &Formula) -> (Vec<&Formula>, &Formula) {
    let mut prems = Vec::new();
    let mut cur = f;
    while let Formula::Implies(a, b) = cur {
        prems.push(&**a);
        cur = b;
    }
    (prems, cur)
}

/// Substitutions for the generalized variables making every premise a
/// hypothesis of `g`.
fn match_premises(prems: &[&Formula], g: &Goal, s: Subst, out: &mut Vec<Subst>) {
    let Some((p, rest)) = prems.split_first() else {
        out.push(s);
        return;
    };
    for h in &g.hyps {
        if mentions_generalized(h, g) {
            continue;
        }
        let mut s2 = s.clone();
        if p.match_into(h, &|v| g.generalized.contains(&v.name), &mut s2) {
            match_premises(rest, g, s2, out);
        }
    }
}

fn var_definition(a: &Term, b: &Term, g: &Goal) -> Option<(Name, Term)> {
    match (a, b) {
        (Term::Var(x), t) if !g.generalized.contains(&x.name) && !t.contains_var(&x.name) => {
            Some((x.name.clone(), t.clone()))
        }
        (t, Term::Var(x)) if !g.generalized.contains(&x.name) && !t.contains_var(&x.name) => {
            Some((x.name.clone(), t.clone()))
        }
        _ => None,
    }
}

/// One safe decomposition step, or `None` if none applies. An empty result
/// closes the goal.
pub(crate) fn safe_step(g: &Goal) -> Option<Vec<Goal>> {
    if g.concl == Formula::True || g.hyps.contains(&Formula::False) || g.hyps.contains(&g.concl) {
        return Some(Vec::new());
    }
    if matches!(&g.concl, Formula::Eq(a, b) if a == b) {
        return Some(Vec::new());
    }
    for (i, h) in g.hyps.iter().enumerate() {
        if mentions_generalized(h, g) {
            let (prems, concl) = implication_chain(h);
            if prems.is_empty() {
                continue;
            }
            let mut found = Vec::new();
            match_premises(&prems, g, Subst::new(), &mut found);
            for s in found {
                let inst = concl.subst(&s);
                if !mentions_generalized(&inst, g) && !g.hyps.contains(&inst) {
                    let mut hyps = g.hyps.clone();
                    hyps.push(inst);
                    return Some(vec![with_hyps(g, hyps)]);
                }
            }
            continue;
        }
        match h {
            Formula::True => return Some(vec![replace_hyp(g, i, &[])]),
            Formula::And(a, b) => return Some(vec![replace_hyp(g, i, &[(**a).clone(), (**b).clone()])]),
            Formula::Or(a, b) => {
                return Some(vec![
                    replace_hyp(g, i, &[(**a).clone()]),
                    replace_hyp(g, i, &[(**b).clone()]),
                ])
            }
            Formula::Not(a) if g.hyps.contains(a) => return Some(Vec::new()),
            Formula::Implies(a, _) if **a == Formula::False => return Some(vec![replace_hyp(g, i, &[])]),
            Formula::Implies(a, b) if g.hyps.contains(a) => return Some(vec![replace_hyp(g, i, &[(**b).clone()])]),
            Formula::Eq(a, b) => {
                let s = simplify_eq(a.clone(), b.clone());
                match s {
                    Formula::False => return Some(Vec::new()),
                    Formula::True => return Some(vec![replace_hyp(g, i, &[])]),
                    ref f if f != h => return Some(vec![replace_hyp(g, i, &[s])]),
                    _ => {}
                }
                if let Some((x, t)) = var_definition(a, b, g) {
                    let sub = Subst::from([(x, t)]);
                    let mut rest = g.clone();
                    rest.hyps.remove(i);
                    let hyps = rest.hyps.iter().map(|f| f.subst(&sub)).collect();
                    return Some(vec![Goal {
                        hyps,
                        concl: rest.concl.subst(&sub),
                        ..rest
                    }]);
                }
            }
            _ => {}
        }
    }
    match &g.concl {
        Formula::And(a, b) => Some(vec![
            Goal {
                concl: (**a).clone(),
                ..g.clone()
            },
            Goal {
                concl: (**b).clone(),
                ..g.clone()
            },
        ]),
        Formula::Implies(a, b) => {
            let mut hyps = g.hyps.clone();
            hyps.push((**a).clone());
            Some(vec![Goal {
                hyps,
                concl: (**b).clone(),
                ..g.clone()
            }])
        }
        Formula::Not(a) => {
            let mut hyps = g.hyps.clone();
            hyps.push((**a).clone());
            Some(vec![Goal {
                hyps,
                concl: Formula::False,
                ..g.clone()
            }])
        }
        _ => None,
    }
}

/// Alternates simplification and safe steps on `g` until neither applies.
/// With `simp` off only safe steps run. Results are relabelled as children
/// of `g`.
pub(crate) fn clarify(g: &Goal, rules: &RuleSet, simp: bool) -> Result<Vec<Goal>, KernelError> {
    let mut out = Vec::new();
    let mut work = VecDeque::from([g.clone()]);
    let mut fuel = CLARIFY_FUEL;
    while let Some(cur) = work.pop_front() {
        if fuel == 0 {
            out.push(cur);
            continue;
        }
        fuel -= 1;
        let next = match simp {
            true => simp_goal(&cur, rules)?.map(|(gs, _)| gs),
            false => None,
        };
        if let Some(gs) = next.or_else(|| safe_step(&cur)) {
            for x in gs.into_iter().rev() {
                work.push_front(x);
            }
            continue;
        }
        out.push(cur);
    }
    let labels = child_labels(&g.label, out.len());
    Ok(out.into_iter().zip(labels).map(|(x, l)| x.with_label(l)).collect())
}

/// Goals after `auto`, or `None` if no goal changed.
pub(crate) fn auto(goals: &[Goal], rules: &RuleSet) -> Result<Option<Vec<Goal>>, KernelError> {
    let mut out = Vec::new();
    let mut changed = false;
    for g in goals {
        let gs = clarify(g, rules, true)?;
        changed |= !(gs.len() == 1 && gs[0] == *g);
        out.extend(gs);
    }
    Ok(changed.then_some(out))
}

/// Simp on the first goal followed by safe steps on what remains.
pub(crate) fn clarsimp(g: &Goal, rules: &RuleSet) -> Result<Option<Vec<Goal>>, KernelError> {
    let simplified = match simp_goal(g, rules)? {
        Some((gs, _)) => gs,
        None => vec![g.clone()],
    };
    let mut out = Vec::new();
    for s in &simplified {
        out.extend(clarify(s, rules, false)?);
    }
    if out.len() == 1 && out[0] == *g {
        return Ok(None);
    }
    let labels = child_labels(&g.label, out.len());
    Ok(Some(
        out.into_iter().zip(labels).map(|(x, l)| x.with_label(l)).collect(),
    ))
}
