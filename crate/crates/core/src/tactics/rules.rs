//! Introduction and elimination rules.

use crate::kernel::{child_labels, Attr, Context, Formula, Goal, Lemma, Subst, Var};
use crate::lazy_stream::LazyStream;

pub const INTRO_RULES: [&str; 7] = ["conjI", "impI", "notI", "disjI1", "disjI2", "refl", "TrueI"];
pub const ELIM_RULES: [&str; 3] = ["conjE", "disjE", "impE"];

/// Built-in intro rules followed by `intro` lemmas.
pub fn intro_rule_names(ctx: &Context) -> Vec<String> {
    let mut out: Vec<String> = INTRO_RULES.iter().map(|s| s.to_string()).collect();
    out.extend(
        ctx.lemmas
            .iter()
            .filter(|l| l.has(Attr::Intro))
            .map(|l| l.label.to_string()),
    );
    out
}

/// Built-in elim rules followed by `elim` lemmas.
pub fn elim_rule_names(ctx: &Context) -> Vec<String> {
    let mut out: Vec<String> = ELIM_RULES.iter().map(|s| s.to_string()).collect();
    out.extend(
        ctx.lemmas
            .iter()
            .filter(|l| l.has(Attr::Elim))
            .map(|l| l.label.to_string()),
    );
    out
}

fn with_concl(g: &Goal, concl: Formula) -> Goal {
    Goal { concl, ..g.clone() }
}

fn labelled(g: &Goal, goals: Vec<Goal>) -> Vec<Goal> {
    let labels = child_labels(&g.label, goals.len());
    goals.into_iter().zip(labels).map(|(x, l)| x.with_label(l)).collect()
}

fn lemma_vars(l: &Lemma) -> Vec<Var> {
    let mut vs = Vec::new();
    for h in &l.hyps {
        h.collect_vars(&mut vs);
    }
    l.concl.collect_vars(&mut vs);
    vs
}

fn all_bound(vars: &[Var], s: &Subst) -> bool {
    vars.iter().all(|v| s.contains_key(&v.name))
}

/// Backward application of an intro lemma: its conclusion must match the
/// goal's and instantiate every variable of its premises.
pub(crate) fn intro_lemma(l: &Lemma, g: &Goal) -> Option<Vec<Goal>> {
    let mut s = Subst::new();
    if !l.concl.match_into(&g.concl, &|_| true, &mut s) || !all_bound(&lemma_vars(l), &s) {
        return None;
    }
    Some(l.hyps.iter().map(|h| with_concl(g, h.subst(&s))).collect())
}

/// The (at most one) result of an intro rule on `g`.
pub(crate) fn intro(rule: &str, g: &Goal, ctx: &Context) -> Option<Vec<Goal>> {
    let goals = match (rule, &g.concl) {
        ("conjI", Formula::And(a, b)) => vec![with_concl(g, (**a).clone()), with_concl(g, (**b).clone())],
        ("impI", Formula::Implies(a, b)) => {
            let mut hyps = g.hyps.clone();
            hyps.push((**a).clone());
            vec![Goal {
                hyps,
                concl: (**b).clone(),
                ..g.clone()
            }]
        }
        ("notI", Formula::Not(a)) => {
            let mut hyps = g.hyps.clone();
            hyps.push((**a).clone());
            vec![Goal {
                hyps,
                concl: Formula::False,
                ..g.clone()
            }]
        }
        ("disjI1", Formula::Or(a, _)) => vec![with_concl(g, (**a).clone())],
        ("disjI2", Formula::Or(_, b)) => vec![with_concl(g, (**b).clone())],
        ("refl", Formula::Eq(a, b)) if a == b => vec![],
        ("TrueI", Formula::True) => vec![],
        (name, _) if !INTRO_RULES.contains(&name) => {
            let l = ctx.lemma(name).filter(|l| l.has(Attr::Intro))?;
            intro_lemma(l, g)?
        }
        _ => return None,
    };
    Some(labelled(g, goals))
}

fn without(g: &Goal, i: usize, extra: &[Formula]) -> Goal {
    let mut hyps = g.hyps.clone();
    hyps.remove(i);
    hyps.extend(extra.iter().cloned());
    Goal { hyps, ..g.clone() }
}

/// Results of an elim rule on `g`, one per matching hypothesis position.
pub(crate) fn elim(rule: &str, g: &Goal, ctx: &Context) -> Vec<Vec<Goal>> {
    let lemma = match rule {
        "conjE" | "disjE" | "impE" => None,
        name => match ctx.lemma(name).filter(|l| l.has(Attr::Elim) && !l.hyps.is_empty()) {
            Some(l) => Some(l),
            None => return Vec::new(),
        },
    };
    let mut out = Vec::new();
    for (i, h) in g.hyps.iter().enumerate() {
        let goals = match (rule, h, lemma) {
            ("conjE", Formula::And(a, b), _) => vec![without(g, i, &[(**a).clone(), (**b).clone()])],
            ("disjE", Formula::Or(a, b), _) => vec![without(g, i, &[(**a).clone()]), without(g, i, &[(**b).clone()])],
            ("impE", Formula::Implies(a, b), _) => {
                vec![
                    with_concl(&without(g, i, &[]), (**a).clone()),
                    without(g, i, &[(**b).clone()]),
                ]
            }
            (_, _, Some(l)) => {
                let mut s = Subst::new();
                if !l.hyps[0].match_into(h, &|_| true, &mut s) || !all_bound(&lemma_vars(l), &s) {
                    continue;
                }
                let mut goals = vec![without(g, i, &[l.concl.subst(&s)])];
                goals.extend(l.hyps[1..].iter().map(|p| with_concl(&without(g, i, &[]), p.subst(&s))));
                goals
            }
            _ => continue,
        };
        out.push(labelled(g, goals));
    }
    out
}

/// Lazily applies `f` to each rule name, concatenating the results.
pub(crate) fn append_over<T, F>(names: Vec<String>, f: F) -> LazyStream<T>
where
    T: Clone + Send + Sync + 'static,
    F: Fn(&str) -> LazyStream<T> + Send + Sync + 'static,
{
    LazyStream::from_vec(names).bind(move |n| f(&n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::theory::{parse_goal, parse_theory};

    #[test]
    fn conj_elim_yields_one_result_per_position() {
        let th = parse_theory("datatype nat = Zero | Suc nat").unwrap();
        let g = parse_goal(&th.context, "g", "w & x ==> y & z ==> z").unwrap();
        let rs = elim("conjE", &g, &th.context);
        assert_eq!(rs.len(), 2);
        let first: Vec<String> = rs[0][0].hyps.iter().map(|h| h.to_string()).collect();
        assert_eq!(first, vec!["y & z", "w", "x"]);
        let second: Vec<String> = rs[1][0].hyps.iter().map(|h| h.to_string()).collect();
        assert_eq!(second, vec!["w & x", "y", "z"]);
    }

    #[test]
    fn intro_rules_match_the_conclusion_shape() {
        let th = parse_theory("datatype nat = Zero | Suc nat").unwrap();
        let g = parse_goal(&th.context, "g", "a & b").unwrap();
        let split = intro("conjI", &g, &th.context).unwrap();
        assert_eq!(split.len(), 2);
        assert_eq!(&*split[1].label, "g.2");
        assert!(intro("impI", &g, &th.context).is_none());
        let r = parse_goal(&th.context, "r", "Suc x = Suc x").unwrap();
        assert_eq!(intro("refl", &r, &th.context), Some(vec![]));
    }

    #[test]
    fn intro_lemmas_need_every_premise_variable_bound() {
        let text = "
datatype nat = Zero | Suc nat
pred le nat nat
lemma [intro] le_suc: le x y ==> le x (Suc y)
lemma [intro] le_trans: le x y ==> le y z ==> le x z
";
        let th = parse_theory(text).unwrap();
        let g = parse_goal(&th.context, "g", "le a (Suc b)").unwrap();
        let subs = intro("le_suc", &g, &th.context).unwrap();
        assert_eq!(subs[0].concl.to_string(), "le a b");
        assert!(intro("le_trans", &g, &th.context).is_none());
    }
}
