//! Runtime generation of tactic variants from goal-derived modifiers, and
//! lazy removal of variants with duplicate results.

use std::sync::Arc;

use crate::kernel::induction::{rule_applicable, rule_shape};
use crate::kernel::{Attr, Goal, Name, ProofState, Var};
use crate::lazy_stream::LazyStream;
use crate::strategy_lang::DefaultTactic;

use super::hammer::relevant_lemmas;
use super::rules::{elim_rule_names, intro_rule_names};
use super::script::ScriptTactic;
use super::step::apply_step;
use super::Diagnostics;

/// Extra lemmas considered by `Dynamic (Simp)` and `Dynamic (Auto)`.
const DYNAMIC_SIMP_LEMMAS: usize = 3;

/// Index subsets of `0..n` with sizes in `sizes`, by size and then
/// lexicographically.
fn subsets(n: usize, sizes: impl IntoIterator<Item = usize>) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    for k in sizes {
        go(0, n, k, &mut Vec::new(), &mut out);
    }
    out
}

fn inductable(g: &Goal, s: &ProofState) -> Vec<Var> {
    g.free_vars()
        .into_iter()
        .filter(|v| s.context().datatype(&v.ty).is_some())
        .collect()
}

fn names(vs: &[Var]) -> Vec<Name> {
    vs.iter().map(|v| v.name.clone()).collect()
}

fn induct_variants(g: &Goal, s: &ProofState, cap: usize) -> Vec<ScriptTactic> {
    let ctx = s.context();
    let free = g.free_vars();
    let candidates = inductable(g, s);
    let rules: Vec<Name> = ctx
        .lemmas
        .iter()
        .filter(|l| l.has(Attr::Induct))
        .filter(|l| {
            rule_shape(l, ctx).is_some_and(|shape| shape.params.iter().all(|p| candidates.iter().any(|v| v.ty == p.ty)))
        })
        .map(|l| l.label.clone())
        .collect();
    let rule_options: Vec<Option<Name>> = std::iter::once(None).chain(rules.into_iter().map(Some)).collect();
    let var_choices = subsets(candidates.len(), 1..=candidates.len());
    let remaining = |chosen: &[usize]| -> Vec<Var> {
        let picked: Vec<&Var> = chosen.iter().map(|i| &candidates[*i]).collect();
        free.iter().filter(|v| !picked.contains(v)).cloned().collect()
    };
    let raw: usize = var_choices
        .iter()
        .map(|c| (1usize << remaining(c).len().min(usize::BITS as usize - 2)).saturating_mul(rule_options.len()))
        .fold(0, usize::saturating_add);
    let capped = raw > cap;
    let mut out = Vec::new();
    for chosen in &var_choices {
        let vars: Vec<Var> = chosen.iter().map(|i| candidates[*i].clone()).collect();
        let rest = remaining(chosen);
        let arbitrary: Vec<Vec<Var>> = if capped {
            let mut opts = vec![Vec::new()];
            if !rest.is_empty() {
                opts.push(rest.clone());
            }
            opts
        } else {
            subsets(rest.len(), 0..=rest.len())
                .into_iter()
                .map(|idx| idx.into_iter().map(|i| rest[i].clone()).collect())
                .collect()
        };
        for arb in &arbitrary {
            for rule in &rule_options {
                out.push(ScriptTactic::Induct {
                    vars: names(&vars),
                    arbitrary: names(arb),
                    rule: rule.clone(),
                });
            }
        }
    }
    out
}

fn cases_variants(g: &Goal, s: &ProofState) -> Vec<ScriptTactic> {
    let ctx = s.context();
    let mut out = Vec::new();
    for v in inductable(g, s) {
        out.push(ScriptTactic::Cases {
            var: v.name.clone(),
            rule: None,
        });
        for l in ctx
            .lemmas
            .iter()
            .filter(|l| rule_applicable(l, std::slice::from_ref(&v), ctx))
        {
            out.push(ScriptTactic::Cases {
                var: v.name.clone(),
                rule: Some(l.label.clone()),
            });
        }
    }
    out
}

fn simp_variants(kind: DefaultTactic, g: &Goal, s: &ProofState) -> Vec<ScriptTactic> {
    let ctx = s.context();
    let extra: Vec<Name> = relevant_lemmas(g, ctx, usize::MAX)
        .into_iter()
        .filter(|l| l.hyps.is_empty() && !l.has(Attr::Simp))
        .take(DYNAMIC_SIMP_LEMMAS)
        .map(|l| l.label.clone())
        .collect();
    subsets(extra.len(), 0..=extra.len())
        .into_iter()
        .map(|idx| {
            let add: Vec<Name> = idx.into_iter().map(|i| extra[i].clone()).collect();
            match kind {
                DefaultTactic::Auto => ScriptTactic::Auto { simp_add: add },
                _ => ScriptTactic::Simp { add },
            }
        })
        .collect()
}

/// Whether variants of `kind` are combined with APPEND (all results of all
/// distinct variants) rather than ORELSE (the first successful variant).
pub fn combines_with_append(kind: DefaultTactic) -> bool {
    !matches!(kind, DefaultTactic::Simp | DefaultTactic::Auto)
}

/// Whether `Dynamic (kind)` is supported.
pub fn is_dynamic_kind(kind: DefaultTactic) -> bool {
    use DefaultTactic::*;
    matches!(kind, Induct | InductTac | Cases | CaseTac | Simp | Auto | Rule | Erule)
}

/// Variants of `kind` for the first goal of `s`, in enumeration order.
/// `cap` bounds the raw number of induction modifier combinations.
pub fn generate_dynamic(kind: DefaultTactic, s: &ProofState, cap: usize) -> Vec<ScriptTactic> {
    let Some(g) = s.first_goal() else {
        return Vec::new();
    };
    match kind {
        DefaultTactic::Induct | DefaultTactic::InductTac => induct_variants(g, s, cap),
        DefaultTactic::Cases | DefaultTactic::CaseTac => cases_variants(g, s),
        DefaultTactic::Simp | DefaultTactic::Auto => simp_variants(kind, g, s),
        DefaultTactic::Rule => intro_rule_names(s.context())
            .into_iter()
            .map(|r| ScriptTactic::Rule(Arc::from(r)))
            .collect(),
        DefaultTactic::Erule => elim_rule_names(s.context())
            .into_iter()
            .map(|r| ScriptTactic::Erule(Arc::from(r)))
            .collect(),
        _ => Vec::new(),
    }
}

fn same_goals(a: &[Goal], b: &[Goal]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same_obligation(y))
}

/// All results of every variant whose first result differs from the first
/// result of each earlier kept variant, tagged with the variant and the
/// result's index in its own stream. A variant runs only once the results
/// of the previous kept ones are exhausted.
pub fn dedup_variants(
    variants: Vec<ScriptTactic>,
    s: &ProofState,
    diag: Arc<Diagnostics>,
) -> LazyStream<(ScriptTactic, usize, ProofState)> {
    dedup_from(Arc::new(variants), 0, Arc::new(Vec::new()), s.clone(), diag)
}

fn dedup_from(
    variants: Arc<Vec<ScriptTactic>>,
    mut i: usize,
    kept: Arc<Vec<Vec<Goal>>>,
    s: ProofState,
    diag: Arc<Diagnostics>,
) -> LazyStream<(ScriptTactic, usize, ProofState)> {
    LazyStream::suspend(move || {
        while i < variants.len() {
            let tac = variants[i].clone();
            i += 1;
            let results = apply_step(&tac, &s);
            let Some(first) = results.head() else {
                diag.note_failed();
                continue;
            };
            if kept.iter().any(|k| same_goals(k, first.goals())) {
                diag.note_deduped();
                continue;
            }
            let mut now_kept = (*kept).clone();
            now_kept.push(first.goals().to_vec());
            let rest = dedup_from(variants.clone(), i, Arc::new(now_kept), s.clone(), diag.clone());
            return results.enumerate().map(move |(k, st)| (tac.clone(), k, st)).plus(rest);
        }
        LazyStream::empty()
    })
}

/// Results of the first variant that succeeds, tagged like
/// [`dedup_variants`].
pub fn first_success(
    variants: Vec<ScriptTactic>,
    s: &ProofState,
    diag: Arc<Diagnostics>,
) -> LazyStream<(ScriptTactic, usize, ProofState)> {
    let s = s.clone();
    LazyStream::suspend(move || {
        for tac in variants {
            let results = apply_step(&tac, &s);
            if results.is_empty() {
                diag.note_failed();
                continue;
            }
            return results.enumerate().map(move |(k, st)| (tac.clone(), k, st));
        }
        LazyStream::empty()
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_are_ordered_by_size_then_lexicographically() {
        assert_eq!(
            subsets(3, 0..=3),
            vec![
                vec![],
                vec![0],
                vec![1],
                vec![2],
                vec![0, 1],
                vec![0, 2],
                vec![1, 2],
                vec![0, 1, 2]
            ]
        );
        assert_eq!(subsets(0, [1]), Vec::<Vec<usize>>::new());
    }
}
