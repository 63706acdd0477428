use std::fs;
use std::path::PathBuf;

use psl_core::kernel::eval::{evaluate_ground, find_counterexample, Truth};
use psl_core::kernel::theory::{parse_theory, Theory};
use psl_core::kernel::ProofState;
use psl_core::strategy_lang::{desugar, parse_strategy_file, Atom, DefaultTactic, PRELUDE};
use psl_core::tactics::{apply_step, eval, generate_dynamic, user_tactic_known, EvalEnv};

fn theory(name: &str) -> Theory {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name);
    parse_theory(&fs::read_to_string(p).unwrap()).unwrap()
}

fn all_goals(th: &Theory) -> ProofState {
    let labels: Vec<&str> = th.goals.iter().map(|g| &*g.label).collect();
    th.proof_state(&labels).unwrap()
}

fn lines(atom: Atom, s: &ProofState) -> Vec<(Option<String>, usize)> {
    eval(&atom, s, &EvalEnv::default())
        .iter()
        .map(|(e, _)| (e.script, e.result_index))
        .collect()
}

#[test]
fn erule_yields_both_conjunction_eliminations() {
    let s = all_goals(&theory("conj_elim.thy"));
    let out = lines(Atom::Default(DefaultTactic::Erule), &s);
    let conj_e = Some("apply (erule conjE)".to_string());
    assert_eq!(out[..2], [(conj_e.clone(), 0), (conj_e, 1)]);
}

#[test]
fn assertions_and_bookkeeping_atoms() {
    let th = theory("three_goals.thy");
    let s = all_goals(&th);
    assert!(lines(Atom::IsSolved, &s).is_empty());
    assert_eq!(lines(Atom::IsSolved, &s.with_goals(vec![])), vec![(None, 0)]);
    let deferred: Vec<ProofState> = eval(&Atom::Defer, &s, &EvalEnv::default())
        .iter()
        .map(|(_, s)| s)
        .collect();
    assert_eq!(deferred[0].open_labels(), vec!["g2", "g3", "g1"]);
    let env = EvalEnv::default();
    assert!(eval(&Atom::Transfer, &s, &env).is_empty());
    assert_eq!(env.diag.warnings().len(), 1);
}

#[test]
fn induction_variants_follow_the_enumeration_order() {
    let s = all_goals(&theory("rev_append.thy"));
    let rendered: Vec<String> = generate_dynamic(DefaultTactic::Induct, &s, 1024)
        .iter()
        .map(|t| t.to_string())
        .collect();
    let expected = [
        "induct xs",
        "induct xs rule: list_induct",
        "induct xs arbitrary: ys",
        "induct xs arbitrary: ys rule: list_induct",
        "induct ys",
        "induct ys rule: list_induct",
        "induct ys arbitrary: xs",
        "induct ys arbitrary: xs rule: list_induct",
        "induct xs ys",
        "induct xs ys rule: list_induct",
    ];
    assert_eq!(rendered, expected);
}

#[test]
fn dynamic_induction_drops_duplicate_results() {
    let s = all_goals(&theory("rev_append.thy"));
    let env = EvalEnv::default();
    let out: Vec<String> = eval(&Atom::Dynamic(DefaultTactic::Induct), &s, &env)
        .iter()
        .filter_map(|(e, _)| e.script)
        .collect();
    assert_eq!(env.diag.generated(), 10);
    // Each `rule: list_induct` variant repeats its plain twin; the rule
    // has one parameter, so the two-variable one fails.
    assert_eq!(env.diag.deduped(), 4);
    assert_eq!(env.diag.failed(), 1);
    let variants = generate_dynamic(DefaultTactic::Induct, &s, 1024);
    let mut firsts: Vec<Vec<String>> = Vec::new();
    let mut kept = 0;
    for v in &variants {
        let Some(r) = apply_step(v, &s).head().cloned() else {
            continue;
        };
        let shown: Vec<String> = r
            .goals()
            .iter()
            .map(|g| format!("{:?} {} {:?}", g.hyps, g.concl, g.generalized))
            .collect();
        if !firsts.contains(&shown) {
            firsts.push(shown);
            kept += apply_step(v, &s).iter().count();
        }
    }
    assert_eq!(out.len(), kept);
}

#[test]
fn quickcheck_finds_the_smallest_counterexample() {
    let th = theory("add_zero.thy");
    let g = th.goal("add_false").unwrap();
    let a = find_counterexample(g, &th.context, 4).unwrap();
    assert_eq!(a.to_string(), "x = Zero, y = Suc Zero");
    assert_eq!(evaluate_ground(&g.concl, &a.subst(), &th.context), Truth::False);
    assert!(find_counterexample(th.goal("add_zero").unwrap(), &th.context, 4).is_none());
    let s = th.proof_state(&["add_false"]).unwrap();
    let env = EvalEnv::default();
    assert!(eval(&Atom::Quickcheck, &s, &env).is_empty());
    assert_eq!(env.diag.counterexamples().len(), 1);
}

#[test]
fn prelude_defines_every_library_strategy() {
    let lib = parse_strategy_file(PRELUDE).unwrap();
    let names: Vec<&str> = lib.names().collect();
    assert_eq!(names.len(), 16);
    assert_eq!(names.first(), Some(&"Auto_Solve"));
    assert_eq!(names.last(), Some(&"Try_Hard"));
    let ctx = theory("add_zero.thy").context;
    for n in names {
        desugar(lib.get(n).unwrap(), &lib, &|u| user_tactic_known(&ctx, u)).unwrap();
    }
}
