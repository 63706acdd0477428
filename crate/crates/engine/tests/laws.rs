use proptest::prelude::*;

use psl_core::kernel::theory::parse_theory;
use psl_core::kernel::ProofState;
use psl_core::strategy_lang::{Atom, Combinator, CoreStrategy, DefaultTactic};
use psl_core::tactics::EvalEnv;
use psl_core::trace::{TraceEntry, TraceLog};
use psl_engine::Interp;

const THEORY: &str = "
datatype nat = Zero | Suc nat
fun add Zero y = y
fun add (Suc x) y = Suc (add x y)
goal add_zero: add x Zero = x
goal conj_elim: w & x ==> y & z ==> z
goal conj: a ==> b ==> a & b
";

fn states() -> Vec<ProofState> {
    let th = parse_theory(THEORY).unwrap();
    vec![
        th.proof_state(&["add_zero"]).unwrap(),
        th.proof_state(&["conj_elim"]).unwrap(),
        th.proof_state(&["conj", "conj_elim"]).unwrap(),
    ]
}

fn atom() -> impl Strategy<Value = CoreStrategy> {
    use DefaultTactic::*;
    prop_oneof![
        Just(Atom::Skip),
        Just(Atom::Fail),
        Just(Atom::Defer),
        Just(Atom::IsSolved),
        Just(Atom::Subgoal),
        Just(Atom::User("assumption".into())),
        Just(Atom::Default(Erule)),
        Just(Atom::Default(Rule)),
        Just(Atom::Default(Simp)),
        Just(Atom::Default(Auto)),
        Just(Atom::Default(Induct)),
    ]
    .prop_map(CoreStrategy::Atom)
}

fn strategy() -> impl Strategy<Value = CoreStrategy> {
    let leaf = prop_oneof![4 => atom(), 1 => Just(CoreStrategy::Skip), 1 => Just(CoreStrategy::Fail)];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| CoreStrategy::then(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| CoreStrategy::alt(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| CoreStrategy::or(a, b)),
            inner.clone().prop_map(|a| CoreStrategy::Rep(Box::new(a))),
            inner.clone().prop_map(|a| CoreStrategy::RepN(Box::new(a))),
            (1..3usize, inner).prop_map(|(n, a)| CoreStrategy::Comb(Combinator::Cut(n), vec![a])),
        ]
    })
}

type Outcome = Vec<(Vec<TraceEntry>, ProofState)>;

const LIMIT: usize = 4;

fn run_with(c: &CoreStrategy, s: &ProofState, threads: usize) -> Outcome {
    let i = Interp::new(EvalEnv::default(), LIMIT, threads, None);
    i.interp(c)(s.clone())
        .run(TraceLog::new())
        .iter()
        .map(|(l, st)| (l.entries(), st))
        .collect()
}

fn run(c: &CoreStrategy, s: &ProofState) -> Outcome {
    run_with(c, s, 1)
}

fn case() -> impl Strategy<Value = (CoreStrategy, ProofState)> {
    (strategy(), 0..3usize).prop_map(|(c, k)| (c, states().swap_remove(k)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn skip_is_a_unit_of_then((c, s) in case()) {
        let plain = run(&c, &s);
        prop_assert_eq!(&run(&CoreStrategy::then(CoreStrategy::Skip, c.clone()), &s), &plain);
        prop_assert_eq!(&run(&CoreStrategy::then(c, CoreStrategy::Skip), &s), &plain);
    }

    #[test]
    fn fail_is_a_zero((c, s) in case()) {
        prop_assert!(run(&CoreStrategy::then(CoreStrategy::Fail, c.clone()), &s).is_empty());
        prop_assert_eq!(run(&CoreStrategy::alt(CoreStrategy::Fail, c.clone()), &s), run(&c, &s));
        prop_assert_eq!(run(&CoreStrategy::alt(c.clone(), CoreStrategy::Fail), &s), run(&c, &s));
        prop_assert_eq!(run(&CoreStrategy::or(CoreStrategy::Fail, c.clone()), &s), run(&c, &s));
    }

    #[test]
    fn then_and_alt_associate((a, s) in case(), b in strategy(), c in strategy()) {
        let l = CoreStrategy::then(CoreStrategy::then(a.clone(), b.clone()), c.clone());
        let r = CoreStrategy::then(a.clone(), CoreStrategy::then(b.clone(), c.clone()));
        prop_assert_eq!(run(&l, &s), run(&r, &s));
        let l = CoreStrategy::alt(CoreStrategy::alt(a.clone(), b.clone()), c.clone());
        let r = CoreStrategy::alt(a, CoreStrategy::alt(b, c));
        prop_assert_eq!(run(&l, &s), run(&r, &s));
    }

    #[test]
    fn then_distributes_over_a_left_alt((a, s) in case(), b in strategy(), c in strategy()) {
        let l = CoreStrategy::then(CoreStrategy::alt(a.clone(), b.clone()), c.clone());
        let r = CoreStrategy::alt(CoreStrategy::then(a, c.clone()), CoreStrategy::then(b, c));
        prop_assert_eq!(run(&l, &s), run(&r, &s));
    }

    #[test]
    fn or_is_alt_of_left_when_left_succeeds((a, s) in case(), b in strategy()) {
        let left = run(&a, &s);
        let or = run(&CoreStrategy::or(a, b.clone()), &s);
        if left.is_empty() {
            prop_assert_eq!(or, run(&b, &s));
        } else {
            prop_assert_eq!(or, left);
        }
    }

    #[test]
    fn parallel_combinators_match_sequential_ones((a, s) in case(), b in strategy(), c in strategy()) {
        let xs = vec![a.clone(), b.clone(), c.clone()];
        let ors = CoreStrategy::or(a.clone(), CoreStrategy::or(b.clone(), c.clone()));
        let alts = CoreStrategy::alt(a.clone(), CoreStrategy::alt(b.clone(), c.clone()));
        let then = CoreStrategy::then(a.clone(), b.clone());
        let pors = CoreStrategy::Comb(Combinator::POrs, xs.clone());
        let palts = CoreStrategy::Comb(Combinator::PAlts, xs);
        let pall = CoreStrategy::Comb(Combinator::PThenAll, vec![a.clone(), b.clone()]);
        let pone = CoreStrategy::Comb(Combinator::PThenOne, vec![a, b]);
        for threads in [1, 4] {
            prop_assert_eq!(run_with(&pors, &s, threads), run(&ors, &s));
            prop_assert_eq!(run_with(&palts, &s, threads), run(&alts, &s));
            prop_assert_eq!(run_with(&pall, &s, threads), run(&then, &s));
            let mut first = run(&then, &s);
            first.truncate(1);
            prop_assert_eq!(run_with(&pone, &s, threads), first);
        }
    }
}
