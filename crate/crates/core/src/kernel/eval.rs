//! Ground evaluation and small-scope enumeration of assignments.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::rewrite::{rewrite_term, RuleSet};
use super::term::{Formula, Name, Subst, Term, Var};
use super::{Context, Goal};

/// Step budget for evaluating one term.
pub const EVAL_BUDGET: usize = 10_000;

/// Cap on the number of assignments a single counterexample search checks.
pub const MAX_CHECKS: usize = 20_000;

/// Cap on the number of values enumerated per type and depth.
const MAX_VALUES: usize = 4_096;

/// Kleene three-valued truth.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    Unknown,
}

impl Truth {
    fn of(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }

    pub fn and(self, o: Truth) -> Truth {
        match (self, o) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::True, Truth::True) => Truth::True,
            _ => Truth::Unknown,
        }
    }

    pub fn or(self, o: Truth) -> Truth {
        !(!self).and(!o)
    }

    pub fn implies(self, o: Truth) -> Truth {
        (!self).or(o)
    }
}

impl std::ops::Not for Truth {
    type Output = Truth;

    fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }
}

/// Values for the free term variables and propositional atoms of a goal.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Assignment {
    pub terms: Vec<(Var, Term)>,
    pub props: Vec<(Name, bool)>,
}

impl Assignment {
    pub fn subst(&self) -> Subst {
        self.terms.iter().map(|(v, t)| (v.name.clone(), t.clone())).collect()
    }

    fn prop_map(&self) -> BTreeMap<Name, bool> {
        self.props.iter().cloned().collect()
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            let r = if first { Ok(()) } else { write!(f, ", ") };
            first = false;
            r
        };
        for (v, t) in &self.terms {
            sep(f)?;
            write!(f, "{} = {}", v.name, t)?;
        }
        for (p, b) in &self.props {
            sep(f)?;
            write!(f, "{} = {}", p, if *b { "True" } else { "False" })?;
        }
        Ok(())
    }
}

/// Big-step evaluator over the defining equations of a context.
pub struct Evaluator<'a> {
    ctx: &'a Context,
    rules: RuleSet,
}

impl<'a> Evaluator<'a> {
    pub fn new(ctx: &'a Context) -> Self {
        Evaluator {
            ctx,
            rules: RuleSet::defining_equations(ctx),
        }
    }

    /// Constructor value of `t` under `env`, if evaluation reaches one.
    pub fn term(&self, t: &Term, env: &Subst) -> Option<Term> {
        let r = rewrite_term(&t.subst(env), &self.rules, EVAL_BUDGET).ok()?;
        r.result.is_ground_value().then_some(r.result)
    }

    pub fn formula(&self, f: &Formula, env: &Subst, props: &BTreeMap<Name, bool>) -> Truth {
        match f {
            Formula::True => Truth::True,
            Formula::False => Truth::False,
            Formula::Eq(a, b) => match (self.term(a, env), self.term(b, env)) {
                (Some(x), Some(y)) => Truth::of(x == y),
                _ => Truth::Unknown,
            },
            Formula::Atom(p, args) if args.is_empty() && !self.ctx.is_pred(p) => {
                props.get(p).map_or(Truth::Unknown, |b| Truth::of(*b))
            }
            Formula::Atom(..) => Truth::Unknown,
            Formula::Not(a) => !self.formula(a, env, props),
            Formula::And(a, b) => self.formula(a, env, props).and(self.formula(b, env, props)),
            Formula::Or(a, b) => self.formula(a, env, props).or(self.formula(b, env, props)),
            Formula::Implies(a, b) => self.formula(a, env, props).implies(self.formula(b, env, props)),
        }
    }

    /// Truth of `hyps ==> concl`. Hypotheses over generalized variables are
    /// universally quantified and never count as established.
    pub fn goal(&self, g: &Goal, a: &Assignment) -> Truth {
        let env = a.subst();
        let props = a.prop_map();
        let hyps = g.hyps.iter().fold(Truth::True, |acc, h| {
            let generalized = g.generalized.iter().any(|v| h.contains_var(v));
            let t = self.formula(h, &env, &props);
            acc.and(if generalized && t == Truth::True {
                Truth::Unknown
            } else {
                t
            })
        });
        hyps.implies(self.formula(&g.concl, &env, &props))
    }

    /// Constructor values of type `ty` with depth at most `depth`, ordered
    /// by depth, then constructor order, then arguments.
    pub fn values(&self, ty: &str, depth: usize) -> Vec<Term> {
        let mut memo = BTreeMap::new();
        let mut all = values_upto(self.ctx, ty, depth, &mut memo);
        all.sort_by_key(Term::depth);
        all
    }
}

fn values_upto(ctx: &Context, ty: &str, depth: usize, memo: &mut BTreeMap<(String, usize), Vec<Term>>) -> Vec<Term> {
    if depth == 0 {
        return Vec::new();
    }
    if let Some(v) = memo.get(&(ty.to_string(), depth)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if let Some(dt) = ctx.datatype(ty) {
        for c in &dt.ctors {
            let arg_vals: Vec<Vec<Term>> = c.args.iter().map(|a| values_upto(ctx, a, depth - 1, memo)).collect();
            if arg_vals.iter().any(Vec::is_empty) {
                continue;
            }
            let mut idx = vec![0usize; arg_vals.len()];
            loop {
                out.push(Term::Ctor(
                    c.name.clone(),
                    idx.iter().zip(&arg_vals).map(|(i, vs)| vs[*i].clone()).collect(),
                ));
                if out.len() >= MAX_VALUES || !advance(&mut idx, &arg_vals.iter().map(Vec::len).collect::<Vec<_>>()) {
                    break;
                }
            }
            if out.len() >= MAX_VALUES {
                break;
            }
        }
    }
    memo.insert((ty.to_string(), depth), out.clone());
    out
}

/// Odometer increment, last position fastest. False when it wraps.
fn advance(idx: &mut [usize], lens: &[usize]) -> bool {
    for i in (0..idx.len()).rev() {
        idx[i] += 1;
        if idx[i] < lens[i] {
            return true;
        }
        idx[i] = 0;
    }
    false
}

/// Evaluates `f` with every free variable bound by `env`.
pub fn evaluate_ground(f: &Formula, env: &Subst, ctx: &Context) -> Truth {
    Evaluator::new(ctx).formula(f, env, &BTreeMap::new())
}

/// Searches for an assignment of the goal's free variables (constructor
/// depth at most `bound`) that makes every hypothesis true and the
/// conclusion false. Assignments are visited by increasing maximal depth,
/// then lexicographically with variables in name order, last fastest.
pub fn find_counterexample(g: &Goal, ctx: &Context, bound: usize) -> Option<Assignment> {
    let ev = Evaluator::new(ctx);
    let mut vars = g.free_vars();
    vars.sort_by(|a, b| a.name.cmp(&b.name));
    if vars.iter().any(|v| ctx.datatype(&v.ty).is_none()) {
        return None;
    }
    let mut props = Vec::new();
    for h in &g.hyps {
        h.collect_prop_atoms(&mut props);
    }
    g.concl.collect_prop_atoms(&mut props);
    props.retain(|p| !ctx.is_pred(p));
    let props: Vec<Name> = props.into_iter().collect::<BTreeSet<_>>().into_iter().collect();

    let all_values: Vec<Vec<Term>> = vars.iter().map(|v| ev.values(&v.ty, bound)).collect();
    let mut checks = 0;
    for d in 1..=bound {
        let pools: Vec<Vec<&Term>> = all_values
            .iter()
            .map(|vs| vs.iter().filter(|t| t.depth() <= d).collect())
            .collect();
        if pools.iter().any(Vec::is_empty) {
            continue;
        }
        let mut lens: Vec<usize> = pools.iter().map(Vec::len).collect();
        lens.extend(std::iter::repeat_n(2, props.len()));
        let mut idx = vec![0usize; lens.len()];
        loop {
            let terms: Vec<(Var, Term)> = vars
                .iter()
                .zip(&pools)
                .zip(&idx)
                .map(|((v, pool), i)| (v.clone(), pool[*i].clone()))
                .collect();
            let at_level = d == 1 || terms.iter().any(|(_, t)| t.depth() == d);
            if at_level {
                let a = Assignment {
                    terms,
                    props: props
                        .iter()
                        .cloned()
                        .zip(idx[vars.len()..].iter().map(|i| *i == 1))
                        .collect(),
                };
                if ev.goal(g, &a) == Truth::False {
                    return Some(a);
                }
                checks += 1;
                if checks >= MAX_CHECKS {
                    return None;
                }
            }
            if !advance(&mut idx, &lens) {
                break;
            }
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::theory::parse_theory;

    const NAT: &str = "
datatype nat = Zero | Suc nat
fun add Zero y = y
fun add (Suc x) y = Suc (add x y)
goal t: add x Zero = x
goal f: add x y = x
";

    fn num(n: usize) -> Term {
        (0..n).fold(Term::ctor("Zero", vec![]), |t, _| Term::ctor("Suc", vec![t]))
    }

    #[test]
    fn one_plus_one() {
        let th = parse_theory(NAT).unwrap();
        let f = Formula::eq(Term::app("add", vec![num(1), num(1)]), num(2));
        assert_eq!(evaluate_ground(&f, &Subst::new(), &th.context), Truth::True);
        assert_eq!(
            evaluate_ground(&Formula::False, &Subst::new(), &th.context),
            Truth::False
        );
        let x = Term::var("x", "nat");
        let env = Subst::from([(crate::kernel::name("x"), num(0))]);
        assert_eq!(
            evaluate_ground(&Formula::eq(x.clone(), x), &env, &th.context),
            Truth::True
        );
    }

    #[test]
    fn counterexample_is_the_first_in_enumeration_order() {
        let th = parse_theory(NAT).unwrap();
        assert!(find_counterexample(&th.goals[0], &th.context, 4).is_none());
        let cex = find_counterexample(&th.goals[1], &th.context, 4).unwrap();
        assert_eq!(cex.to_string(), "x = Zero, y = Suc Zero");
    }

    #[test]
    fn values_are_ordered_by_depth() {
        let th = parse_theory(NAT).unwrap();
        let ev = Evaluator::new(&th.context);
        assert_eq!(ev.values("nat", 3), vec![num(0), num(1), num(2)]);
    }

    #[test]
    fn propositional_atoms_are_enumerated() {
        let th = parse_theory("goal p: w ==> z").unwrap();
        let cex = find_counterexample(&th.goals[0], &th.context, 4).unwrap();
        assert_eq!(cex.to_string(), "w = True, z = False");
    }
}
