//! Innermost-leftmost exhaustive rewriting with oriented equations.
//!
//! Rules are tried in declaration order at every position; the first rule
//! whose left-hand side matches wins. Permutative rules (left and right side
//! equal up to renaming, e.g. commutativity) are only applied when the
//! result is strictly smaller in the structural term order, which keeps
//! them terminating. Every rewrite call runs under a step budget.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::term::{Formula, Name, Subst, Term, Var};
use super::{Context, Goal, KernelError, Lemma, DEFAULT_REWRITE_BUDGET};

/// Label recorded in `used` sets for rules derived from goal hypotheses.
pub const HYPOTHESIS_LABEL: &str = "<hyp>";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Schematic {
    /// Every variable is a pattern variable (lemmas, defining equations).
    All,
    /// Only the listed variables are pattern variables (hypotheses).
    Only(Arc<BTreeSet<Name>>),
}

impl Schematic {
    pub fn contains(&self, v: &Var) -> bool {
        match self {
            Schematic::All => true,
            Schematic::Only(set) => set.contains(&v.name),
        }
    }
}

#[derive(Clone, Debug)]
pub struct RewriteRule {
    pub label: Name,
    pub lhs: Term,
    pub rhs: Term,
    pub schematic: Schematic,
    permutative: bool,
}

impl RewriteRule {
    pub fn new(label: Name, lhs: Term, rhs: Term, schematic: Schematic) -> Self {
        let permutative = is_variant(&lhs, &rhs);
        RewriteRule {
            label,
            lhs,
            rhs,
            schematic,
            permutative,
        }
    }

    fn apply(&self, t: &Term) -> Option<Term> {
        let mut s = Subst::new();
        let schematic = &self.schematic;
        if !self.lhs.match_into(t, &|v| schematic.contains(v), &mut s) {
            return None;
        }
        let out = self.rhs.subst(&s);
        if out == *t || (self.permutative && out > *t) {
            return None;
        }
        Some(out)
    }
}

/// A formula that rewrites to `True` (or to `False` when `negated`).
#[derive(Clone, Debug)]
pub struct Fact {
    pub label: Name,
    pub formula: Formula,
    pub negated: bool,
    pub schematic: Schematic,
}

impl Fact {
    fn from_formula(label: Name, f: &Formula, schematic: Schematic) -> Fact {
        match f {
            Formula::Not(inner) => Fact {
                label,
                formula: (**inner).clone(),
                negated: true,
                schematic,
            },
            other => Fact {
                label,
                formula: other.clone(),
                negated: false,
                schematic,
            },
        }
    }
}

/// Term rules plus formula facts, in application order.
#[derive(Clone, Debug, Default)]
pub struct RuleSet {
    pub terms: Vec<RewriteRule>,
    pub facts: Vec<Fact>,
}

impl RuleSet {
    pub fn defining_equations(ctx: &Context) -> RuleSet {
        let mut rs = RuleSet::default();
        for eq in ctx.equations() {
            rs.terms.push(RewriteRule::new(
                eq.label.clone(),
                eq.lhs.clone(),
                eq.rhs.clone(),
                Schematic::All,
            ));
        }
        rs
    }

    /// Defining equations, simp-tagged lemmas, then `extra` lemmas.
    pub fn simp_set(ctx: &Context, extra: &[&Lemma]) -> RuleSet {
        let mut rs = Self::defining_equations(ctx);
        for l in ctx.lemmas.iter().filter(|l| l.has(super::Attr::Simp)) {
            rs.add_lemma(l);
        }
        for l in extra {
            rs.add_lemma(l);
        }
        rs
    }

    /// Adds an unconditional lemma; conditional lemmas are ignored.
    pub fn add_lemma(&mut self, l: &Lemma) {
        if !l.hyps.is_empty() {
            return;
        }
        match &l.concl {
            Formula::Eq(lhs, rhs) => {
                if !matches!(lhs, Term::Var(_)) {
                    self.terms.push(RewriteRule::new(
                        l.label.clone(),
                        lhs.clone(),
                        rhs.clone(),
                        Schematic::All,
                    ));
                }
            }
            Formula::True => {}
            other => self
                .facts
                .push(Fact::from_formula(l.label.clone(), other, Schematic::All)),
        }
    }

    /// Turns the goal's hypotheses into rewrite rules and facts.
    pub fn add_hypotheses(&mut self, g: &Goal) {
        let schematic = Schematic::Only(Arc::new(g.generalized.clone()));
        let label: Name = Arc::from(HYPOTHESIS_LABEL);
        for h in &g.hyps {
            if let Formula::Eq(l, r) = h {
                let lhs_schematic = matches!(l, Term::Var(v) if schematic.contains(v));
                if l != r && !r.contains(l) && !lhs_schematic {
                    self.terms
                        .push(RewriteRule::new(label.clone(), l.clone(), r.clone(), schematic.clone()));
                }
            }
            if *h != Formula::True {
                self.facts.push(Fact::from_formula(label.clone(), h, schematic.clone()));
            }
        }
    }
}

/// Equal up to an injective renaming of variables.
fn is_variant(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, map: &mut Vec<(Name, Name)>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                if x.ty != y.ty {
                    return false;
                }
                for (p, q) in map.iter() {
                    if *p == x.name || *q == y.name {
                        return *p == x.name && *q == y.name;
                    }
                }
                map.push((x.name.clone(), y.name.clone()));
                true
            }
            (Term::Ctor(f, xs), Term::Ctor(g, ys)) | (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| go(x, y, map))
            }
            _ => false,
        }
    }
    a != b && go(a, b, &mut Vec::new())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rewritten<T> {
    pub result: T,
    pub changed: bool,
    pub used: BTreeSet<Name>,
}

struct Rewriter<'a> {
    rules: &'a RuleSet,
    budget: usize,
    steps: usize,
    used: BTreeSet<Name>,
}

impl Rewriter<'_> {
    fn tick(&mut self, label: &Name) -> Result<(), KernelError> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(KernelError::BudgetExhausted(self.budget));
        }
        self.used.insert(label.clone());
        Ok(())
    }

    fn norm(&mut self, t: &Term) -> Result<Term, KernelError> {
        let t = self.norm_args(t)?;
        self.root(t)
    }

    fn norm_args(&mut self, t: &Term) -> Result<Term, KernelError> {
        Ok(match t {
            Term::Var(_) => t.clone(),
            Term::Ctor(f, args) => Term::Ctor(f.clone(), self.norm_all(args)?),
            Term::App(f, args) => Term::App(f.clone(), self.norm_all(args)?),
        })
    }

    fn norm_all(&mut self, args: &[Term]) -> Result<Vec<Term>, KernelError> {
        args.iter().map(|a| self.norm(a)).collect()
    }

    fn root(&mut self, mut t: Term) -> Result<Term, KernelError> {
        'outer: loop {
            for rule in &self.rules.terms {
                if let Some(next) = rule.apply(&t) {
                    self.tick(&rule.label)?;
                    t = self.norm_args(&next)?;
                    continue 'outer;
                }
            }
            return Ok(t);
        }
    }

    fn formula(&mut self, f: &Formula) -> Result<Formula, KernelError> {
        let g = match f {
            Formula::True | Formula::False => f.clone(),
            Formula::Eq(a, b) => {
                let (a, b) = (self.norm(a)?, self.norm(b)?);
                simplify_eq(a, b)
            }
            Formula::Atom(p, args) => Formula::Atom(p.clone(), self.norm_all(args)?),
            Formula::Not(a) => mk_not(self.formula(a)?),
            Formula::And(a, b) => mk_and(self.formula(a)?, self.formula(b)?),
            Formula::Or(a, b) => mk_or(self.formula(a)?, self.formula(b)?),
            Formula::Implies(a, b) => mk_implies(self.formula(a)?, self.formula(b)?),
        };
        if matches!(g, Formula::True | Formula::False) {
            return Ok(g);
        }
        for fact in &self.rules.facts {
            let mut s = Subst::new();
            let schematic = &fact.schematic;
            if fact.formula.match_into(&g, &|v| schematic.contains(v), &mut s) {
                self.used.insert(fact.label.clone());
                return Ok(if fact.negated { Formula::False } else { Formula::True });
            }
        }
        Ok(g)
    }
}

/// Equality simplification: reflexivity, constructor clash, injectivity.
pub fn simplify_eq(a: Term, b: Term) -> Formula {
    if a == b {
        return Formula::True;
    }
    match (&a, &b) {
        (Term::Ctor(c, xs), Term::Ctor(d, ys)) => {
            if c != d || xs.len() != ys.len() {
                Formula::False
            } else {
                xs.iter()
                    .zip(ys)
                    .map(|(x, y)| simplify_eq(x.clone(), y.clone()))
                    .rev()
                    .fold(Formula::True, |acc, e| mk_and(e, acc))
            }
        }
        _ => Formula::Eq(a, b),
    }
}

pub fn mk_not(a: Formula) -> Formula {
    match a {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Not(inner) => *inner,
        other => Formula::negate(other),
    }
}

pub fn mk_and(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::True, x) | (x, Formula::True) => x,
        (Formula::False, _) | (_, Formula::False) => Formula::False,
        (x, y) if x == y => x,
        (x, y) => Formula::and(x, y),
    }
}

pub fn mk_or(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::True, _) | (_, Formula::True) => Formula::True,
        (Formula::False, x) | (x, Formula::False) => x,
        (x, y) if x == y => x,
        (x, y) => Formula::or(x, y),
    }
}

pub fn mk_implies(a: Formula, b: Formula) -> Formula {
    match (a, b) {
        (Formula::True, x) => x,
        (Formula::False, _) | (_, Formula::True) => Formula::True,
        (x, Formula::False) => mk_not(x),
        (x, y) if x == y => Formula::True,
        (x, y) => Formula::implies(x, y),
    }
}

pub fn rewrite_term(t: &Term, rules: &RuleSet, budget: usize) -> Result<Rewritten<Term>, KernelError> {
    let mut rw = Rewriter {
        rules,
        budget,
        steps: 0,
        used: BTreeSet::new(),
    };
    let result = rw.norm(t)?;
    Ok(Rewritten {
        changed: result != *t,
        result,
        used: rw.used,
    })
}

pub fn rewrite_formula(f: &Formula, rules: &RuleSet, budget: usize) -> Result<Rewritten<Formula>, KernelError> {
    let mut rw = Rewriter {
        rules,
        budget,
        steps: 0,
        used: BTreeSet::new(),
    };
    let result = rw.formula(f)?;
    Ok(Rewritten {
        changed: result != *f,
        result,
        used: rw.used,
    })
}

/// Normal form under the defining equations only.
pub fn normalize(t: &Term, ctx: &Context) -> Result<Term, KernelError> {
    rewrite_term(t, &RuleSet::defining_equations(ctx), DEFAULT_REWRITE_BUDGET).map(|r| r.result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::theory::parse_theory;

    const LISTS: &str = "
datatype nat = Zero | Suc nat
datatype list = Nil | Cons nat list
fun add Zero y = y
fun add (Suc x) y = Suc (add x y)
fun append Nil ys = ys
fun append (Cons x xs) ys = Cons x (append xs ys)
";

    fn v(n: &str, ty: &str) -> Term {
        Term::var(n, ty)
    }

    fn labels(r: &BTreeSet<Name>) -> Vec<&str> {
        r.iter().map(|l| &**l).collect()
    }

    #[test]
    fn defining_equation_fires() {
        let th = parse_theory(LISTS).unwrap();
        let rules = RuleSet::defining_equations(&th.context);
        let t = Term::app("add", vec![Term::ctor("Zero", vec![]), v("y", "nat")]);
        let r = rewrite_term(&t, &rules, DEFAULT_REWRITE_BUDGET).unwrap();
        assert_eq!(r.result, v("y", "nat"));
        assert!(r.changed);
        assert_eq!(labels(&r.used), vec!["add.1"]);
    }

    #[test]
    fn normal_form_is_unchanged() {
        let th = parse_theory(LISTS).unwrap();
        let rules = RuleSet::defining_equations(&th.context);
        let t = Term::app("add", vec![v("x", "nat"), Term::ctor("Zero", vec![])]);
        let r = rewrite_term(&t, &rules, DEFAULT_REWRITE_BUDGET).unwrap();
        assert!(!r.changed);
        assert!(r.used.is_empty());
    }

    #[test]
    fn append_of_singleton() {
        // Hand evaluation:
        //   append (Cons a Nil) ys  -> Cons a (append Nil ys)   [append.2]
        //                           -> Cons a ys                [append.1]
        let th = parse_theory(LISTS).unwrap();
        let rules = RuleSet::defining_equations(&th.context);
        let a = v("a", "nat");
        let t = Term::app(
            "append",
            vec![
                Term::ctor("Cons", vec![a.clone(), Term::ctor("Nil", vec![])]),
                v("ys", "list"),
            ],
        );
        let r = rewrite_term(&t, &rules, DEFAULT_REWRITE_BUDGET).unwrap();
        assert_eq!(r.result, Term::ctor("Cons", vec![a, v("ys", "list")]));
        assert_eq!(labels(&r.used), vec!["append.1", "append.2"]);
    }

    #[test]
    fn budget_exhaustion_is_an_error() {
        let th = parse_theory(LISTS).unwrap();
        let rules = RuleSet::defining_equations(&th.context);
        let mut t = Term::ctor("Zero", vec![]);
        for _ in 0..50 {
            t = Term::app("add", vec![Term::ctor("Suc", vec![Term::ctor("Zero", vec![])]), t]);
        }
        assert_eq!(rewrite_term(&t, &rules, 10), Err(KernelError::BudgetExhausted(10)));
        assert!(rewrite_term(&t, &rules, DEFAULT_REWRITE_BUDGET).is_ok());
    }

    #[test]
    fn permutative_rules_terminate() {
        let mut rules = RuleSet::default();
        let (x, y) = (v("x", "nat"), v("y", "nat"));
        rules.terms.push(RewriteRule::new(
            Arc::from("add_comm"),
            Term::app("add", vec![x.clone(), y.clone()]),
            Term::app("add", vec![y.clone(), x.clone()]),
            Schematic::All,
        ));
        let (a, b) = (v("a", "nat"), v("b", "nat"));
        let t1 = rewrite_term(&Term::app("add", vec![a.clone(), b.clone()]), &rules, 100).unwrap();
        let t2 = rewrite_term(&Term::app("add", vec![b, a]), &rules, 100).unwrap();
        assert_eq!(t1.result, t2.result);
    }

    #[test]
    fn formula_simplification() {
        let th = parse_theory(LISTS).unwrap();
        let rules = RuleSet::defining_equations(&th.context);
        let zero = Term::ctor("Zero", vec![]);
        let suc = |t| Term::ctor("Suc", vec![t]);
        let f = Formula::eq(Term::app("add", vec![zero.clone(), zero.clone()]), zero.clone());
        assert_eq!(rewrite_formula(&f, &rules, 100).unwrap().result, Formula::True);
        let clash = Formula::eq(suc(v("x", "nat")), zero.clone());
        assert_eq!(rewrite_formula(&clash, &rules, 100).unwrap().result, Formula::False);
        let inj = Formula::eq(suc(v("x", "nat")), suc(v("y", "nat")));
        assert_eq!(
            rewrite_formula(&inj, &rules, 100).unwrap().result,
            Formula::eq(v("x", "nat"), v("y", "nat"))
        );
    }

    #[test]
    fn rewriting_reaches_a_fixpoint() {
        let th = parse_theory(LISTS).unwrap();
        let rules = RuleSet::defining_equations(&th.context);
        let t = Term::app(
            "add",
            vec![
                Term::app("add", vec![Term::ctor("Suc", vec![v("x", "nat")]), v("y", "nat")]),
                Term::ctor("Suc", vec![Term::ctor("Zero", vec![])]),
            ],
        );
        let once = rewrite_term(&t, &rules, 1000).unwrap();
        let twice = rewrite_term(&once.result, &rules, 1000).unwrap();
        assert!(!twice.changed);
    }
}
