//! First-order terms and quantifier-free formulas.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

/// Interned-ish identifier. Cheap to clone.
pub type Name = Arc<str>;

pub fn name(s: &str) -> Name {
    Arc::from(s)
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Var {
    pub name: Name,
    /// Datatype of the variable.
    pub ty: Name,
}

impl Var {
    pub fn new(name: &str, ty: &str) -> Self {
        Var {
            name: Arc::from(name),
            ty: Arc::from(ty),
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Term {
    Var(Var),
    Ctor(Name, Vec<Term>),
    App(Name, Vec<Term>),
}

/// Variable name to replacement term.
pub type Subst = BTreeMap<Name, Term>;

impl Term {
    pub fn var(name: &str, ty: &str) -> Term {
        Term::Var(Var::new(name, ty))
    }

    pub fn ctor(name: &str, args: Vec<Term>) -> Term {
        Term::Ctor(Arc::from(name), args)
    }

    pub fn app(name: &str, args: Vec<Term>) -> Term {
        Term::App(Arc::from(name), args)
    }

    pub fn args(&self) -> &[Term] {
        match self {
            Term::Var(_) => &[],
            Term::Ctor(_, args) | Term::App(_, args) => args,
        }
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    /// Constructor nesting depth; variables and function applications count 1.
    pub fn depth(&self) -> usize {
        1 + self.args().iter().map(Term::depth).max().unwrap_or(0)
    }

    pub fn is_ground_value(&self) -> bool {
        match self {
            Term::Ctor(_, args) => args.iter().all(Term::is_ground_value),
            _ => false,
        }
    }

    pub fn contains_var(&self, v: &str) -> bool {
        match self {
            Term::Var(x) => &*x.name == v,
            Term::Ctor(_, args) | Term::App(_, args) => args.iter().any(|a| a.contains_var(v)),
        }
    }

    pub fn contains(&self, sub: &Term) -> bool {
        self == sub || self.args().iter().any(|a| a.contains(sub))
    }

    /// Free variables in left-to-right first-occurrence order.
    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        match self {
            Term::Var(v) => {
                if !out.contains(v) {
                    out.push(v.clone());
                }
            }
            Term::Ctor(_, args) | Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    pub fn collect_symbols(&self, out: &mut BTreeSet<Name>) {
        match self {
            Term::Var(_) => {}
            Term::Ctor(f, args) | Term::App(f, args) => {
                out.insert(f.clone());
                for a in args {
                    a.collect_symbols(out);
                }
            }
        }
    }

    pub fn subst(&self, s: &Subst) -> Term {
        match self {
            Term::Var(v) => s.get(&v.name).cloned().unwrap_or_else(|| self.clone()),
            Term::Ctor(f, args) => Term::Ctor(f.clone(), args.iter().map(|a| a.subst(s)).collect()),
            Term::App(f, args) => Term::App(f.clone(), args.iter().map(|a| a.subst(s)).collect()),
        }
    }

    /// One-way matching of `self` (a pattern) against `target`. Variables for
    /// which `is_schematic` is false must match themselves literally.
    pub fn match_into(&self, target: &Term, is_schematic: &dyn Fn(&Var) -> bool, s: &mut Subst) -> bool {
        match (self, target) {
            (Term::Var(v), _) if is_schematic(v) => {
                if let Term::Var(tv) = target {
                    if tv.ty != v.ty {
                        return false;
                    }
                }
                match s.get(&v.name) {
                    Some(bound) => bound == target,
                    None => {
                        s.insert(v.name.clone(), target.clone());
                        true
                    }
                }
            }
            (Term::Var(v), Term::Var(w)) => v == w,
            (Term::Ctor(f, xs), Term::Ctor(g, ys)) | (Term::App(f, xs), Term::App(g, ys)) => {
                f == g && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| x.match_into(y, is_schematic, s))
            }
            _ => false,
        }
    }
}

fn write_arg(f: &mut fmt::Formatter<'_>, t: &Term) -> fmt::Result {
    if t.args().is_empty() {
        write!(f, "{t}")
    } else {
        write!(f, "({t})")
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{}", v.name),
            Term::Ctor(c, args) | Term::App(c, args) => {
                write!(f, "{c}")?;
                for a in args {
                    write!(f, " ")?;
                    write_arg(f, a)?;
                }
                Ok(())
            }
        }
    }
}

/// Quantifier-free formula; free variables are implicitly universal.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub enum Formula {
    True,
    False,
    Eq(Term, Term),
    /// Predicate application. Zero-ary atoms whose name is not a declared
    /// predicate act as propositional variables.
    Atom(Name, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn atom(p: &str, args: Vec<Term>) -> Formula {
        Formula::Atom(Arc::from(p), args)
    }

    pub fn negate(a: Formula) -> Formula {
        Formula::Not(Box::new(a))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Right-nested conjunction; `True` for an empty list.
    pub fn conj(items: Vec<Formula>) -> Formula {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => Formula::True,
            Some(last) => it.fold(last, |acc, f| Formula::and(f, acc)),
        }
    }

    pub fn map_terms(&self, f: &dyn Fn(&Term) -> Term) -> Formula {
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Eq(a, b) => Formula::Eq(f(a), f(b)),
            Formula::Atom(p, args) => Formula::Atom(p.clone(), args.iter().map(f).collect()),
            Formula::Not(a) => Formula::negate(a.map_terms(f)),
            Formula::And(a, b) => Formula::and(a.map_terms(f), b.map_terms(f)),
            Formula::Or(a, b) => Formula::or(a.map_terms(f), b.map_terms(f)),
            Formula::Implies(a, b) => Formula::implies(a.map_terms(f), b.map_terms(f)),
        }
    }

    pub fn subst(&self, s: &Subst) -> Formula {
        self.map_terms(&|t| t.subst(s))
    }

    pub fn for_each_term(&self, f: &mut dyn FnMut(&Term)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Eq(a, b) => {
                f(a);
                f(b);
            }
            Formula::Atom(_, args) => {
                for a in args {
                    f(a);
                }
            }
            Formula::Not(a) => a.for_each_term(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.for_each_term(f);
                b.for_each_term(f);
            }
        }
    }

    pub fn collect_vars(&self, out: &mut Vec<Var>) {
        self.for_each_term(&mut |t| t.collect_vars(out));
    }

    pub fn contains_var(&self, v: &str) -> bool {
        let mut found = false;
        self.for_each_term(&mut |t| found |= t.contains_var(v));
        found
    }

    /// Function, constructor and predicate names occurring in the formula.
    pub fn collect_symbols(&self, out: &mut BTreeSet<Name>) {
        if let Formula::Atom(p, _) = self {
            out.insert(p.clone());
        }
        match self {
            Formula::Not(a) => a.collect_symbols(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_symbols(out);
                b.collect_symbols(out);
            }
            _ => self.for_each_term(&mut |t| t.collect_symbols(out)),
        }
    }

    /// Zero-ary atom names (propositional variables candidates) in order.
    pub fn collect_prop_atoms(&self, out: &mut Vec<Name>) {
        match self {
            Formula::Atom(p, args) if args.is_empty() => {
                if !out.contains(p) {
                    out.push(p.clone());
                }
            }
            Formula::Not(a) => a.collect_prop_atoms(out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.collect_prop_atoms(out);
                b.collect_prop_atoms(out);
            }
            _ => {}
        }
    }

    /// Formula-level matching with a term-level schematic predicate.
    pub fn match_into(&self, target: &Formula, is_schematic: &dyn Fn(&Var) -> bool, s: &mut Subst) -> bool {
        match (self, target) {
            (Formula::True, Formula::True) | (Formula::False, Formula::False) => true,
            (Formula::Eq(a, b), Formula::Eq(c, d)) => {
                a.match_into(c, is_schematic, s) && b.match_into(d, is_schematic, s)
            }
            (Formula::Atom(p, xs), Formula::Atom(q, ys)) => {
                p == q && xs.len() == ys.len() && xs.iter().zip(ys).all(|(x, y)| x.match_into(y, is_schematic, s))
            }
            (Formula::Not(a), Formula::Not(b)) => a.match_into(b, is_schematic, s),
            (Formula::And(a, b), Formula::And(c, d))
            | (Formula::Or(a, b), Formula::Or(c, d))
            | (Formula::Implies(a, b), Formula::Implies(c, d)) => {
                a.match_into(c, is_schematic, s) && b.match_into(d, is_schematic, s)
            }
            _ => false,
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) => 4,
            Formula::Eq(..) => 5,
            _ => 6,
        }
    }
}

fn write_prec(f: &mut fmt::Formatter<'_>, x: &Formula, min: u8) -> fmt::Result {
    if x.precedence() < min {
        write!(f, "({x})")
    } else {
        write!(f, "{x}")
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => write!(f, "True"),
            Formula::False => write!(f, "False"),
            Formula::Eq(a, b) => write!(f, "{a} = {b}"),
            Formula::Atom(p, args) => {
                write!(f, "{p}")?;
                for a in args {
                    write!(f, " ")?;
                    write_arg(f, a)?;
                }
                Ok(())
            }
            Formula::Not(a) => {
                write!(f, "~ ")?;
                write_prec(f, a, 4)
            }
            Formula::And(a, b) => {
                write_prec(f, a, 4)?;
                write!(f, " & ")?;
                write_prec(f, b, 3)
            }
            Formula::Or(a, b) => {
                write_prec(f, a, 3)?;
                write!(f, " | ")?;
                write_prec(f, b, 2)
            }
            Formula::Implies(a, b) => {
                write_prec(f, a, 2)?;
                write!(f, " --> ")?;
                write_prec(f, b, 1)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn zero() -> Term {
        Term::ctor("Zero", vec![])
    }

    fn suc(t: Term) -> Term {
        Term::ctor("Suc", vec![t])
    }

    #[test]
    fn display_parenthesizes_nested_arguments() {
        let t = Term::app("add", vec![suc(Term::var("x", "nat")), zero()]);
        assert_eq!(t.to_string(), "add (Suc x) Zero");
        let f = Formula::implies(
            Formula::and(Formula::atom("w", vec![]), Formula::atom("x", vec![])),
            Formula::or(Formula::atom("z", vec![]), Formula::negate(Formula::eq(zero(), zero()))),
        );
        assert_eq!(f.to_string(), "w & x --> z | ~ Zero = Zero");
    }

    #[test]
    fn matching_respects_rigid_variables() {
        let pat = Term::app("add", vec![Term::var("x", "nat"), zero()]);
        let target = Term::app("add", vec![suc(Term::var("y", "nat")), zero()]);
        let mut s = Subst::new();
        assert!(pat.match_into(&target, &|_| true, &mut s));
        assert_eq!(s[&name("x")], suc(Term::var("y", "nat")));
        let mut s = Subst::new();
        assert!(!pat.match_into(&target, &|_| false, &mut s));
    }

    #[test]
    fn non_linear_patterns_require_equal_bindings() {
        let x = Term::var("x", "nat");
        let pat = Term::app("add", vec![x.clone(), x]);
        let mut s = Subst::new();
        assert!(!pat.match_into(&Term::app("add", vec![zero(), suc(zero())]), &|_| true, &mut s));
    }

    #[test]
    fn vars_in_occurrence_order() {
        let f = Formula::eq(
            Term::app(
                "rev",
                vec![Term::app(
                    "append",
                    vec![Term::var("xs", "list"), Term::var("ys", "list")],
                )],
            ),
            Term::app("append", vec![Term::var("ys", "list"), Term::var("xs", "list")]),
        );
        let mut vs = Vec::new();
        f.collect_vars(&mut vs);
        let names: Vec<_> = vs.iter().map(|v| v.name.to_string()).collect();
        assert_eq!(names, vec!["xs", "ys"]);
    }
}
