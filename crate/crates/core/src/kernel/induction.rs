//! Structural and rule-based induction and case-analysis schemes.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use super::term::{Formula, Name, Subst, Term, Var};
use super::{child_labels, Attr, Context, Goal, KernelError, Lemma};

/// First name of the form `base`, `base1`, `base2`, ... not in `avoid`;
/// the chosen name is added to `avoid`.
pub fn fresh_name(base: &str, avoid: &mut BTreeSet<Name>) -> Name {
    let mut candidate: Name = Arc::from(base);
    let mut i = 1;
    while avoid.contains(&candidate) {
        candidate = Arc::from(format!("{base}{i}"));
        i += 1;
    }
    avoid.insert(candidate.clone());
    candidate
}

fn primed(base: &str, avoid: &mut BTreeSet<Name>) -> Name {
    let mut candidate = format!("{base}'");
    while avoid.contains(candidate.as_str()) {
        candidate.push('\'');
    }
    let n: Name = Arc::from(candidate);
    avoid.insert(n.clone());
    n
}

fn var_names(g: &Goal) -> BTreeSet<Name> {
    g.all_vars().into_iter().map(|v| v.name).collect()
}

fn type_initial(ty: &str) -> String {
    ty.chars().next().map(|c| c.to_string()).unwrap_or_else(|| "v".into())
}

/// The part of a goal that depends on the induction variable.
struct Motive {
    /// Hypotheses not mentioning the variable; they stay fixed.
    fixed: Vec<Formula>,
    /// Hypotheses mentioning the variable, carried into every case.
    pulled: Vec<Formula>,
    concl: Formula,
    var: Var,
}

impl Motive {
    fn of(g: &Goal, var: &Var) -> Motive {
        let (pulled, fixed) = g.hyps.iter().cloned().partition(|h| h.contains_var(&var.name));
        Motive {
            fixed,
            pulled,
            concl: g.concl.clone(),
            var: var.clone(),
        }
    }

    fn at(&self, t: &Term) -> (Vec<Formula>, Formula) {
        let s = Subst::from([(self.var.name.clone(), t.clone())]);
        (self.pulled.iter().map(|h| h.subst(&s)).collect(), self.concl.subst(&s))
    }

    /// The motive at `t` as one formula, with `arbitrary` variables renamed
    /// through `renaming`.
    fn hypothesis_at(&self, t: &Term, renaming: &Subst) -> Formula {
        let (pulled, concl) = self.at(t);
        let f = pulled.into_iter().rev().fold(concl, |acc, h| Formula::implies(h, acc));
        f.subst(renaming)
    }
}

/// Renaming of the arbitrary variables to primed names, plus the new
/// generalized set.
fn generalize(g: &Goal, arbitrary: &[Var], avoid: &mut BTreeSet<Name>) -> (Subst, BTreeSet<Name>) {
    let mut s = Subst::new();
    let mut generalized = g.generalized.clone();
    for v in arbitrary {
        let p = primed(&v.name, avoid);
        s.insert(
            v.name.clone(),
            Term::Var(Var {
                name: p.clone(),
                ty: v.ty.clone(),
            }),
        );
        generalized.insert(p);
    }
    (s, generalized)
}

fn check_var(g: &Goal, v: &Var, ctx: &Context) -> Result<(), KernelError> {
    if !g.all_vars().contains(v) {
        return Err(KernelError::UnknownVariable(v.name.to_string()));
    }
    if ctx.datatype(&v.ty).is_none() || g.generalized.contains(&v.name) {
        return Err(KernelError::NotInductable(v.name.to_string()));
    }
    Ok(())
}

/// Structural induction (or case analysis when `with_ih` is false) on one
/// variable over its datatype's constructors.
fn structural(g: &Goal, var: &Var, arbitrary: &[Var], ctx: &Context, with_ih: bool) -> Result<Vec<Goal>, KernelError> {
    check_var(g, var, ctx)?;
    let dt = ctx.datatype(&var.ty).expect("checked above");
    let motive = Motive::of(g, var);
    let mut out = Vec::new();
    let labels = child_labels(&g.label, dt.ctors.len());
    for (ctor, label) in dt.ctors.iter().zip(labels) {
        let mut avoid = var_names(g);
        avoid.remove(&var.name);
        let mut reused = false;
        let mut args = Vec::new();
        for ty in &ctor.args {
            let name = if *ty == var.ty && !reused {
                reused = true;
                avoid.insert(var.name.clone());
                var.name.clone()
            } else {
                fresh_name(&type_initial(ty), &mut avoid)
            };
            args.push(Var { name, ty: ty.clone() });
        }
        let (renaming, generalized) = generalize(g, arbitrary, &mut avoid);
        let mut hyps = motive.fixed.clone();
        if with_ih {
            for a in args.iter().filter(|a| a.ty == var.ty) {
                hyps.push(motive.hypothesis_at(&Term::Var(a.clone()), &renaming));
            }
        }
        let instance = Term::Ctor(ctor.name.clone(), args.into_iter().map(Term::Var).collect());
        let (pulled, concl) = motive.at(&instance);
        hyps.extend(pulled);
        out.push(Goal {
            label,
            hyps,
            concl,
            generalized: if with_ih && !arbitrary.is_empty() {
                generalized
            } else {
                g.generalized.clone()
            },
        });
    }
    Ok(out)
}

/// Shape of an induction rule: `cases ==> P v1 .. vk` with `P` a motive
/// predicate and distinct variables `vi`.
pub struct RuleShape<'a> {
    pub motive: &'a Name,
    pub params: Vec<&'a Var>,
}

pub fn rule_shape<'a>(lemma: &'a Lemma, ctx: &Context) -> Option<RuleShape<'a>> {
    let Formula::Atom(p, args) = &lemma.concl else {
        return None;
    };
    if ctx.is_pred(p) || args.is_empty() {
        return None;
    }
    let mut params = Vec::new();
    for a in args {
        match a {
            Term::Var(v) if !params.contains(&v) => params.push(v),
            _ => return None,
        }
    }
    Some(RuleShape { motive: p, params })
}

/// Whether `rule` can be used for induction (or cases) on `vars`: it is
/// tagged `induct`, has the motive shape, and its parameters agree with the
/// variables in number and type.
pub fn rule_applicable(lemma: &Lemma, vars: &[Var], ctx: &Context) -> bool {
    lemma.has(Attr::Induct)
        && rule_shape(lemma, ctx).is_some_and(|shape| {
            shape.params.len() == vars.len() && shape.params.iter().zip(vars).all(|(p, v)| p.ty == v.ty)
        })
}

/// Splits `a --> b --> c` into premises `[a, b]` and conclusion `c`.
fn premises(f: &Formula) -> (Vec<&Formula>, &Formula) {
    let mut prems = Vec::new();
    let mut cur = f;
    while let Formula::Implies(a, b) = cur {
        prems.push(&**a);
        cur = b;
    }
    (prems, cur)
}

fn by_rule(
    g: &Goal,
    vars: &[Var],
    arbitrary: &[Var],
    label: &str,
    ctx: &Context,
    with_ih: bool,
) -> Result<Vec<Goal>, KernelError> {
    for v in vars {
        check_var(g, v, ctx)?;
    }
    let lemma = ctx
        .lemma(label)
        .ok_or_else(|| KernelError::UnknownLemma(label.to_string()))?;
    if !rule_applicable(lemma, vars, ctx) {
        return Err(KernelError::RuleInapplicable(label.to_string()));
    }
    let shape = rule_shape(lemma, ctx).expect("checked above");
    let motive_name = shape.motive.clone();
    // The motive over all rule parameters at once.
    let (pulled, fixed): (Vec<Formula>, Vec<Formula>) = g
        .hyps
        .iter()
        .cloned()
        .partition(|h| vars.iter().any(|v| h.contains_var(&v.name)));
    let instantiate = |args: &[Term]| -> (Vec<Formula>, Formula) {
        let s: Subst = vars.iter().map(|v| v.name.clone()).zip(args.iter().cloned()).collect();
        (pulled.iter().map(|h| h.subst(&s)).collect(), g.concl.subst(&s))
    };
    let motive_app = |f: &Formula| -> Option<Vec<Term>> {
        match f {
            Formula::Atom(p, args) if *p == motive_name && args.len() == vars.len() => Some(args.clone()),
            _ => None,
        }
    };
    let mut out = Vec::new();
    let labels = child_labels(&g.label, lemma.hyps.len());
    for (case, label) in lemma.hyps.iter().zip(labels) {
        let mut avoid = var_names(g);
        for v in vars {
            avoid.remove(&v.name);
        }
        let mut locals = Vec::new();
        case.collect_vars(&mut locals);
        // A rule variable in motive position `i` of a premise takes the name
        // of the i-th induction variable, as structural induction does.
        let mut preferred: BTreeMap<Name, Name> = BTreeMap::new();
        for p in premises(case).0 {
            for (i, arg) in motive_app(p).into_iter().flatten().enumerate() {
                if let Term::Var(v) = arg {
                    preferred.entry(v.name).or_insert_with(|| vars[i].name.clone());
                }
            }
        }
        locals.sort_by_key(|v| !preferred.contains_key(&v.name));
        let mut rename = Subst::new();
        for v in &locals {
            let n = fresh_name(preferred.get(&v.name).unwrap_or(&v.name), &mut avoid);
            rename.insert(
                v.name.clone(),
                Term::Var(Var {
                    name: n,
                    ty: v.ty.clone(),
                }),
            );
        }
        let case = case.subst(&rename);
        let (prems, concl) = premises(&case);
        let Some(target) = motive_app(concl) else {
            return Err(KernelError::RuleInapplicable(label.to_string()));
        };
        let (renaming, generalized) = generalize(g, arbitrary, &mut avoid);
        let mut hyps = fixed.clone();
        for p in prems {
            match motive_app(p) {
                Some(args) => {
                    if with_ih {
                        let (ph, pc) = instantiate(&args);
                        let ih = ph.into_iter().rev().fold(pc, |acc, h| Formula::implies(h, acc));
                        hyps.push(ih.subst(&renaming));
                    }
                }
                None => hyps.push(p.clone()),
            }
        }
        let (ph, pc) = instantiate(&target);
        hyps.extend(ph);
        out.push(Goal {
            label,
            hyps,
            concl: pc,
            generalized: if with_ih && !arbitrary.is_empty() {
                generalized
            } else {
                g.generalized.clone()
            },
        });
    }
    Ok(out)
}

/// Induction on `vars` (nested left to right without a rule), generalizing
/// `arbitrary` in the induction hypotheses.
pub fn induction_scheme(
    g: &Goal,
    vars: &[Var],
    arbitrary: &[Var],
    rule: Option<&str>,
    ctx: &Context,
) -> Result<Vec<Goal>, KernelError> {
    if vars.is_empty() {
        return Err(KernelError::NotInductable(String::new()));
    }
    if let Some(v) = vars.iter().find(|v| arbitrary.contains(v)) {
        return Err(KernelError::NotInductable(v.name.to_string()));
    }
    if let Some(r) = rule {
        return by_rule(g, vars, arbitrary, r, ctx, true);
    }
    let mut goals = vec![g.clone()];
    for v in vars {
        let mut next = Vec::new();
        for sub in &goals {
            next.extend(structural(sub, v, arbitrary, ctx, true)?);
        }
        goals = next;
    }
    Ok(goals)
}

/// Case analysis on one variable.
pub fn cases_scheme(g: &Goal, var: &Var, rule: Option<&str>, ctx: &Context) -> Result<Vec<Goal>, KernelError> {
    match rule {
        Some(r) => by_rule(g, std::slice::from_ref(var), &[], r, ctx, false),
        None => structural(g, var, &[], ctx, false),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::theory::parse_theory;

    const NAT: &str = "
datatype nat = Zero | Suc nat
fun add Zero y = y
fun add (Suc x) y = Suc (add x y)
goal g: add x Zero = x
goal h: add x y = add y x
";

    fn zero() -> Term {
        Term::ctor("Zero", vec![])
    }

    fn x() -> Term {
        Term::var("x", "nat")
    }

    #[test]
    fn nat_induction_matches_the_hand_written_schema() {
        let th = parse_theory(NAT).unwrap();
        let g = &th.goals[0];
        let subs = induction_scheme(g, &[Var::new("x", "nat")], &[], None, &th.context).unwrap();
        let add = |a, b| Term::app("add", vec![a, b]);
        let suc = |a| Term::ctor("Suc", vec![a]);
        let base = Goal::new("g.1", vec![], Formula::eq(add(zero(), zero()), zero()));
        let step = Goal::new(
            "g.2",
            vec![Formula::eq(add(x(), zero()), x())],
            Formula::eq(add(suc(x()), zero()), suc(x())),
        );
        assert_eq!(subs, vec![base, step]);
    }

    #[test]
    fn arbitrary_variables_are_primed_in_the_hypothesis() {
        let th = parse_theory(NAT).unwrap();
        let g = &th.goals[1];
        let subs = induction_scheme(g, &[Var::new("x", "nat")], &[Var::new("y", "nat")], None, &th.context).unwrap();
        let step = &subs[1];
        let yp = Term::var("y'", "nat");
        assert_eq!(
            step.hyps,
            vec![Formula::eq(
                Term::app("add", vec![x(), yp.clone()]),
                Term::app("add", vec![yp, x()])
            )]
        );
        assert!(step.generalized.contains("y'"));
        assert!(step.concl.contains_var("y"));
    }

    #[test]
    fn unknown_rule_is_a_failure() {
        let th = parse_theory(NAT).unwrap();
        let g = &th.goals[0];
        assert!(induction_scheme(g, &[Var::new("x", "nat")], &[], Some("nope"), &th.context).is_err());
        assert!(induction_scheme(g, &[Var::new("z", "nat")], &[], None, &th.context).is_err());
    }

    #[test]
    fn nested_induction_multiplies_cases() {
        let th = parse_theory(NAT).unwrap();
        let g = &th.goals[1];
        let subs = induction_scheme(g, &[Var::new("x", "nat"), Var::new("y", "nat")], &[], None, &th.context).unwrap();
        assert_eq!(subs.len(), 4);
        assert_eq!(&*subs[3].label, "h.2.2");
    }

    #[test]
    fn rule_induction_agrees_with_structural_on_the_structural_rule() {
        let text = "
datatype nat = Zero | Suc nat
fun add Zero y = y
fun add (Suc x) y = Suc (add x y)
lemma [induct] nat_induct: P Zero ==> (P x --> P (Suc x)) ==> P x
goal g: add x Zero = x
";
        let th = parse_theory(text).unwrap();
        let g = &th.goals[0];
        let v = [Var::new("x", "nat")];
        let a = induction_scheme(g, &v, &[], None, &th.context).unwrap();
        let b = induction_scheme(g, &v, &[], Some("nat_induct"), &th.context).unwrap();
        assert_eq!(a, b);
        let c = cases_scheme(g, &v[0], None, &th.context).unwrap();
        assert!(c[1].hyps.is_empty());
    }
}
