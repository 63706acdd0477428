//! Toy first-order logic backend: datatypes, recursive functions, a lemma
//! bank, goals and proof states.

pub mod eval;
pub mod induction;
pub mod rewrite;
pub mod term;
pub mod theory;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::lazy_stream::LazyStream;
pub use term::{name, Formula, Name, Subst, Term, Var};

/// Default number of rule applications a single rewrite call may perform.
pub const DEFAULT_REWRITE_BUDGET: usize = 10_000;

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum KernelError {
    #[error("rewrite step budget of {0} exhausted")]
    BudgetExhausted(usize),
    #[error("variable `{0}` is not of an inductive datatype")]
    NotInductable(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("rule `{0}` is not applicable to this goal")]
    RuleInapplicable(String),
    #[error("no lemma named `{0}`")]
    UnknownLemma(String),
    #[error("no goals")]
    NoGoals,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CtorSig {
    pub name: Name,
    pub args: Vec<Name>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Datatype {
    pub name: Name,
    pub ctors: Vec<CtorSig>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    pub label: Name,
    pub lhs: Term,
    pub rhs: Term,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Function {
    pub name: Name,
    pub arg_types: Vec<Name>,
    pub result: Name,
    pub equations: Vec<Equation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Attr {
    Simp,
    Intro,
    Elim,
    Induct,
}

impl Attr {
    pub fn parse(s: &str) -> Option<Attr> {
        Some(match s {
            "simp" => Attr::Simp,
            "intro" => Attr::Intro,
            "elim" => Attr::Elim,
            "induct" => Attr::Induct,
            _ => return None,
        })
    }
}

/// A proved fact: `hyps ==> concl`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma {
    pub label: Name,
    pub hyps: Vec<Formula>,
    pub concl: Formula,
    pub attrs: BTreeSet<Attr>,
}

impl Lemma {
    pub fn has(&self, attr: Attr) -> bool {
        self.attrs.contains(&attr)
    }

    pub fn symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for h in &self.hyps {
            h.collect_symbols(&mut out);
        }
        self.concl.collect_symbols(&mut out);
        out
    }
}

/// A backend-registered tactic reachable through `User "name"`.
pub type UserTactic = Arc<dyn Fn(&ProofState) -> LazyStream<ProofState> + Send + Sync>;

/// Background proof context. Immutable once built.
#[derive(Clone, Default)]
pub struct Context {
    pub datatypes: Vec<Datatype>,
    pub functions: Vec<Function>,
    /// Declared (uninterpreted) predicates and their argument types.
    pub preds: BTreeMap<Name, Vec<Name>>,
    pub lemmas: Vec<Lemma>,
    user_tactics: BTreeMap<Name, UserTactic>,
}

impl fmt::Debug for Context {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Context")
            .field("datatypes", &self.datatypes)
            .field("functions", &self.functions)
            .field("preds", &self.preds)
            .field("lemmas", &self.lemmas)
            .field("user_tactics", &self.user_tactics.keys().collect::<Vec<_>>())
            .finish()
    }
}

impl Context {
    pub fn datatype(&self, ty: &str) -> Option<&Datatype> {
        self.datatypes.iter().find(|d| &*d.name == ty)
    }

    pub fn ctor(&self, c: &str) -> Option<(&Datatype, &CtorSig)> {
        self.datatypes
            .iter()
            .find_map(|d| d.ctors.iter().find(|k| &*k.name == c).map(|k| (d, k)))
    }

    pub fn function(&self, f: &str) -> Option<&Function> {
        self.functions.iter().find(|g| &*g.name == f)
    }

    pub fn is_pred(&self, p: &str) -> bool {
        self.preds.contains_key(p)
    }

    pub fn lemma(&self, label: &str) -> Option<&Lemma> {
        self.lemmas.iter().find(|l| &*l.label == label)
    }

    pub fn equations(&self) -> impl Iterator<Item = &Equation> {
        self.functions.iter().flat_map(|f| f.equations.iter())
    }

    pub fn type_of(&self, t: &Term) -> Option<Name> {
        match t {
            Term::Var(v) => Some(v.ty.clone()),
            Term::Ctor(c, _) => self.ctor(c).map(|(d, _)| d.name.clone()),
            Term::App(f, _) => self.function(f).map(|g| g.result.clone()),
        }
    }

    /// Copy of the context whose lemma bank only holds lemmas declared before
    /// `label` (all lemmas if `label` is not a lemma).
    pub fn restricted_before(&self, label: &str) -> Context {
        let mut ctx = self.clone();
        if let Some(pos) = ctx.lemmas.iter().position(|l| &*l.label == label) {
            ctx.lemmas.truncate(pos);
        }
        ctx
    }

    pub fn register_user_tactic(&mut self, name: &str, tactic: UserTactic) {
        self.user_tactics.insert(Arc::from(name), tactic);
    }

    pub fn user_tactic(&self, name: &str) -> Option<&UserTactic> {
        self.user_tactics.get(name)
    }

    pub fn user_tactic_names(&self) -> impl Iterator<Item = &str> {
        self.user_tactics.keys().map(|k| &**k)
    }
}

/// A single proof obligation `hyps ==> concl`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Goal {
    pub label: Name,
    pub hyps: Vec<Formula>,
    pub concl: Formula,
    /// Variables that are universally quantified inside the hypotheses
    /// (produced by generalizing an induction).
    pub generalized: BTreeSet<Name>,
}

impl Goal {
    pub fn new(label: &str, hyps: Vec<Formula>, concl: Formula) -> Goal {
        Goal {
            label: Arc::from(label),
            hyps,
            concl,
            generalized: BTreeSet::new(),
        }
    }

    /// Same obligation, ignoring the label.
    pub fn same_obligation(&self, other: &Goal) -> bool {
        self.hyps == other.hyps && self.concl == other.concl && self.generalized == other.generalized
    }

    /// Free term variables (hypotheses first, then conclusion), excluding
    /// generalized ones.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for h in &self.hyps {
            h.collect_vars(&mut out);
        }
        self.concl.collect_vars(&mut out);
        out.retain(|v| !self.generalized.contains(&v.name));
        out
    }

    pub fn all_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        for h in &self.hyps {
            h.collect_vars(&mut out);
        }
        self.concl.collect_vars(&mut out);
        out
    }

    pub fn symbols(&self) -> BTreeSet<Name> {
        let mut out = BTreeSet::new();
        for h in &self.hyps {
            h.collect_symbols(&mut out);
        }
        self.concl.collect_symbols(&mut out);
        out
    }

    /// `h1 --> h2 --> ... --> concl`.
    pub fn as_formula(&self) -> Formula {
        self.hyps
            .iter()
            .rev()
            .fold(self.concl.clone(), |acc, h| Formula::implies(h.clone(), acc))
    }

    pub fn with_label(mut self, label: Name) -> Goal {
        self.label = label;
        self
    }
}

impl fmt::Display for Goal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.label)?;
        for h in &self.hyps {
            write!(f, "{h} ==> ")?;
        }
        write!(f, "{}", self.concl)
    }
}

/// Labels for goals split from `parent`: the parent's label if there is a
/// single child, `parent.1`, `parent.2`, ... otherwise.
pub fn child_labels(parent: &Name, n: usize) -> Vec<Name> {
    if n == 1 {
        vec![parent.clone()]
    } else {
        (1..=n).map(|i| Arc::from(format!("{parent}.{i}"))).collect()
    }
}

/// Focus stack of goal lists over a shared context. The last frame is the
/// active one.
#[derive(Clone)]
pub struct ProofState {
    frames: Vec<Arc<Vec<Goal>>>,
    ctx: Arc<Context>,
}

impl PartialEq for ProofState {
    fn eq(&self, other: &Self) -> bool {
        self.frames == other.frames
    }
}

impl Eq for ProofState {}

impl fmt::Debug for ProofState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProofState").field("frames", &self.frames).finish()
    }
}

impl ProofState {
    pub fn new(ctx: Arc<Context>, goals: Vec<Goal>) -> Self {
        ProofState {
            frames: vec![Arc::new(goals)],
            ctx,
        }
    }

    pub fn context(&self) -> &Arc<Context> {
        &self.ctx
    }

    pub fn goals(&self) -> &[Goal] {
        self.frames.last().expect("focus stack is never empty")
    }

    pub fn first_goal(&self) -> Option<&Goal> {
        self.goals().first()
    }

    pub fn goal_count(&self) -> usize {
        self.goals().len()
    }

    pub fn depth(&self) -> usize {
        self.frames.len()
    }

    pub fn frames(&self) -> &[Arc<Vec<Goal>>] {
        &self.frames
    }

    /// Fully solved: no focus and no active goals.
    pub fn is_solved(&self) -> bool {
        self.frames.len() == 1 && self.goals().is_empty()
    }

    /// Replace the active goal list; lower frames are shared untouched.
    pub fn with_goals(&self, goals: Vec<Goal>) -> ProofState {
        let mut frames = self.frames.clone();
        *frames.last_mut().expect("focus stack is never empty") = Arc::new(goals);
        ProofState {
            frames,
            ctx: self.ctx.clone(),
        }
    }

    /// Replace the first active goal with `replacement`.
    pub fn replace_first(&self, replacement: Vec<Goal>) -> ProofState {
        let mut goals = replacement;
        goals.extend(self.goals().iter().skip(1).cloned());
        self.with_goals(goals)
    }

    /// Move the first active goal into a new focus frame.
    pub fn push_focus(&self) -> Option<ProofState> {
        let first = self.first_goal()?.clone();
        let mut next = self.with_goals(self.goals()[1..].to_vec());
        next.frames.push(Arc::new(vec![first]));
        Some(next)
    }

    /// Drop an empty focus frame.
    pub fn pop_focus(&self) -> Option<ProofState> {
        if self.frames.len() < 2 || !self.goals().is_empty() {
            return None;
        }
        let mut frames = self.frames.clone();
        frames.pop();
        Some(ProofState {
            frames,
            ctx: self.ctx.clone(),
        })
    }

    /// Labels of every open goal, bottom frame last.
    pub fn open_labels(&self) -> Vec<String> {
        self.frames
            .iter()
            .rev()
            .flat_map(|f| f.iter().map(|g| g.label.to_string()))
            .collect()
    }
}

impl fmt::Display for ProofState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, frame) in self.frames.iter().enumerate().rev() {
            if i + 1 != self.frames.len() {
                writeln!(f, "-- focus level {i}")?;
            }
            for g in frame.iter() {
                writeln!(f, "  {g}")?;
            }
        }
        Ok(())
    }
}
