//! Atomic tactics: the evaluation of strategy atoms on proof states.
//!
//! Every step that leaves script text is produced by [`apply_step`] on the
//! rendered [`ScriptTactic`], and its result index is the position in that
//! step's own result stream. Replaying the text with the index therefore
//! reproduces the state without search.

mod dynamic;
mod hammer;
mod prove;
mod rules;
mod script;
mod simp;
mod step;

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use crate::kernel::eval::{find_counterexample, Assignment};
use crate::kernel::ProofState;
use crate::lazy_stream::LazyStream;
use crate::strategy_lang::{Atom, DefaultTactic};
use crate::trace::TraceEntry;

pub use dynamic::{combines_with_append, dedup_variants, first_success, generate_dynamic, is_dynamic_kind};
pub use hammer::{hammer, relevant_lemmas};
pub use rules::{elim_rule_names, intro_rule_names, ELIM_RULES, INTRO_RULES};
pub use script::{ScriptParseError, ScriptTactic};
pub use step::{apply_step, FASTFORCE_DEPTH};

/// Names accepted by `User "..."` without registration.
pub const BUILTIN_USER_TACTICS: [&str; 1] = ["assumption"];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalConfig {
    /// Maximum raw modifier combinations per `Dynamic (Induct)`.
    pub variant_cap: usize,
    /// Constructor depth explored by `Quickcheck`.
    pub quickcheck_bound: usize,
    /// Constructor depth explored by `Nitpick`.
    pub nitpick_bound: usize,
    /// Lemmas handed to `Hammer` by the relevance filter.
    pub hammer_lemmas: usize,
}

impl Default for EvalConfig {
    fn default() -> Self {
        EvalConfig {
            variant_cap: 1 << 10,
            quickcheck_bound: 4,
            nitpick_bound: 6,
            hammer_lemmas: 8,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Counterexample {
    pub goal: String,
    pub tool: String,
    pub assignment: Assignment,
}

/// Side channel for everything that is not part of the trace.
#[derive(Debug, Default)]
pub struct Diagnostics {
    warnings: Mutex<BTreeSet<String>>,
    counterexamples: Mutex<Vec<Counterexample>>,
    generated: AtomicUsize,
    deduped: AtomicUsize,
    failed: AtomicUsize,
}

impl Diagnostics {
    pub fn warn(&self, msg: impl Into<String>) {
        self.warnings
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(msg.into());
    }

    pub fn warnings(&self) -> Vec<String> {
        self.warnings
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .iter()
            .cloned()
            .collect()
    }

    pub fn record_counterexample(&self, cex: Counterexample) {
        let mut all = self.counterexamples.lock().unwrap_or_else(|e| e.into_inner());
        if !all.contains(&cex) {
            all.push(cex);
        }
    }

    pub fn counterexamples(&self) -> Vec<Counterexample> {
        self.counterexamples.lock().unwrap_or_else(|e| e.into_inner()).clone()
    }

    pub fn add_generated(&self, n: usize) {
        self.generated.fetch_add(n, Ordering::Relaxed);
    }

    pub fn note_deduped(&self) {
        self.deduped.fetch_add(1, Ordering::Relaxed);
    }

    pub fn note_failed(&self) {
        self.failed.fetch_add(1, Ordering::Relaxed);
    }

    /// Dynamic variants generated so far.
    pub fn generated(&self) -> usize {
        self.generated.load(Ordering::Relaxed)
    }

    /// Variants dropped because an earlier variant gave the same result.
    pub fn deduped(&self) -> usize {
        self.deduped.load(Ordering::Relaxed)
    }

    /// Variants that produced no result.
    pub fn failed(&self) -> usize {
        self.failed.load(Ordering::Relaxed)
    }
}

/// Configuration and diagnostics shared by all atom evaluations of a run.
#[derive(Clone, Debug, Default)]
pub struct EvalEnv {
    pub config: EvalConfig,
    pub diag: Arc<Diagnostics>,
}

impl EvalEnv {
    pub fn new(config: EvalConfig) -> Self {
        EvalEnv {
            config,
            diag: Arc::default(),
        }
    }
}

/// Whether `User "name"` can run on states over `ctx`.
pub fn user_tactic_known(ctx: &crate::kernel::Context, name: &str) -> bool {
    BUILTIN_USER_TACTICS.contains(&name) || ctx.user_tactic(name).is_some()
}

type Step = (TraceEntry, ProofState);

fn scripted(atom: String, tac: ScriptTactic, s: &ProofState) -> LazyStream<Step> {
    let line = tac.to_line();
    apply_step(&tac, s)
        .enumerate()
        .map(move |(i, st)| (TraceEntry::scripted(&atom, line.clone(), i, st.goal_count()), st))
}

fn tagged(atom: String, results: LazyStream<(ScriptTactic, usize, ProofState)>) -> LazyStream<Step> {
    results.map(move |(tac, i, st)| (TraceEntry::scripted(&atom, tac.to_line(), i, st.goal_count()), st))
}

fn silent(atom: &str, s: &ProofState) -> LazyStream<Step> {
    LazyStream::unit((TraceEntry::silent(atom, s.goal_count()), s.clone()))
}

fn unsupported(atom: &Atom, env: &EvalEnv) -> LazyStream<Step> {
    env.diag
        .warn(format!("`{atom}` is not supported by this backend and fails"));
    LazyStream::empty()
}

fn first_var(s: &ProofState) -> Option<crate::kernel::Var> {
    let g = s.first_goal()?;
    g.free_vars()
        .into_iter()
        .find(|v| s.context().datatype(&v.ty).is_some())
}

fn default_tactic(d: DefaultTactic, atom: String, s: &ProofState, env: &EvalEnv) -> LazyStream<Step> {
    let tac = match d {
        DefaultTactic::Simp => ScriptTactic::Simp { add: vec![] },
        DefaultTactic::Clarsimp => ScriptTactic::Clarsimp { add: vec![] },
        DefaultTactic::Fastforce => ScriptTactic::Fastforce {
            simp_add: vec![],
            intro: vec![],
        },
        DefaultTactic::Auto => ScriptTactic::Auto { simp_add: vec![] },
        DefaultTactic::Blast => ScriptTactic::Blast,
        DefaultTactic::Induct | DefaultTactic::InductTac => match first_var(s) {
            Some(v) => ScriptTactic::Induct {
                vars: vec![v.name],
                arbitrary: vec![],
                rule: None,
            },
            None => return LazyStream::empty(),
        },
        DefaultTactic::Cases | DefaultTactic::CaseTac => match first_var(s) {
            Some(v) => ScriptTactic::Cases {
                var: v.name,
                rule: None,
            },
            None => return LazyStream::empty(),
        },
        DefaultTactic::Rule | DefaultTactic::Erule => {
            let names = match d {
                DefaultTactic::Rule => intro_rule_names(s.context()),
                _ => elim_rule_names(s.context()),
            };
            let s = s.clone();
            return rules::append_over(names, move |n| {
                let tac = match d {
                    DefaultTactic::Rule => ScriptTactic::Rule(Arc::from(n)),
                    _ => ScriptTactic::Erule(Arc::from(n)),
                };
                scripted(atom.clone(), tac, &s)
            });
        }
        DefaultTactic::Coinduction => return unsupported(&Atom::Default(d), env),
    };
    scripted(atom, tac, s)
}

fn dynamic(d: DefaultTactic, atom: String, s: &ProofState, env: &EvalEnv) -> LazyStream<Step> {
    if !is_dynamic_kind(d) {
        return unsupported(&Atom::Dynamic(d), env);
    }
    let variants = generate_dynamic(d, s, env.config.variant_cap);
    env.diag.add_generated(variants.len());
    let results = if combines_with_append(d) {
        dedup_variants(variants, s, env.diag.clone())
    } else {
        first_success(variants, s, env.diag.clone())
    };
    tagged(atom, results)
}

fn counterexample_check(tool: &str, bound: usize, s: &ProofState, env: &EvalEnv) -> LazyStream<Step> {
    if let Some(g) = s.first_goal() {
        if let Some(assignment) = find_counterexample(g, s.context(), bound) {
            env.diag.record_counterexample(Counterexample {
                goal: g.label.to_string(),
                tool: tool.to_string(),
                assignment,
            });
            return LazyStream::empty();
        }
    }
    silent(tool, s)
}

/// Results of one atom on `s`, each with the trace entry that records it.
/// Failure is the empty stream. Nothing runs until the stream is forced.
pub fn eval(atom: &Atom, s: &ProofState, env: &EvalEnv) -> LazyStream<Step> {
    let (atom, s, env) = (atom.clone(), s.clone(), env.clone());
    LazyStream::suspend(move || eval_now(&atom, &s, &env))
}

fn eval_now(atom: &Atom, s: &ProofState, env: &EvalEnv) -> LazyStream<Step> {
    let name = atom.to_string();
    match atom {
        Atom::Default(d) => default_tactic(*d, name, s, env),
        Atom::Dynamic(d) => dynamic(*d, name, s, env),
        Atom::IsSolved => {
            if !s.goals().is_empty() {
                LazyStream::empty()
            } else if s.depth() > 1 {
                scripted(name, ScriptTactic::Done, s)
            } else {
                silent(&name, s)
            }
        }
        Atom::Defer => scripted(name, ScriptTactic::Defer, s),
        Atom::Subgoal => scripted(name, ScriptTactic::Subgoal, s),
        Atom::Skip => silent(&name, s),
        Atom::Fail => LazyStream::empty(),
        Atom::User(n) if n == "assumption" => scripted(name, ScriptTactic::Assumption, s),
        Atom::User(n) => match s.context().user_tactic(n) {
            Some(_) => scripted(name, ScriptTactic::User(Arc::from(n.as_str())), s),
            None => {
                env.diag.warn(format!("no user tactic named `{n}`"));
                LazyStream::empty()
            }
        },
        Atom::Hammer => match hammer(s, env.config.hammer_lemmas) {
            Some(tac) => scripted(name, tac, s),
            None => LazyStream::empty(),
        },
        Atom::Quickcheck => counterexample_check("Quickcheck", env.config.quickcheck_bound, s, env),
        Atom::Nitpick => counterexample_check("Nitpick", env.config.nitpick_bound, s, env),
        Atom::IntroClasses | Atom::Transfer | Atom::Normalization => unsupported(atom, env),
    }
}
