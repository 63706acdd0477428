//! Structural interpretation of core strategies into search computations.

use std::sync::atomic::{AtomicBool, AtomicUsize, Ordering};
use std::sync::Arc;
use std::thread;
use std::time::Instant;

use psl_core::kernel::ProofState;
use psl_core::lazy_stream::LazyStream;
use psl_core::strategy_lang::{Atom, Combinator, CoreStrategy};
use psl_core::tactics::{eval, EvalEnv};
use psl_core::trace::TraceLog;

use crate::computation::SearchComputation;

/// Stack for worker threads forcing parallel branches.
pub(crate) const WORKER_STACK: usize = 256 << 20;

type Results = LazyStream<(TraceLog, ProofState)>;

/// Core strategy with shared subterms, so that closures can hold on to
/// subtrees without copying them.
enum Node {
    Atom(Atom),
    Skip,
    Fail,
    Then(Arc<Node>, Arc<Node>),
    Alt(Arc<Node>, Arc<Node>),
    Or(Arc<Node>, Arc<Node>),
    Rep(Arc<Node>),
    RepN(Arc<Node>),
    Comb(Combinator, Vec<Arc<Node>>),
}

fn compile(c: &CoreStrategy) -> Arc<Node> {
    Arc::new(match c {
        CoreStrategy::Atom(a) => Node::Atom(a.clone()),
        CoreStrategy::Skip => Node::Skip,
        CoreStrategy::Fail => Node::Fail,
        CoreStrategy::Then(a, b) => Node::Then(compile(a), compile(b)),
        CoreStrategy::Alt(a, b) => Node::Alt(compile(a), compile(b)),
        CoreStrategy::Or(a, b) => Node::Or(compile(a), compile(b)),
        CoreStrategy::Rep(a) => Node::Rep(compile(a)),
        CoreStrategy::RepN(a) => Node::RepN(compile(a)),
        CoreStrategy::Comb(k, xs) => Node::Comb(*k, xs.iter().map(compile).collect()),
    })
}

/// Counters shared by every branch of one search.
#[derive(Debug, Default)]
pub struct Counters {
    atom_calls: AtomicUsize,
    atoms_applied: AtomicUsize,
    max_log_len: AtomicUsize,
    pending: AtomicUsize,
    peak_pending: AtomicUsize,
}

impl Counters {
    /// Atom evaluations started.
    pub fn atom_calls(&self) -> usize {
        self.atom_calls.load(Ordering::Relaxed)
    }

    /// Atom results produced, each extending some path by one entry.
    pub fn atoms_applied(&self) -> usize {
        self.atoms_applied.load(Ordering::Relaxed)
    }

    pub fn max_log_len(&self) -> usize {
        self.max_log_len.load(Ordering::Relaxed)
    }

    /// Most suspended right branches of `Alt` alive at the same time.
    pub fn peak_pending(&self) -> usize {
        self.peak_pending.load(Ordering::Relaxed)
    }
}

/// Live while an `Alt` right branch is suspended.
struct Pending(Arc<Counters>);

impl Pending {
    fn new(c: &Arc<Counters>) -> Pending {
        let now = c.pending.fetch_add(1, Ordering::Relaxed) + 1;
        c.peak_pending.fetch_max(now, Ordering::Relaxed);
        Pending(c.clone())
    }
}

impl Drop for Pending {
    fn drop(&mut self) {
        self.0.pending.fetch_sub(1, Ordering::Relaxed);
    }
}

/// Cooperative cancellation flag; a branch stops once it or any ancestor
/// is cancelled.
#[derive(Debug, Default)]
struct Cancel {
    flag: AtomicBool,
    parent: Option<Arc<Cancel>>,
}

impl Cancel {
    fn child(parent: &Option<Arc<Cancel>>) -> Arc<Cancel> {
        Arc::new(Cancel {
            flag: AtomicBool::new(false),
            parent: parent.clone(),
        })
    }

    fn is_set(&self) -> bool {
        self.flag.load(Ordering::Relaxed) || self.parent.as_ref().is_some_and(|p| p.is_set())
    }
}

#[derive(Debug)]
struct Shared {
    env: EvalEnv,
    threads: usize,
    deadline: Option<Instant>,
    timed_out: AtomicBool,
    counters: Arc<Counters>,
}

/// Interpreter for one depth limit. Cheap to clone; clones share counters,
/// deadline, and evaluation environment.
#[derive(Clone, Debug)]
pub struct Interp {
    shared: Arc<Shared>,
    limit: usize,
    cancel: Option<Arc<Cancel>>,
}

impl Interp {
    /// `threads` is the degree of parallelism of the parallel combinators;
    /// 1 evaluates them sequentially.
    pub fn new(env: EvalEnv, limit: usize, threads: usize, deadline: Option<Instant>) -> Interp {
        Interp {
            shared: Arc::new(Shared {
                env,
                threads: threads.max(1),
                deadline,
                timed_out: AtomicBool::new(false),
                counters: Arc::default(),
            }),
            limit,
            cancel: None,
        }
    }

    /// Same environment and counters under a different depth limit.
    pub fn with_limit(&self, limit: usize) -> Interp {
        Interp { limit, ..self.clone() }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    pub fn counters(&self) -> &Arc<Counters> {
        &self.shared.counters
    }

    pub fn env(&self) -> &EvalEnv {
        &self.shared.env
    }

    /// Whether some atom was skipped because the deadline had passed.
    pub fn timed_out(&self) -> bool {
        self.shared.timed_out.load(Ordering::Relaxed)
    }

    fn stopped(&self) -> bool {
        if self.cancel.as_ref().is_some_and(|c| c.is_set()) {
            return true;
        }
        if self.shared.deadline.is_some_and(|d| Instant::now() >= d) {
            self.shared.timed_out.store(true, Ordering::Relaxed);
            return true;
        }
        false
    }

    fn cancellable(&self) -> (Interp, Arc<Cancel>) {
        let token = Cancel::child(&self.cancel);
        let branch = Interp {
            cancel: Some(token.clone()),
            ..self.clone()
        };
        (branch, token)
    }

    /// The computation of `c` on `s`.
    pub fn interp(&self, c: &CoreStrategy) -> impl Fn(ProofState) -> SearchComputation<ProofState> {
        let (me, node) = (self.clone(), compile(c));
        move |s| me.comp(&node, s)
    }

    /// Runs `atom` on `s` unless the current path already holds `limit`
    /// entries; each result extends the path by its trace entry.
    pub fn iddfc(&self, atom: &Atom, s: ProofState) -> SearchComputation<ProofState> {
        let (me, atom) = (self.clone(), atom.clone());
        SearchComputation::new(move |log: TraceLog| {
            if log.len() >= me.limit || me.stopped() {
                return LazyStream::empty();
            }
            let counters = me.shared.counters.clone();
            counters.atom_calls.fetch_add(1, Ordering::Relaxed);
            eval(&atom, &s, &me.shared.env).map(move |(entry, next)| {
                let log = log.push(entry);
                counters.atoms_applied.fetch_add(1, Ordering::Relaxed);
                counters.max_log_len.fetch_max(log.len(), Ordering::Relaxed);
                (log, next)
            })
        })
    }

    fn comp(&self, n: &Arc<Node>, s: ProofState) -> SearchComputation<ProofState> {
        match &**n {
            Node::Atom(a) => self.iddfc(a, s),
            Node::Skip => SearchComputation::unit(s),
            Node::Fail => SearchComputation::zero(),
            Node::Then(a, b) => {
                let (me, b) = (self.clone(), b.clone());
                self.comp(a, s).bind(move |next| me.comp(&b, next))
            }
            Node::Alt(a, b) => {
                let (me, a, b) = (self.clone(), a.clone(), b.clone());
                SearchComputation::new(move |log: TraceLog| {
                    let pending = Pending::new(&me.shared.counters);
                    let (me2, b, s2, log2) = (me.clone(), b.clone(), s.clone(), log.clone());
                    me.comp(&a, s.clone()).run(log).plus_lazy(move || {
                        drop(pending);
                        me2.comp(&b, s2).run(log2)
                    })
                })
            }
            Node::Or(a, b) => {
                let me = self.clone();
                let b = b.clone();
                let s2 = s.clone();
                self.comp(a, s)
                    .or_else(SearchComputation::new(move |log| me.comp(&b, s2.clone()).run(log)))
            }
            Node::Rep(a) => {
                // (a Then Rep a) Or Skip. A result that applied no atom would
                // repeat forever without reaching the depth limit, so it ends
                // the repetition.
                let (me, a, rep, s2) = (self.clone(), a.clone(), n.clone(), s.clone());
                SearchComputation::new(move |log: TraceLog| {
                    let (me2, rep, depth) = (me.clone(), rep.clone(), log.len());
                    me.comp(&a, s2.clone()).run(log).bind(move |(log, next)| {
                        if log.len() == depth {
                            LazyStream::unit((log, next))
                        } else {
                            me2.comp(&rep, next).run(log)
                        }
                    })
                })
                .or_else(SearchComputation::unit(s))
            }
            Node::RepN(a) => {
                let times = s.goal_count();
                let (me, a) = (self.clone(), a.clone());
                SearchComputation::new(move |log| me.repeat_n(&a, times, s.clone(), log))
            }
            Node::Comb(k, xs) => self.eval_comb(*k, xs, s),
        }
    }

    fn repeat_n(&self, a: &Arc<Node>, times: usize, s: ProofState, log: TraceLog) -> Results {
        if times == 0 {
            return LazyStream::unit((log, s));
        }
        let (me, a2) = (self.clone(), a.clone());
        self.comp(a, s)
            .run(log)
            .bind(move |(log, next)| me.repeat_n(&a2, times - 1, next, log))
    }

    fn eval_comb(&self, k: Combinator, xs: &[Arc<Node>], s: ProofState) -> SearchComputation<ProofState> {
        let (me, xs) = (self.clone(), xs.to_vec());
        match k {
            Combinator::Cut(n) => self.comp(&xs[0], s).truncate(n),
            Combinator::POrs => SearchComputation::new(move |log| {
                let (me, xs, s) = (me.clone(), xs.clone(), s.clone());
                LazyStream::suspend(move || me.par_ors(&xs, &s, &log))
            }),
            Combinator::PAlts => SearchComputation::new(move |log| {
                let (me, xs, s) = (me.clone(), xs.clone(), s.clone());
                LazyStream::suspend(move || {
                    let branches: Vec<Results> = xs.iter().map(|x| me.comp(x, s.clone()).run(log.clone())).collect();
                    me.prefetch(&branches, None);
                    branches
                        .into_iter()
                        .rev()
                        .fold(LazyStream::empty(), |acc, b| b.plus(acc))
                })
            }),
            Combinator::PThenOne => SearchComputation::new(move |log| {
                let (me, xs, s) = (me.clone(), xs.clone(), s.clone());
                LazyStream::suspend(move || {
                    let first = me.comp(&xs[0], s).run(log);
                    me.par_then_one(first, &xs[1])
                })
            }),
            Combinator::PThenAll => SearchComputation::new(move |log| {
                let (me, xs, s) = (me.clone(), xs.clone(), s.clone());
                LazyStream::suspend(move || {
                    let first = me.comp(&xs[0], s).run(log);
                    me.par_then_all(first, xs[1].clone())
                })
            }),
        }
    }

    /// Forces the heads of `streams` concurrently, `threads` at a time.
    /// With `cancel`, once stream `i` is known to be non-empty every later
    /// stream's token is set.
    fn prefetch(&self, streams: &[Results], cancel: Option<&[Arc<Cancel>]>) {
        if self.shared.threads <= 1 || streams.len() <= 1 {
            return;
        }
        let first_hit = AtomicUsize::new(usize::MAX);
        for chunk in (0..streams.len()).collect::<Vec<_>>().chunks(self.shared.threads) {
            thread::scope(|scope| {
                for &i in chunk {
                    let first_hit = &first_hit;
                    thread::Builder::new()
                        .stack_size(WORKER_STACK)
                        .spawn_scoped(scope, move || {
                            if i > first_hit.load(Ordering::SeqCst) {
                                return;
                            }
                            if !streams[i].is_empty() {
                                first_hit.fetch_min(i, Ordering::SeqCst);
                                if let Some(tokens) = cancel {
                                    tokens[i + 1..]
                                        .iter()
                                        .for_each(|t| t.flag.store(true, Ordering::SeqCst));
                                }
                            }
                        })
                        .expect("spawn search worker");
                }
            });
            if cancel.is_some() && first_hit.load(Ordering::SeqCst) != usize::MAX {
                return;
            }
        }
    }

    fn par_ors(&self, xs: &[Arc<Node>], s: &ProofState, log: &TraceLog) -> Results {
        if self.shared.threads <= 1 {
            for x in xs {
                let r = self.comp(x, s.clone()).run(log.clone());
                if !r.is_empty() {
                    return r;
                }
            }
            return LazyStream::empty();
        }
        let (branches, tokens): (Vec<Results>, Vec<Arc<Cancel>>) = xs
            .iter()
            .map(|x| {
                let (branch, token) = self.cancellable();
                (branch.comp(x, s.clone()).run(log.clone()), token)
            })
            .unzip();
        self.prefetch(&branches, Some(&tokens));
        // Branches after the first non-empty one may have been cancelled;
        // everything before it ran to its head uncancelled.
        branches.into_iter().find(|b| !b.is_empty()).unwrap_or_default()
    }

    fn par_then_one(&self, first: Results, second: &Arc<Node>) -> Results {
        let batch = self.shared.threads;
        let mut rest = first;
        loop {
            let mut items = Vec::with_capacity(batch);
            while items.len() < batch {
                match rest.uncons() {
                    Some((x, tail)) => {
                        items.push(x);
                        rest = tail;
                    }
                    None => break,
                }
            }
            if items.is_empty() {
                return LazyStream::empty();
            }
            let (branches, tokens): (Vec<Results>, Vec<Arc<Cancel>>) = items
                .into_iter()
                .map(|(log, st)| {
                    let (branch, token) = self.cancellable();
                    (branch.comp(second, st).run(log), token)
                })
                .unzip();
            self.prefetch(&branches, Some(&tokens));
            if let Some(b) = branches.iter().find(|b| !b.is_empty()) {
                return b.clone().truncate(1);
            }
        }
    }

    fn par_then_all(&self, first: Results, second: Arc<Node>) -> Results {
        let batch = self.shared.threads;
        let me = self.clone();
        LazyStream::suspend(move || {
            let mut items = Vec::with_capacity(batch);
            let mut rest = first;
            while items.len() < batch {
                match rest.uncons() {
                    Some((x, tail)) => {
                        items.push(x);
                        rest = tail;
                    }
                    None => break,
                }
            }
            if items.is_empty() {
                return LazyStream::empty();
            }
            let branches: Vec<Results> = items
                .into_iter()
                .map(|(log, st)| me.comp(&second, st).run(log))
                .collect();
            me.prefetch(&branches, None);
            let me2 = me.clone();
            branches
                .into_iter()
                .rev()
                .fold(me2.par_then_all(rest, second), |acc, b| b.plus(acc))
        })
    }
}
