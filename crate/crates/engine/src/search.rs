use std::sync::Arc;
use std::thread;
use std::time::{Duration, Instant};

use psl_core::kernel::ProofState;
use psl_core::strategy_lang::CoreStrategy;
use psl_core::tactics::{Diagnostics, EvalConfig, EvalEnv};
use psl_core::trace::TraceLog;
use thiserror::Error;

use crate::interp::{Interp, WORKER_STACK};

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum BudgetError {
    #[error("the deepening schedule is empty")]
    Empty,
    #[error("depth limits must be at least 1")]
    ZeroLimit,
    #[error("the deepening schedule must be strictly increasing")]
    NotIncreasing,
}

/// Depth limits for iterative deepening, plus a wall-clock timeout for the
/// whole search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthBudget {
    schedule: Vec<usize>,
    pub timeout: Option<Duration>,
}

impl Default for DepthBudget {
    fn default() -> Self {
        DepthBudget {
            schedule: (1..=30).collect(),
            timeout: None,
        }
    }
}

impl DepthBudget {
    pub fn with_schedule(schedule: Vec<usize>, timeout: Option<Duration>) -> Result<Self, BudgetError> {
        if schedule.is_empty() {
            return Err(BudgetError::Empty);
        }
        if schedule[0] == 0 {
            return Err(BudgetError::ZeroLimit);
        }
        if schedule.windows(2).any(|w| w[0] >= w[1]) {
            return Err(BudgetError::NotIncreasing);
        }
        Ok(DepthBudget { schedule, timeout })
    }

    /// `step, 2*step, ..` up to `max_depth`, which is always included.
    pub fn stepped(max_depth: usize, step: usize, timeout: Option<Duration>) -> Result<Self, BudgetError> {
        if max_depth == 0 || step == 0 {
            return Err(BudgetError::ZeroLimit);
        }
        let mut schedule: Vec<usize> = (1..).map(|k| k * step).take_while(|d| *d < max_depth).collect();
        schedule.push(max_depth);
        Self::with_schedule(schedule, timeout)
    }

    pub fn schedule(&self) -> &[usize] {
        &self.schedule
    }

    /// The largest depth limit.
    pub fn limit(&self) -> usize {
        *self.schedule.last().expect("schedules are non-empty")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub budget: DepthBudget,
    /// Degree of parallelism of the parallel combinators.
    pub threads: usize,
    pub eval: EvalConfig,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            budget: DepthBudget::default(),
            threads: 1,
            eval: EvalConfig::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoProof {
    Timeout,
    Exhausted,
}

impl NoProof {
    pub fn code(self) -> &'static str {
        match self {
            NoProof::Timeout => "timeout",
            NoProof::Exhausted => "exhausted",
        }
    }
}

#[derive(Clone, Debug)]
pub struct Proof {
    pub state: ProofState,
    pub log: TraceLog,
    /// Depth limit of the iteration that found it.
    pub limit: usize,
}

/// Work done under one depth limit.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LimitStats {
    pub limit: usize,
    pub atom_calls: usize,
    pub atoms_applied: usize,
    pub variants_generated: usize,
    pub variants_deduped: usize,
}

#[derive(Clone, Debug, Default)]
pub struct SearchStats {
    pub elapsed: Duration,
    pub atom_calls: usize,
    pub atoms_applied: usize,
    pub max_log_len: usize,
    pub peak_pending: usize,
    pub per_limit: Vec<LimitStats>,
}

#[derive(Clone, Debug)]
pub struct SearchOutcome {
    pub result: Result<Proof, NoProof>,
    pub stats: SearchStats,
    pub diagnostics: Arc<Diagnostics>,
}

/// Iterative deepening: the first result of `c` on `s` under the smallest
/// limit of the schedule that has one.
pub fn search(c: &CoreStrategy, s: &ProofState, config: &SearchConfig) -> SearchOutcome {
    thread::scope(|scope| {
        thread::Builder::new()
            .stack_size(WORKER_STACK)
            .spawn_scoped(scope, || search_here(c, s, config))
            .expect("spawn search thread")
            .join()
            .unwrap_or_else(|e| std::panic::resume_unwind(e))
    })
}

fn search_here(c: &CoreStrategy, s: &ProofState, config: &SearchConfig) -> SearchOutcome {
    let start = Instant::now();
    let env = EvalEnv::new(config.eval.clone());
    let diag = env.diag.clone();
    let deadline = config.budget.timeout.map(|t| start + t);
    let base = Interp::new(env, config.budget.schedule[0], config.threads, deadline);
    let counters = base.counters().clone();
    let mut stats = SearchStats::default();
    let mut result = Err(NoProof::Exhausted);
    for &limit in config.budget.schedule() {
        let before = (
            counters.atom_calls(),
            counters.atoms_applied(),
            diag.generated(),
            diag.deduped(),
        );
        let interp = base.with_limit(limit);
        let head = interp.interp(c)(s.clone()).run(TraceLog::new()).head().cloned();
        stats.per_limit.push(LimitStats {
            limit,
            atom_calls: counters.atom_calls() - before.0,
            atoms_applied: counters.atoms_applied() - before.1,
            variants_generated: diag.generated() - before.2,
            variants_deduped: diag.deduped() - before.3,
        });
        if let Some((log, state)) = head {
            result = Ok(Proof { state, log, limit });
            break;
        }
        if base.timed_out() {
            result = Err(NoProof::Timeout);
            break;
        }
    }
    stats.elapsed = start.elapsed();
    stats.atom_calls = counters.atom_calls();
    stats.atoms_applied = counters.atoms_applied();
    stats.max_log_len = counters.max_log_len();
    stats.peak_pending = counters.peak_pending();
    SearchOutcome {
        result,
        stats,
        diagnostics: diag,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn schedules_are_validated() {
        assert_eq!(DepthBudget::default().schedule().len(), 30);
        assert_eq!(DepthBudget::with_schedule(vec![], None), Err(BudgetError::Empty));
        assert_eq!(
            DepthBudget::with_schedule(vec![0, 1], None),
            Err(BudgetError::ZeroLimit)
        );
        assert_eq!(
            DepthBudget::with_schedule(vec![2, 2], None),
            Err(BudgetError::NotIncreasing)
        );
        assert_eq!(DepthBudget::stepped(10, 4, None).unwrap().schedule(), &[4, 8, 10]);
        assert_eq!(DepthBudget::stepped(8, 4, None).unwrap().schedule(), &[4, 8]);
        assert_eq!(DepthBudget::stepped(3, 1, None).unwrap().limit(), 3);
    }
}
