use std::fs;
use std::path::PathBuf;
use std::time::Duration;

use psl_core::kernel::ProofState;
use psl_core::scriptgen::{emit_script, ProofScript};
use psl_core::strategy_lang::{desugar, parse_strategy_expr};
use psl_core::tactics::{user_tactic_known, EvalConfig};
use psl_engine::{search, DepthBudget, SearchConfig};

use crate::report::{CounterexampleReport, LimitReport, Report};
use crate::{goal_state, load_prelude, load_strategies, load_theory, CliError, EXIT_FAIL, EXIT_OK};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunConfig {
    pub theory: PathBuf,
    /// Goals to prove together; all goals of the theory when empty.
    pub goals: Vec<String>,
    /// A strategy name or expression.
    pub strategy: String,
    pub strategy_files: Vec<PathBuf>,
    pub timeout: Option<Duration>,
    pub max_depth: usize,
    pub deepening_step: usize,
    pub threads: usize,
    pub variant_cap: usize,
    /// Where to write the script.
    pub emit: Option<PathBuf>,
    pub no_prelude: bool,
    pub verbose: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            theory: PathBuf::new(),
            goals: Vec::new(),
            strategy: "Try_Hard".into(),
            strategy_files: Vec::new(),
            timeout: Some(Duration::from_secs(60)),
            max_depth: 30,
            deepening_step: 1,
            threads: 1,
            variant_cap: EvalConfig::default().variant_cap,
            emit: None,
            no_prelude: false,
            verbose: false,
        }
    }
}

#[derive(Clone, Debug)]
pub struct ProveOutput {
    pub code: i32,
    /// Present whenever the search returned a result, complete or not.
    pub script: Option<ProofScript>,
    pub final_state: Option<ProofState>,
    pub report: Report,
}

/// Searches for a proof of the configured goals and builds its script.
pub fn cmd_prove(cfg: &RunConfig) -> Result<ProveOutput, CliError> {
    let th = load_theory(&cfg.theory)?;
    let state = goal_state(&th, &cfg.goals).map_err(CliError::Usage)?;
    let env = load_strategies(load_prelude(cfg.no_prelude)?, &cfg.strategy_files)?;
    let parse_err = |e: psl_core::strategy_lang::StrategyError| CliError::Parse {
        path: "--strategy".into(),
        msg: e.to_string(),
    };
    let surface = parse_strategy_expr(&cfg.strategy, &env).map_err(parse_err)?;
    let strategy = desugar(&surface, &env, &|n| user_tactic_known(&th.context, n)).map_err(parse_err)?;
    let budget = DepthBudget::stepped(cfg.max_depth, cfg.deepening_step, cfg.timeout)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let search_cfg = SearchConfig {
        budget,
        threads: cfg.threads.max(1),
        eval: EvalConfig {
            variant_cap: cfg.variant_cap,
            ..EvalConfig::default()
        },
    };
    let out = search(&strategy, &state, &search_cfg);
    let diag = &out.diagnostics;
    let mut report = Report {
        goals: state.open_labels(),
        strategy: cfg.strategy.clone(),
        threads: search_cfg.threads,
        wall_time_ms: out.stats.elapsed.as_secs_f64() * 1e3,
        atom_calls: out.stats.atom_calls,
        atoms_applied: out.stats.atoms_applied,
        max_log_length: out.stats.max_log_len,
        peak_pending_branches: out.stats.peak_pending,
        variants_generated: diag.generated(),
        variants_deduped: diag.deduped(),
        variants_failed: diag.failed(),
        per_limit: out
            .stats
            .per_limit
            .iter()
            .map(|l| LimitReport {
                limit: l.limit,
                atom_calls: l.atom_calls,
                atoms_applied: l.atoms_applied,
                variants_generated: l.variants_generated,
                variants_deduped: l.variants_deduped,
            })
            .collect(),
        counterexamples: diag
            .counterexamples()
            .into_iter()
            .map(|c| CounterexampleReport {
                goal: c.goal,
                tool: c.tool,
                assignment: c.assignment.to_string(),
            })
            .collect(),
        warnings: diag.warnings(),
        ..Report::default()
    };
    let (code, script, final_state) = match out.result {
        Ok(proof) => {
            let script = emit_script(&proof.log, &proof.state);
            report.winning_log_length = Some(proof.log.len());
            report.depth_limit = Some(proof.limit);
            report.remaining_goals = proof.state.open_labels();
            let code = if proof.state.is_solved() {
                report.status = "proved".into();
                EXIT_OK
            } else {
                report.status = "incomplete".into();
                report.reason = Some("incomplete".into());
                EXIT_FAIL
            };
            if let Some(path) = &cfg.emit {
                fs::write(path, script.to_string()).map_err(|source| CliError::Io {
                    path: path.clone(),
                    source,
                })?;
            }
            (code, Some(script), Some(proof.state))
        }
        Err(why) => {
            report.status = "no_proof".into();
            report.reason = Some(why.code().into());
            report.remaining_goals = state.open_labels();
            (EXIT_FAIL, None, None)
        }
    };
    Ok(ProveOutput {
        code,
        script,
        final_state,
        report,
    })
}
