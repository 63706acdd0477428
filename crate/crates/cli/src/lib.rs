//! Driver for the `psl` command: loads theories and strategy files, runs
//! the search, and emits or replays proof scripts.
//!
//! Exit codes: 0 success, 1 no proof / counterexample / replay failure,
//! 2 usage or parse error.

mod check;
#[cfg(feature = "engine")]
mod prove;
mod replay;
mod report;

use std::fs;
use std::path::{Path, PathBuf};

use psl_core::kernel::theory::{parse_theory, Theory};
use psl_core::kernel::ProofState;
use psl_core::strategy_lang::{parse_strategy_file, parse_strategy_file_with, StrategyFile, PRELUDE};
use thiserror::Error;

pub use check::{cmd_check, CheckOutput};
#[cfg(feature = "engine")]
pub use prove::{cmd_prove, ProveOutput, RunConfig};
pub use replay::{cmd_replay, ReplayOutput};
pub use report::{CounterexampleReport, LimitReport, Report};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Whether this build includes the search engine (`prove`).
pub const ENGINE_ENABLED: bool = cfg!(feature = "engine");

/// Environment variable naming a file that replaces the built-in prelude.
pub const PRELUDE_VAR: &str = "PSL_PRELUDE";

/// Errors that end a command with exit status 2.
#[derive(Error, Debug)]
pub enum CliError {
    #[error("{}: {source}", .path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {msg}")]
    Parse { path: String, msg: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_USAGE
    }
}

pub(crate) fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_theory(path: &Path) -> Result<Theory, CliError> {
    parse_theory(&read(path)?).map_err(|e| CliError::Parse {
        path: path.display().to_string(),
        msg: e.to_string(),
    })
}

/// The prelude: the file named by `PSL_PRELUDE` if set, else the built-in
/// one; empty when `disabled`.
pub fn load_prelude(disabled: bool) -> Result<StrategyFile, CliError> {
    if disabled {
        return Ok(StrategyFile::default());
    }
    let (origin, text) = match std::env::var_os(PRELUDE_VAR) {
        Some(p) => {
            let p = PathBuf::from(p);
            (p.display().to_string(), read(&p)?)
        }
        None => ("<prelude>".to_string(), PRELUDE.to_string()),
    };
    parse_strategy_file(&text).map_err(|e| CliError::Parse {
        path: origin,
        msg: e.to_string(),
    })
}

/// `base` extended with the definitions of each file in turn.
pub fn load_strategies(base: StrategyFile, files: &[PathBuf]) -> Result<StrategyFile, CliError> {
    files.iter().try_fold(base, |env, f| {
        parse_strategy_file_with(&read(f)?, &env).map_err(|e| CliError::Parse {
            path: f.display().to_string(),
            msg: e.to_string(),
        })
    })
}

/// Goal labels to prove: `requested`, or every goal of the theory.
pub(crate) fn goal_state(th: &Theory, requested: &[String]) -> Result<ProofState, String> {
    let labels: Vec<&str> = if requested.is_empty() {
        th.goals.iter().map(|g| &*g.label).collect()
    } else {
        requested.iter().map(String::as_str).collect()
    };
    if labels.is_empty() {
        return Err("the theory declares no goals".into());
    }
    th.proof_state(&labels).map_err(|e| e.to_string())
}

/// Open goals of `s`, one per line, or `no goals`.
pub fn render_state(s: &ProofState) -> String {
    if s.is_solved() {
        "no goals\n".to_string()
    } else {
        s.to_string()
    }
}
