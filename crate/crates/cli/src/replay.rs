use std::path::Path;

use psl_core::kernel::ProofState;
use psl_core::scriptgen::{parse_script, replay};

use crate::{goal_state, load_theory, read, render_state, CliError, EXIT_FAIL, EXIT_OK};

#[derive(Clone, Debug)]
pub struct ReplayOutput {
    pub code: i32,
    pub message: String,
    pub final_state: Option<ProofState>,
    /// Result elements forced by each step.
    pub forced: Vec<usize>,
}

impl ReplayOutput {
    fn failed(message: String) -> ReplayOutput {
        ReplayOutput {
            code: EXIT_FAIL,
            message,
            final_state: None,
            forced: Vec::new(),
        }
    }
}

/// Checks a script against the goals without any search.
pub fn cmd_replay(theory: &Path, goals: &[String], script: &Path) -> Result<ReplayOutput, CliError> {
    let th = load_theory(theory)?;
    let text = read(script)?;
    let script_ast = parse_script(&text).map_err(|e| CliError::Parse {
        path: script.display().to_string(),
        msg: e.to_string(),
    })?;
    let state = match goal_state(&th, goals) {
        Ok(s) => s,
        Err(e) => return Ok(ReplayOutput::failed(e)),
    };
    Ok(match replay(&script_ast, &state) {
        Ok(r) => ReplayOutput {
            code: EXIT_OK,
            message: format!(
                "replayed {} steps ({} back)\n{}",
                script_ast.steps.len(),
                script_ast.back_count(),
                render_state(&r.state)
            ),
            final_state: Some(r.state),
            forced: r.forced,
        },
        Err(e) => ReplayOutput::failed(e.to_string()),
    })
}
