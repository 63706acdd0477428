use std::path::PathBuf;

use psl_core::kernel::theory::parse_theory;
use psl_core::strategy_lang::{parse_strategy_file, parse_strategy_file_with, StrategyError};

use crate::{load_prelude, read, EXIT_OK, EXIT_USAGE};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CheckOutput {
    pub code: i32,
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

/// Parses each file without running anything. `.psl` files are strategy
/// files, whose names may refer to the prelude; anything else is a theory.
pub fn cmd_check(paths: &[PathBuf]) -> CheckOutput {
    let mut out = CheckOutput::default();
    for path in paths {
        let shown = path.display();
        let text = match read(path) {
            Ok(t) => t,
            Err(e) => {
                out.errors.push(e.to_string());
                continue;
            }
        };
        if text.trim().is_empty() {
            out.warnings.push(format!("{shown}: empty file"));
            continue;
        }
        let result = if path.extension().is_some_and(|e| e == "psl") {
            match parse_strategy_file(&text) {
                Err(StrategyError::Unresolved { .. }) => match load_prelude(false) {
                    Ok(prelude) => parse_strategy_file_with(&text, &prelude)
                        .map(drop)
                        .map_err(|e| e.to_string()),
                    Err(e) => Err(e.to_string()),
                },
                other => other.map(drop).map_err(|e| e.to_string()),
            }
        } else {
            parse_theory(&text).map(drop).map_err(|e| e.to_string())
        };
        if let Err(e) = result {
            out.errors.push(format!("{shown}: {e}"));
        }
    }
    out.code = if out.errors.is_empty() { EXIT_OK } else { EXIT_USAGE };
    out
}
