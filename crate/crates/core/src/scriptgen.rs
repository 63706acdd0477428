//! Proof scripts: emission from a winning trace and search-free replay.
//!
//! ```text
//! apply (erule conjE)
//! back
//! apply assumption
//! done
//! ```
//!
//! Each `back` line selects the next result of the step above it. The last
//! line is `done` for a finished proof, or `oops (* remaining: g2 *)`.

use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::ProofState;
use crate::tactics::{apply_step, ScriptTactic};
use crate::trace::TraceLog;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScriptStep {
    pub tactic: ScriptTactic,
    /// Result index selected with `back`.
    pub back: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Terminator {
    Done,
    /// Incomplete proof with the labels of the goals left open.
    Oops {
        remaining: Vec<String>,
    },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofScript {
    pub steps: Vec<ScriptStep>,
    pub terminator: Terminator,
}

impl ProofScript {
    pub fn is_complete(&self) -> bool {
        self.terminator == Terminator::Done
    }

    pub fn back_count(&self) -> usize {
        self.steps.iter().map(|s| s.back).sum()
    }
}

impl fmt::Display for ProofScript {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in &self.steps {
            writeln!(f, "{}", s.tactic.to_line())?;
            for _ in 0..s.back {
                writeln!(f, "back")?;
            }
        }
        match &self.terminator {
            Terminator::Done => writeln!(f, "done"),
            Terminator::Oops { remaining } => writeln!(f, "oops (* remaining: {} *)", remaining.join(" ")),
        }
    }
}

/// Script for a winning trace ending in `final_state`. Entries without
/// script text (assertions, identity steps) are skipped.
pub fn emit_script(log: &TraceLog, final_state: &ProofState) -> ProofScript {
    let steps = log
        .entries()
        .into_iter()
        .filter_map(|e| {
            let line = e.script?;
            let tactic = ScriptTactic::parse_line(&line).expect("trace entries hold rendered script steps");
            Some(ScriptStep {
                tactic,
                back: e.result_index,
            })
        })
        .collect();
    let terminator = if final_state.is_solved() {
        Terminator::Done
    } else {
        Terminator::Oops {
            remaining: final_state.open_labels(),
        }
    };
    ProofScript { steps, terminator }
}

#[derive(Error, Debug, Clone, PartialEq, Eq)]
pub enum ScriptError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("step {step} (`{text}`) has no result {index}")]
    StepFailed { step: usize, text: String, index: usize },
    #[error("script ends with `done` but goals remain: {}", .remaining.join(", "))]
    Unfinished { remaining: Vec<String> },
    #[error("script ends with `oops` but the proof is complete")]
    AlreadySolved,
    #[error("script expects open goals [{}] but replay leaves [{}]", .expected.join(", "), .actual.join(", "))]
    RemainingMismatch { expected: Vec<String>, actual: Vec<String> },
}

fn parse_oops(rest: &str) -> Option<Vec<String>> {
    let rest = rest.trim();
    if rest.is_empty() {
        return Some(Vec::new());
    }
    let inner = rest.strip_prefix("(*")?.strip_suffix("*)")?.trim();
    let labels = inner.strip_prefix("remaining:")?;
    Some(labels.split_whitespace().map(str::to_string).collect())
}

/// Parses script text. Blank lines are ignored.
pub fn parse_script(text: &str) -> Result<ProofScript, ScriptError> {
    let lines: Vec<(usize, &str)> = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .collect();
    let Some((&(last_no, last), body)) = lines.split_last() else {
        return Err(ScriptError::Syntax {
            line: 1,
            msg: "empty script".into(),
        });
    };
    let terminator = if last == "done" {
        Terminator::Done
    } else if let Some(rest) = last.strip_prefix("oops") {
        let remaining = parse_oops(rest).ok_or_else(|| ScriptError::Syntax {
            line: last_no,
            msg: "malformed `oops` comment".into(),
        })?;
        Terminator::Oops { remaining }
    } else {
        return Err(ScriptError::Syntax {
            line: last_no,
            msg: "a script must end with `done` or `oops`".into(),
        });
    };
    let mut steps: Vec<ScriptStep> = Vec::new();
    for &(no, line) in body {
        if line == "back" {
            match steps.last_mut() {
                Some(s) => s.back += 1,
                None => {
                    return Err(ScriptError::Syntax {
                        line: no,
                        msg: "`back` before the first step".into(),
                    })
                }
            }
            continue;
        }
        let tactic = ScriptTactic::parse_line(line).map_err(|e| ScriptError::Syntax {
            line: no,
            msg: e.to_string(),
        })?;
        steps.push(ScriptStep { tactic, back: 0 });
    }
    Ok(ProofScript { steps, terminator })
}

#[derive(Clone, Debug)]
pub struct Replay {
    pub state: ProofState,
    /// Result-stream elements forced by each step.
    pub forced: Vec<usize>,
}

/// Applies every step to `initial`, selecting result `back` of each, and
/// checks the terminator against the final state. No other alternative is
/// explored.
pub fn replay(script: &ProofScript, initial: &ProofState) -> Result<Replay, ScriptError> {
    let mut state = initial.clone();
    let mut forced = Vec::with_capacity(script.steps.len());
    for (i, step) in script.steps.iter().enumerate() {
        let counter = Arc::new(AtomicUsize::new(0));
        let seen = counter.clone();
        let results = apply_step(&step.tactic, &state).map(move |s| {
            seen.fetch_add(1, Ordering::SeqCst);
            s
        });
        let next = results.nth(step.back);
        forced.push(counter.load(Ordering::SeqCst));
        state = next.ok_or_else(|| ScriptError::StepFailed {
            step: i + 1,
            text: step.tactic.to_line(),
            index: step.back,
        })?;
    }
    match &script.terminator {
        Terminator::Done if !state.is_solved() => {
            return Err(ScriptError::Unfinished {
                remaining: state.open_labels(),
            })
        }
        Terminator::Oops { .. } if state.is_solved() => return Err(ScriptError::AlreadySolved),
        Terminator::Oops { remaining } if !remaining.is_empty() && *remaining != state.open_labels() => {
            return Err(ScriptError::RemainingMismatch {
                expected: remaining.clone(),
                actual: state.open_labels(),
            })
        }
        _ => {}
    }
    Ok(Replay { state, forced })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::theory::parse_theory;
    use crate::trace::TraceEntry;

    const NAT: &str = "
datatype nat = Zero | Suc nat
fun add Zero y = y
fun add (Suc x) y = Suc (add x y)
goal add_zero: add x Zero = x
";

    #[test]
    fn emitted_scripts_render_back_lines_and_terminators() {
        let th = parse_theory(NAT).unwrap();
        let s = th.proof_state(&["add_zero"]).unwrap();
        let log: TraceLog = [
            TraceEntry::scripted("Dynamic (Induct)", "apply (induct x)".into(), 0, 2),
            TraceEntry::silent("Quickcheck", 2),
            TraceEntry::scripted("Auto", "apply auto".into(), 1, 0),
        ]
        .into_iter()
        .collect();
        let script = emit_script(&log, &s.with_goals(vec![]));
        assert_eq!(script.to_string(), "apply (induct x)\napply auto\nback\ndone\n");
        let open = emit_script(&log, &s);
        assert_eq!(open.to_string().lines().last(), Some("oops (* remaining: add_zero *)"));
        assert_eq!(parse_script(&script.to_string()).unwrap(), script);
        assert_eq!(parse_script(&open.to_string()).unwrap(), open);
    }

    #[test]
    fn replay_follows_the_recorded_steps() {
        let th = parse_theory(NAT).unwrap();
        let s = th.proof_state(&["add_zero"]).unwrap();
        let script = parse_script("apply (induct x)\napply auto\ndone").unwrap();
        let r = replay(&script, &s).unwrap();
        assert!(r.state.is_solved());
        assert_eq!(r.forced, vec![1, 1]);
        let wrong = parse_script("apply auto\napply (induct x)\ndone").unwrap();
        assert!(matches!(
            replay(&wrong, &s),
            Err(ScriptError::StepFailed { step: 1, .. })
        ));
        let short = parse_script("apply (induct x)\ndone").unwrap();
        assert!(matches!(replay(&short, &s), Err(ScriptError::Unfinished { .. })));
    }

    #[test]
    fn malformed_scripts_are_rejected() {
        for bad in [
            "",
            "back\ndone",
            "apply auto",
            "frobnicate\ndone",
            "apply (induct)\ndone",
            "oops (* nope",
        ] {
            assert!(parse_script(bad).is_err(), "{bad:?}");
        }
    }
}
