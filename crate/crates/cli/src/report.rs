use serde::Serialize;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct LimitReport {
    pub limit: usize,
    pub atom_calls: usize,
    pub atoms_applied: usize,
    pub variants_generated: usize,
    pub variants_deduped: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CounterexampleReport {
    pub goal: String,
    pub tool: String,
    pub assignment: String,
}

/// Machine-readable summary of one `prove` run.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Report {
    /// `proved`, `incomplete`, or `no_proof`.
    pub status: String,
    /// `incomplete`, `timeout`, or `exhausted`; absent for proofs.
    pub reason: Option<String>,
    pub goals: Vec<String>,
    pub strategy: String,
    pub threads: usize,
    pub wall_time_ms: f64,
    pub atom_calls: usize,
    pub atoms_applied: usize,
    pub max_log_length: usize,
    pub winning_log_length: Option<usize>,
    pub depth_limit: Option<usize>,
    pub peak_pending_branches: usize,
    pub variants_generated: usize,
    pub variants_deduped: usize,
    pub variants_failed: usize,
    pub per_limit: Vec<LimitReport>,
    pub remaining_goals: Vec<String>,
    pub counterexamples: Vec<CounterexampleReport>,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}
