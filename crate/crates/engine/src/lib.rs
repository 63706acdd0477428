//! Strategy interpreter: depth-bounded backtracking search over lazy result
//! streams, threading the trace of the current path.
//!
//! Every atom runs through [`Interp::iddfc`], which fails once the path
//! already holds as many entries as the current depth limit. [`search`]
//! retries with growing limits until some result appears.

mod computation;
mod interp;
mod search;

pub use computation::SearchComputation;
pub use interp::{Counters, Interp};
pub use search::{
    search, BudgetError, DepthBudget, LimitStats, NoProof, Proof, SearchConfig, SearchOutcome, SearchStats,
};
