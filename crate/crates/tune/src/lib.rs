//! Derivative-free tuners.
//!
//! * [`bo`]: Gaussian-process Bayesian optimization with expected improvement
//!   over integer boxes, used for (s, Q) reorder parameters.
//! * [`grid`]: exhaustive grid search with stable ranking.
//! * [`asha`]: asynchronous successive halving for multi-fidelity sweeps.
//!
//! All tuners maximize their objective.

pub mod asha;
pub mod bo;
pub mod gp;
pub mod grid;
pub mod space;
pub mod trial;

pub use asha::{asha_run, AshaConfig, AshaOutcome, AshaScheduler, Decision, Job, TrialRunner};
pub use bo::{bo_optimize, expected_improvement, BoConfig, BoOutcome};
pub use gp::{GpSurrogate, KernelParams};
pub use grid::grid_search;
pub use space::{Dimension, Point, SearchSpace};
pub use trial::{append_trial_log, read_trial_log, TrialLogEntry, TrialRecord, TrialStatus};

use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum TuneError {
    #[error("search space is empty")]
    EmptySpace,
    #[error("dimension `{0}` has an empty range")]
    EmptyDimension(String),
    #[error("evaluation budget {budget} is smaller than the initial design ({initial})")]
    Budget { budget: usize, initial: usize },
    #[error("invalid ASHA setup: {0}")]
    Asha(String),
    #[error("budgets within a trial must strictly increase (got {got} after {last})")]
    BudgetOrder { last: u64, got: u64 },
}
