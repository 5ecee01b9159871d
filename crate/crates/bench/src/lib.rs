//! Scenario registry, (s, Q) tuning, the benchmark protocol and result files
//! behind the `scim` command-line tool.

pub mod bench;
pub mod registry;
pub mod results;
pub mod sq;
pub mod sweep;

use thiserror::Error;

pub use bench::{artifact_path, evaluate_method, run_benchmark, BenchOptions, Method};
pub use registry::{builtin, builtins, expand, labels, load_scenario, NAMES};
pub use results::{export_results, import_results, render_table, Format, ResultRecord};
pub use sq::{sq_objective, sq_space, tune_sq, SqArtifact, SqTuneConfig, SqTuneOutcome};
pub use sweep::{apply_point, asha_sweep, grid_sweep, hyper_space, SweepConfig};

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("unknown scenario `{name}` (not a file either); registered: {known}")]
    UnknownScenario { name: String, known: String },
    #[error("scenario file {path}: {source}")]
    ScenarioFile {
        path: String,
        source: scim_core::ConfigError,
    },
    #[error("{0}")]
    Usage(String),
    #[error("method `{method}` on `{scenario}` needs {path}; {hint}")]
    MissingArtifact {
        method: String,
        scenario: String,
        path: String,
        hint: String,
    },
    #[error("artifact {path} was produced for a different scenario")]
    ScenarioMismatch { path: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Rl(#[from] scim_rl::RlError),
    #[error(transparent)]
    Tune(#[from] scim_tune::TuneError),
    #[error(transparent)]
    Oracle(#[from] scim_core::oracle::OracleError),
    #[error(transparent)]
    Env(#[from] scim_core::EnvError),
    #[error(transparent)]
    Config(#[from] scim_core::ConfigError),
}
