//! Policy-gradient agents for the inventory environment.
//!
//! Everything is computed by hand: a small tanh [`mlp::Mlp`] with reverse-mode
//! gradients, a sigmoid-squashed Gaussian action head, GAE, and the VPG and
//! PPO updates. [`train`] alternates rollout collection and updates and
//! records a greedy-policy learning curve.

pub mod agent;
pub mod buffer;
pub mod checkpoint;
pub mod head;
pub mod mlp;
pub mod optim;
pub mod train;
pub mod update;

pub use agent::{ActorCritic, GreedyPolicy};
pub use buffer::{compute_gae, RolloutBuffer};
pub use checkpoint::{read_curve_csv, write_curve_csv, Checkpoint};
pub use head::GaussianHead;
pub use mlp::Mlp;
pub use optim::{Optimizer, OptimizerKind};
pub use train::{train, Algo, CurvePoint, TrainConfig, TrainOutcome};
pub use update::{loss_and_grad, ppo_update, vpg_update, Batch, LossStats, LossWeights, PpoSchedule, Surrogate};

use scim_core::{ConfigError, EnvError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum RlError {
    #[error("{what}: expected length {expected}, got {got}")]
    Shape {
        what: &'static str,
        expected: usize,
        got: usize,
    },
    #[error("training diverged at update {update}: {detail}")]
    Divergence { update: usize, detail: String },
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Scenario(#[from] ConfigError),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
