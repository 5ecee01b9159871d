//! Divergent two-echelon supply-chain inventory management.
//!
//! One factory (with its own warehouse) produces `num_products` product types
//! and ships them to `num_warehouses` distribution warehouses that face
//! seasonal stochastic demand. Unmet demand is backordered as negative stock.
//!
//! The crate provides the simulator ([`env`]), non-learning policies and the
//! shared evaluation routine ([`policy`]) and a clairvoyant planner with an
//! exhaustive validation oracle ([`oracle`]).

pub mod config;
pub mod demand;
pub mod env;
pub mod error;
pub mod oracle;
pub mod policy;

pub use config::ScenarioConfig;
pub use env::{ActionBounds, ActionVector, Env, InventoryState, RewardBreakdown, StepOutcome};
pub use error::{ConfigError, EnvError};
pub use policy::{evaluate_policy, evaluate_policy_par, run_episode, EvalSummary, Policy, RandomPolicy, SQParams, SQPolicy, ZeroPolicy};
