//! JSON checkpoints and CSV learning curves.
//!
//! A checkpoint is one JSON object:
//!
//! ```text
//! { "format": 1, "algo": "ppo", "seed": 7,
//!   "train": { ...TrainConfig... }, "scenario": { ...ScenarioConfig... },
//!   "agent": { "policy": {"sizes": [...], "params": [...]},
//!              "value": {...}, "head": {"log_std": [...], "upper": [...]},
//!              "obs_scale": [...] } }
//! ```

use std::path::Path;

use serde::{Deserialize, Serialize};

use scim_core::ScenarioConfig;

use crate::agent::{ActorCritic, GreedyPolicy};
use crate::train::{Algo, CurvePoint, TrainConfig};
use crate::RlError;

pub const CHECKPOINT_FORMAT: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Checkpoint {
    pub format: u32,
    pub algo: Algo,
    pub seed: u64,
    pub train: TrainConfig,
    pub scenario: ScenarioConfig,
    pub agent: ActorCritic,
}

impl Checkpoint {
    pub fn new(algo: Algo, seed: u64, train: TrainConfig, scenario: ScenarioConfig, agent: ActorCritic) -> Self {
        Self {
            format: CHECKPOINT_FORMAT,
            algo,
            seed,
            train,
            scenario,
            agent,
        }
    }

    pub fn save(&self, path: &Path) -> Result<(), RlError> {
        std::fs::write(path, serde_json::to_string(self)?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, RlError> {
        let ck: Checkpoint = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        if ck.format != CHECKPOINT_FORMAT {
            return Err(RlError::Config(format!(
                "{}: checkpoint format {} is not supported (expected {CHECKPOINT_FORMAT})",
                path.display(),
                ck.format
            )));
        }
        let dim = ck.scenario.observation_dim();
        if ck.agent.obs_scale.len() != dim || ck.agent.policy.input_dim() != dim {
            return Err(RlError::Shape {
                what: "checkpoint observation size",
                expected: dim,
                got: ck.agent.policy.input_dim(),
            });
        }
        Ok(ck)
    }

    pub fn policy(&self) -> GreedyPolicy {
        self.agent.greedy_policy()
    }
}

/// Writes `episode,eval_mean,eval_std` rows.
pub fn write_curve_csv(path: &Path, curve: &[CurvePoint]) -> Result<(), RlError> {
    let mut w = csv::Writer::from_path(path)?;
    for p in curve {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_curve_csv(path: &Path) -> Result<Vec<CurvePoint>, RlError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.deserialize().collect::<Result<Vec<CurvePoint>, _>>()?)
}
