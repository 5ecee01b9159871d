//! Bayesian-optimization tuning of (s, Q) reorder parameters.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use scim_core::{evaluate_policy_par, ScenarioConfig, SQParams, SQPolicy};
use scim_tune::{bo_optimize, BoConfig, SearchSpace, TrialRecord};

use crate::BenchError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SqTuneConfig {
    /// Objective evaluations.
    pub budget: usize,
    /// Episodes per objective evaluation, on a fixed common seed set.
    pub tune_episodes: usize,
    pub tune_seed_base: u64,
    /// Seeds the optimizer's own randomness.
    pub bo_seed: u64,
}

impl Default for SqTuneConfig {
    fn default() -> Self {
        Self {
            budget: 200,
            tune_episodes: 30,
            tune_seed_base: 50_000,
            bo_seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SqTuneOutcome {
    pub params: SQParams,
    /// Objective value of `params` on the tuning seeds.
    pub tuned_mean: f64,
    pub history: Vec<TrialRecord>,
    pub space: SearchSpace,
}

/// Tuned parameters as stored on disk, tied to the scenario they were tuned on.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SqArtifact {
    pub scenario: ScenarioConfig,
    pub params: SQParams,
    pub tuned_mean: f64,
    pub tune: SqTuneConfig,
}

impl SqArtifact {
    pub fn save(&self, path: &Path) -> Result<(), BenchError> {
        std::fs::write(path, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, BenchError> {
        let a: SqArtifact = serde_json::from_str(&std::fs::read_to_string(path)?)?;
        a.params.validate(&a.scenario)?;
        Ok(a)
    }
}

pub fn sq_space(config: &ScenarioConfig) -> SearchSpace {
    let mut space = SearchSpace::new();
    let ranges = SQParams::search_ranges(config);
    for i in 0..config.num_products {
        for j in 0..config.num_nodes() {
            let k = 2 * (i * config.num_nodes() + j);
            space = space.int(format!("s_{i}_{j}"), ranges[k].0, ranges[k].1);
            space = space.int(format!("q_{i}_{j}"), ranges[k + 1].0, ranges[k + 1].1);
        }
    }
    space
}

/// Mean profit of `params` over `n` episodes seeded from `seed_base`.
pub fn sq_objective(config: &ScenarioConfig, params: &SQParams, n: usize, seed_base: u64) -> Result<f64, BenchError> {
    let policy = SQPolicy::new(config, params.clone())?;
    Ok(evaluate_policy_par(config, || policy.clone(), n, seed_base)?.mean)
}

pub fn tune_sq(config: &ScenarioConfig, tune: &SqTuneConfig) -> Result<SqTuneOutcome, BenchError> {
    if tune.tune_episodes == 0 {
        return Err(BenchError::Usage("tune_episodes must be positive".into()));
    }
    let space = sq_space(config);
    let mut rng = ChaCha8Rng::seed_from_u64(tune.bo_seed);
    let objective = |p: &Vec<i64>| {
        let params = SQParams::from_flat(config, p);
        sq_objective(config, &params, tune.tune_episodes, tune.tune_seed_base).unwrap_or(f64::NEG_INFINITY)
    };
    let out = bo_optimize(objective, &space, &BoConfig::with_budget(tune.budget), &mut rng)?;
    Ok(SqTuneOutcome {
        params: SQParams::from_flat(config, &out.best.params),
        tuned_mean: out.best.last_score().expect("best trial has a score"),
        history: out.history,
        space,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::builtin;

    #[test]
    fn space_matches_flat_layout() {
        let c = builtin("1p3w-exp1").unwrap();
        let space = sq_space(&c);
        assert_eq!(space.len(), 8);
        let ranges = SQParams::search_ranges(&c);
        for (k, (_, d)) in space.dims.iter().enumerate() {
            assert_eq!((d.lo(), d.hi()), ranges[k]);
        }
    }

    #[test]
    fn small_tuning_run_beats_doing_nothing() {
        let c = builtin("1p1w-exp2").unwrap();
        let tune = SqTuneConfig {
            budget: 20,
            tune_episodes: 5,
            ..SqTuneConfig::default()
        };
        let a = tune_sq(&c, &tune).unwrap();
        let zero = sq_objective(&c, &SQParams::zeros(&c), 5, tune.tune_seed_base).unwrap();
        assert!(a.tuned_mean > zero);
        let b = tune_sq(&c, &tune).unwrap();
        assert_eq!(a.params, b.params);
        assert_eq!(a.history.len(), 20);
    }

    #[test]
    fn artifact_round_trips() {
        let c = builtin("1p1w-exp1").unwrap();
        let art = SqArtifact {
            params: SQParams::from_flat(&c, &[3, 4, 5, 6]),
            scenario: c,
            tuned_mean: 12.5,
            tune: SqTuneConfig::default(),
        };
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sq.json");
        art.save(&path).unwrap();
        assert_eq!(SqArtifact::load(&path).unwrap(), art);
    }
}
