//! DRL hyperparameter sweeps over the tuning grid: grid search at full
//! budget, or ASHA with training episodes as the resource.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use scim_core::{evaluate_policy_par, ScenarioConfig};
use scim_rl::{train, Algo, TrainConfig};
use scim_tune::{asha_run, grid_search, AshaConfig, Dimension, Point, SearchSpace, TrialLogEntry, TrialRecord};

use crate::BenchError;

/// The tuning grid for `algo`. Values are kept as strings and
/// parsed in [`apply_point`].
pub fn hyper_space(algo: Algo) -> SearchSpace {
    let space = SearchSpace::new().categorical("hidden", ["64x64", "128x128"]);
    match algo {
        Algo::Vpg => space
            .categorical("lr", ["4e-4", "4e-3"])
            .categorical("fragment_len", ["10", "100"])
            .categorical("batch_size", ["200", "2000"]),
        Algo::Ppo => space
            .categorical("lr", ["5e-4", "5e-3"])
            .categorical("fragment_len", ["20", "200"])
            .categorical("batch_size", ["400", "4000"])
            .categorical("max_grad_norm", ["0", "20"])
            .categorical("minibatch", ["128", "256"])
            .categorical("epochs", ["15", "30"]),
    }
}

/// Overrides the fields of `base` named by the dimensions of `space`.
pub fn apply_point(base: &TrainConfig, space: &SearchSpace, point: &Point) -> Result<TrainConfig, BenchError> {
    let mut cfg = base.clone();
    for ((name, dim), &idx) in space.dims.iter().zip(point) {
        let Dimension::Categorical { choices } = dim else {
            return Err(BenchError::Usage(format!("sweep dimension `{name}` is not categorical")));
        };
        let value = choices
            .get(idx as usize)
            .ok_or_else(|| BenchError::Usage(format!("choice {idx} out of range for `{name}`")))?;
        let bad = || BenchError::Usage(format!("cannot parse `{value}` for `{name}`"));
        match name.as_str() {
            "hidden" => {
                cfg.hidden = value
                    .split('x')
                    .map(|w| w.parse().map_err(|_| bad()))
                    .collect::<Result<_, _>>()?
            }
            "lr" => cfg.lr = value.parse().map_err(|_| bad())?,
            "fragment_len" => cfg.fragment_len = value.parse().map_err(|_| bad())?,
            "batch_size" => cfg.batch_size = value.parse().map_err(|_| bad())?,
            "max_grad_norm" => cfg.max_grad_norm = value.parse().map_err(|_| bad())?,
            "minibatch" => cfg.minibatch = value.parse().map_err(|_| bad())?,
            "epochs" => cfg.epochs = value.parse().map_err(|_| bad())?,
            _ => return Err(BenchError::Usage(format!("unknown sweep dimension `{name}`"))),
        }
    }
    cfg.validate()?;
    Ok(cfg)
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub algo: Algo,
    pub base: TrainConfig,
    /// Training seed shared by every trial.
    pub seed: u64,
    /// Episodes used to score a trained agent.
    pub score_episodes: usize,
    pub score_seed_base: u64,
}

/// Trains from scratch with `episodes` and scores the greedy policy. A
/// diverged run scores negative infinity.
fn score_trial(
    sweep: &SweepConfig,
    scenario: &ScenarioConfig,
    space: &SearchSpace,
    point: &Point,
    episodes: usize,
) -> f64 {
    let Ok(mut cfg) = apply_point(&sweep.base, space, point) else {
        return f64::NEG_INFINITY;
    };
    cfg.episodes = episodes;
    cfg.eval_every = 0;
    cfg.eval_episodes = 1;
    match train(sweep.algo, &cfg, scenario, sweep.seed) {
        Ok(out) => {
            let policy = out.agent.greedy_policy();
            evaluate_policy_par(scenario, || policy.clone(), sweep.score_episodes, sweep.score_seed_base)
                .map(|s| s.mean)
                .unwrap_or(f64::NEG_INFINITY)
        }
        Err(_) => f64::NEG_INFINITY,
    }
}

/// Every grid point at `sweep.base.episodes`, ranked best first.
pub fn grid_sweep(sweep: &SweepConfig, scenario: &ScenarioConfig, parallelism: usize) -> Result<Vec<TrialRecord>, BenchError> {
    let space = hyper_space(sweep.algo);
    let episodes = sweep.base.episodes;
    Ok(grid_search(&space, |p| score_trial(sweep, scenario, &space, p, episodes), parallelism)?)
}

/// ASHA over randomly drawn grid points with rungs measured in training
/// episodes. A promoted trial is retrained from scratch at the larger budget,
/// so scores at every rung come from the same training seed.
pub fn asha_sweep(
    sweep: &SweepConfig,
    scenario: &ScenarioConfig,
    asha: &AshaConfig,
    rng_seed: u64,
) -> Result<(TrialRecord, Vec<TrialLogEntry>), BenchError> {
    let space = hyper_space(sweep.algo);
    let runner = |_trial: usize, p: &Point, _from: u64, to: u64| score_trial(sweep, scenario, &space, p, to as usize);
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let out = asha_run(&runner, &space, asha, &mut rng)?;
    Ok((out.best, out.log))
}
