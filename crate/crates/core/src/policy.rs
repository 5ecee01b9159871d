//! Non-learning policies and the shared episode evaluation routine.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::env::{ActionBounds, ActionVector, Env, InventoryState};
use crate::error::{ConfigError, EnvError};

/// A decision rule mapping observations to raw (continuous) actions.
///
/// Raw actions are discretized by [`ActionBounds::clip`] before stepping.
pub trait Policy {
    /// Called at the start of every episode with that episode's seed.
    fn reset(&mut self, _config: &ScenarioConfig, _episode_seed: u64) {}

    fn act(&mut self, observation: &[f64]) -> Vec<f64>;
}

impl<P: Policy + ?Sized> Policy for Box<P> {
    fn reset(&mut self, config: &ScenarioConfig, episode_seed: u64) {
        (**self).reset(config, episode_seed)
    }

    fn act(&mut self, observation: &[f64]) -> Vec<f64> {
        (**self).act(observation)
    }
}

/// Never produces or ships anything.
#[derive(Debug, Clone)]
pub struct ZeroPolicy {
    dim: usize,
}

impl ZeroPolicy {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self {
            dim: config.action_dim(),
        }
    }
}

impl Policy for ZeroPolicy {
    fn act(&mut self, _observation: &[f64]) -> Vec<f64> {
        vec![0.0; self.dim]
    }
}

/// Uniform integer action in every component's range.
pub fn random_act<R: Rng + ?Sized>(bounds: &ActionBounds, rng: &mut R) -> ActionVector {
    ActionVector {
        qty: bounds
            .upper
            .iter()
            .map(|row| row.iter().map(|&u| rng.gen_range(0..=u)).collect())
            .collect(),
    }
}

/// Uniformly random integer actions; the stream is reseeded per episode.
#[derive(Debug, Clone)]
pub struct RandomPolicy {
    bounds: ActionBounds,
    rng: ChaCha8Rng,
}

impl RandomPolicy {
    pub fn new(config: &ScenarioConfig, seed: u64) -> Self {
        Self {
            bounds: ActionBounds::from_config(config),
            rng: policy_rng(seed),
        }
    }
}

fn policy_rng(seed: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Keep the policy stream disjoint from the demand stream of the same seed.
    rng.set_stream(1);
    rng
}

impl Policy for RandomPolicy {
    fn reset(&mut self, _config: &ScenarioConfig, episode_seed: u64) {
        self.rng = policy_rng(episode_seed);
    }

    fn act(&mut self, _observation: &[f64]) -> Vec<f64> {
        random_act(&self.bounds, &mut self.rng).to_raw()
    }
}

/// Reorder points `s` and order quantities `q`, `[i][j]` with `j = 0..=J`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SQParams {
    pub s: Vec<Vec<i64>>,
    pub q: Vec<Vec<i64>>,
}

impl SQParams {
    pub fn zeros(config: &ScenarioConfig) -> Self {
        let z = vec![vec![0; config.num_nodes()]; config.num_products];
        Self { s: z.clone(), q: z }
    }

    /// Integer box `[(lo, hi)]` of the flat parameter vector, see [`SQParams::to_flat`].
    pub fn search_ranges(config: &ScenarioConfig) -> Vec<(i64, i64)> {
        let bounds = ActionBounds::from_config(config);
        let mut out = Vec::with_capacity(2 * config.action_dim());
        for i in 0..config.num_products {
            for j in 0..config.num_nodes() {
                out.push((0, config.storage_capacity[i][j]));
                out.push((0, bounds.upper[i][j]));
            }
        }
        out
    }

    /// Flat layout: for each `(i, j)` product-major, `s` then `q`.
    pub fn to_flat(&self) -> Vec<i64> {
        self.s
            .iter()
            .flatten()
            .zip(self.q.iter().flatten())
            .flat_map(|(&s, &q)| [s, q])
            .collect()
    }

    pub fn from_flat(config: &ScenarioConfig, flat: &[i64]) -> Self {
        let nodes = config.num_nodes();
        let mut p = Self::zeros(config);
        for (k, pair) in flat.chunks(2).enumerate() {
            let (i, j) = (k / nodes, k % nodes);
            p.s[i][j] = pair[0];
            p.q[i][j] = pair[1];
        }
        p
    }

    pub fn validate(&self, config: &ScenarioConfig) -> Result<(), ConfigError> {
        let shape_ok = |m: &Vec<Vec<i64>>| {
            m.len() == config.num_products && m.iter().all(|r| r.len() == config.num_nodes())
        };
        if !shape_ok(&self.s) || !shape_ok(&self.q) {
            return Err(ConfigError::Invalid {
                field: "sq_params".into(),
                reason: format!(
                    "expected {}x{} matrices for s and q",
                    config.num_products,
                    config.num_nodes()
                ),
            });
        }
        let bounds = ActionBounds::from_config(config);
        for i in 0..config.num_products {
            for j in 0..config.num_nodes() {
                let (s, q) = (self.s[i][j], self.q[i][j]);
                if !(0..=config.storage_capacity[i][j]).contains(&s) {
                    return Err(ConfigError::Invalid {
                        field: format!("s[{i}][{j}]"),
                        reason: format!("{s} outside [0, {}]", config.storage_capacity[i][j]),
                    });
                }
                if !(0..=bounds.upper[i][j]).contains(&q) {
                    return Err(ConfigError::Invalid {
                        field: format!("q[{i}][{j}]"),
                        reason: format!("{q} outside [0, {}]", bounds.upper[i][j]),
                    });
                }
            }
        }
        Ok(())
    }
}

/// Orders `q[i][j]` whenever `stock[i][j]` is strictly below `s[i][j]`.
/// Node 0 is the production order, triggered by the factory stock.
pub fn sq_act(params: &SQParams, bounds: &ActionBounds, state: &InventoryState) -> ActionVector {
    sq_from_stocks(params, bounds, state.stock.iter().flatten().copied())
}

fn sq_from_stocks(
    params: &SQParams,
    bounds: &ActionBounds,
    stocks: impl Iterator<Item = i64>,
) -> ActionVector {
    let raw: Vec<f64> = params
        .s
        .iter()
        .flatten()
        .zip(params.q.iter().flatten())
        .zip(stocks)
        .map(|((&s, &q), stock)| if stock < s { q as f64 } else { 0.0 })
        .collect();
    bounds
        .clip(&raw)
        .expect("parameter shape matches the action layout")
}

/// (s, Q) rule reading stock levels from the head of the observation.
#[derive(Debug, Clone)]
pub struct SQPolicy {
    params: SQParams,
    bounds: ActionBounds,
}

impl SQPolicy {
    pub fn new(config: &ScenarioConfig, params: SQParams) -> Result<Self, ConfigError> {
        params.validate(config)?;
        Ok(Self {
            params,
            bounds: ActionBounds::from_config(config),
        })
    }

    pub fn params(&self) -> &SQParams {
        &self.params
    }
}

impl Policy for SQPolicy {
    fn act(&mut self, observation: &[f64]) -> Vec<f64> {
        let stocks = observation[..self.bounds.len()].iter().map(|&x| x as i64);
        sq_from_stocks(&self.params, &self.bounds, stocks).to_raw()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalSummary {
    pub mean: f64,
    /// Population standard deviation.
    pub std: f64,
    pub per_episode: Vec<f64>,
}

impl EvalSummary {
    pub fn from_profits(per_episode: Vec<f64>) -> Self {
        let n = per_episode.len().max(1) as f64;
        let mean = per_episode.iter().sum::<f64>() / n;
        let var = per_episode.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
        Self {
            mean,
            std: var.sqrt(),
            per_episode,
        }
    }
}

/// Runs one full episode with seed `seed` and returns the undiscounted profit.
pub fn run_episode<P: Policy + ?Sized>(
    config: &ScenarioConfig,
    policy: &mut P,
    seed: u64,
) -> Result<f64, EnvError> {
    let mut env = Env::new(config.clone(), seed).expect("config validated by caller");
    let mut obs = env.reset();
    policy.reset(config, seed);
    let mut total = 0.0;
    while !env.is_done() {
        let raw = policy.act(&obs);
        let out = env.step_raw(&raw)?;
        total += out.reward;
        obs = out.observation;
    }
    Ok(total)
}

/// Evaluates `policy` on episodes seeded `seed_base..seed_base + n_episodes`.
pub fn evaluate_policy<P: Policy + ?Sized>(
    config: &ScenarioConfig,
    policy: &mut P,
    n_episodes: usize,
    seed_base: u64,
) -> Result<EvalSummary, EnvError> {
    assert!(n_episodes >= 1, "n_episodes must be at least 1");
    let profits = (0..n_episodes as u64)
        .map(|k| run_episode(config, policy, seed_base + k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EvalSummary::from_profits(profits))
}

/// Parallel variant of [`evaluate_policy`]: each episode gets a fresh policy
/// from `make`. Results are merged in seed order, so the summary matches the
/// sequential routine whenever `make` returns equivalent policies.
pub fn evaluate_policy_par<P, F>(
    config: &ScenarioConfig,
    make: F,
    n_episodes: usize,
    seed_base: u64,
) -> Result<EvalSummary, EnvError>
where
    P: Policy,
    F: Fn() -> P + Sync,
{
    assert!(n_episodes >= 1, "n_episodes must be at least 1");
    let profits = (0..n_episodes as u64)
        .into_par_iter()
        .map(|k| run_episode(config, &mut make(), seed_base + k))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EvalSummary::from_profits(profits))
}
