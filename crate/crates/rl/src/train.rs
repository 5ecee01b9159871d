use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use scim_core::{evaluate_policy_par, Env, ScenarioConfig};

use crate::agent::ActorCritic;
use crate::buffer::RolloutBuffer;
use crate::optim::{Optimizer, OptimizerKind};
use crate::update::{ppo_update, vpg_update, Batch, LossStats, LossWeights, PpoSchedule};
use crate::RlError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Vpg,
    Ppo,
}

impl fmt::Display for Algo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Algo::Vpg => "vpg",
            Algo::Ppo => "ppo",
        })
    }
}

impl FromStr for Algo {
    type Err = RlError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "vpg" => Ok(Algo::Vpg),
            "ppo" => Ok(Algo::Ppo),
            other => Err(RlError::Config(format!("unknown algorithm `{other}` (expected vpg or ppo)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub hidden: Vec<usize>,
    pub lr: f64,
    pub gamma: f64,
    pub lambda: f64,
    /// Steps collected per fragment before a value bootstrap.
    pub fragment_len: usize,
    /// Steps per update, rounded up to whole fragments.
    pub batch_size: usize,
    pub clip_eps: f64,
    pub epochs: usize,
    pub minibatch: usize,
    /// Gradient L2 clip; 0 disables clipping.
    pub max_grad_norm: f64,
    /// Training episodes.
    pub episodes: usize,
    pub optimizer: OptimizerKind,
    /// Rewards are multiplied by this before entering the buffer.
    pub reward_scale: f64,
    pub vf_coef: f64,
    pub ent_coef: f64,
    pub normalize_advantages: bool,
    /// Greedy evaluation cadence in training episodes; 0 evaluates only at
    /// the start and the end.
    pub eval_every: usize,
    pub eval_episodes: usize,
    pub eval_seed_base: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            hidden: vec![64, 64],
            lr: 5e-4,
            gamma: 0.99,
            lambda: 0.95,
            fragment_len: 200,
            batch_size: 4000,
            clip_eps: 0.2,
            epochs: 15,
            minibatch: 128,
            max_grad_norm: 0.0,
            episodes: 3000,
            optimizer: OptimizerKind::Sgd,
            reward_scale: 0.01,
            vf_coef: 0.5,
            ent_coef: 0.0,
            normalize_advantages: true,
            eval_every: 250,
            eval_episodes: 50,
            eval_seed_base: 100_000,
        }
    }
}

impl TrainConfig {
    /// Desk-scale settings used by the command line and benchmarks.
    pub fn preset(algo: Algo) -> Self {
        match algo {
            Algo::Ppo => Self {
                optimizer: OptimizerKind::Adam,
                lr: 5e-4,
                fragment_len: 200,
                batch_size: 1000,
                epochs: 15,
                minibatch: 128,
                max_grad_norm: 20.0,
                ..Self::default()
            },
            Algo::Vpg => Self {
                optimizer: OptimizerKind::Adam,
                lr: 4e-3,
                fragment_len: 100,
                batch_size: 1000,
                epochs: 1,
                ..Self::default()
            },
        }
    }

    pub fn validate(&self) -> Result<(), RlError> {
        let bad = |what: &str| Err(RlError::Config(what.to_string()));
        if !(0.0..=1.0).contains(&self.gamma) {
            return bad("gamma must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return bad("lambda must lie in [0, 1]");
        }
        if !(self.clip_eps > 0.0) {
            return bad("clip_eps must be positive");
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return bad("lr must be positive");
        }
        if self.fragment_len == 0 || self.batch_size == 0 || self.epochs == 0 || self.minibatch == 0 {
            return bad("fragment_len, batch_size, epochs and minibatch must be positive");
        }
        if self.eval_episodes == 0 {
            return bad("eval_episodes must be positive");
        }
        if self.hidden.iter().any(|&h| h == 0) {
            return bad("hidden layer sizes must be positive");
        }
        if !(self.reward_scale > 0.0 && self.reward_scale.is_finite()) {
            return bad("reward_scale must be positive");
        }
        Ok(())
    }
}

/// Greedy-policy evaluation after `episode` training episodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub episode: usize,
    pub eval_mean: f64,
    pub eval_std: f64,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub agent: ActorCritic,
    pub curve: Vec<CurvePoint>,
    pub updates: usize,
    pub episodes: usize,
    pub last_stats: Option<LossStats>,
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn evaluate(agent: &ActorCritic, scenario: &ScenarioConfig, cfg: &TrainConfig, episode: usize) -> Result<CurvePoint, RlError> {
    let s = evaluate_policy_par(scenario, || agent.greedy_policy(), cfg.eval_episodes, cfg.eval_seed_base)?;
    Ok(CurvePoint {
        episode,
        eval_mean: s.mean,
        eval_std: s.std,
    })
}

/// Trains a fresh agent for `config.episodes` episodes. Bit-for-bit
/// reproducible for a given `(algo, config, scenario, seed)`.
pub fn train(algo: Algo, config: &TrainConfig, scenario: &ScenarioConfig, seed: u64) -> Result<TrainOutcome, RlError> {
    config.validate()?;
    scenario.validate()?;
    let mut init_rng = stream(seed, 0);
    let mut act_rng = stream(seed, 1);
    let mut episode_seeds = stream(seed, 2);
    let mut shuffle_rng = stream(seed, 3);

    let mut agent = ActorCritic::new(scenario, &config.hidden, &mut init_rng);
    let mut opt = Optimizer::new(config.optimizer, config.lr, agent.num_params());
    let weights = LossWeights {
        vf_coef: config.vf_coef,
        ent_coef: config.ent_coef,
    };

    let mut curve = vec![evaluate(&agent, scenario, config, 0)?];
    let mut env = Env::new(scenario.clone(), episode_seeds.gen())?;
    let mut obs = env.reset();
    let mut episodes = 0;
    let mut updates = 0;
    let mut next_eval = config.eval_every;
    let mut last_stats = None;
    let mut buf = RolloutBuffer::new();

    while episodes < config.episodes {
        buf.clear();
        while buf.len() < config.batch_size && episodes < config.episodes {
            for _ in 0..config.fragment_len {
                let act = agent.act(&obs, &mut act_rng)?;
                let out = env.step_raw(&act.sample.action)?;
                buf.push(
                    act.obs,
                    act.sample.z,
                    act.sample.log_prob,
                    out.reward * config.reward_scale,
                    act.value,
                    out.done,
                );
                if out.done {
                    episodes += 1;
                    obs = env.reset_with_seed(episode_seeds.gen());
                    if episodes == config.episodes {
                        break;
                    }
                } else {
                    obs = out.observation;
                }
            }
            if buf.done.last() == Some(&false) {
                let v = agent.value_of(&agent.normalize(&obs)?)?;
                buf.cut(v);
            }
        }

        let batch = Batch::from_buffer(&buf, config.gamma, config.lambda, config.normalize_advantages);
        let stats = match algo {
            Algo::Vpg => vpg_update(&mut agent, &mut opt, &batch, weights, config.max_grad_norm, updates)?,
            Algo::Ppo => {
                let schedule = PpoSchedule {
                    clip_eps: config.clip_eps,
                    epochs: config.epochs,
                    minibatch: config.minibatch,
                };
                let per_epoch = ppo_update(
                    &mut agent,
                    &mut opt,
                    &batch,
                    schedule,
                    weights,
                    config.max_grad_norm,
                    updates,
                    &mut shuffle_rng,
                )?;
                *per_epoch.last().expect("at least one epoch")
            }
        };
        last_stats = Some(stats);
        updates += 1;

        if config.eval_every > 0 && episodes >= next_eval {
            curve.push(evaluate(&agent, scenario, config, episodes)?);
            while next_eval <= episodes {
                next_eval += config.eval_every;
            }
        }
    }
    if curve.last().map(|p| p.episode) != Some(episodes) {
        curve.push(evaluate(&agent, scenario, config, episodes)?);
    }

    Ok(TrainOutcome {
        agent,
        curve,
        updates,
        episodes,
        last_stats,
    })
}
