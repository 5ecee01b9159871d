use rand::Rng;
use serde::{Deserialize, Serialize};

use scim_core::{ActionBounds, Policy, ScenarioConfig};

use crate::head::{GaussianHead, Sample};
use crate::mlp::Mlp;
use crate::RlError;

/// Separate policy and value networks plus a state-independent log-std.
///
/// Flat parameter layout: `[policy | log_std | value]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ActorCritic {
    pub policy: Mlp,
    pub value: Mlp,
    pub head: GaussianHead,
    /// Observations are divided by these before entering either network.
    pub obs_scale: Vec<f64>,
}

/// Per-dimension observation scales: capacity for stocks, `d_max + d_var`
/// for demand history. Zero scales become 1.
pub fn observation_scale(config: &ScenarioConfig) -> Vec<f64> {
    let fix = |x: f64| if x > 0.0 { x } else { 1.0 };
    let mut out = Vec::with_capacity(config.observation_dim());
    for caps in &config.storage_capacity {
        out.extend(caps.iter().map(|&c| fix(c as f64)));
    }
    for _ in 0..config.history_len {
        for i in 0..config.num_products {
            let d = fix(config.demand_max[i] + config.demand_var[i]);
            out.extend(std::iter::repeat_n(d, config.num_warehouses));
        }
    }
    out
}

/// Squash ranges: one past each integer bound, so flooring a squashed value
/// can reach every integer in `0..=bound`.
pub fn squash_upper(config: &ScenarioConfig) -> Vec<f64> {
    ActionBounds::from_config(config)
        .flat_upper()
        .iter()
        .map(|&u| (u + 1) as f64)
        .collect()
}

/// One environment step's worth of sampling output.
#[derive(Debug, Clone)]
pub struct Act {
    pub obs: Vec<f64>,
    pub sample: Sample,
    pub value: f64,
}

impl ActorCritic {
    pub fn new<R: Rng + ?Sized>(config: &ScenarioConfig, hidden: &[usize], rng: &mut R) -> Self {
        let n_obs = config.observation_dim();
        let n_act = config.action_dim();
        let sizes = |out: usize| {
            let mut s = vec![n_obs];
            s.extend_from_slice(hidden);
            s.push(out);
            s
        };
        let mut policy = Mlp::new(&sizes(n_act), rng);
        policy.scale_output_layer(0.01);
        let value = Mlp::new(&sizes(1), rng);
        Self {
            policy,
            value,
            head: GaussianHead::new(squash_upper(config)),
            obs_scale: observation_scale(config),
        }
    }

    pub fn num_params(&self) -> usize {
        self.policy.params().len() + self.head.log_std.len() + self.value.params().len()
    }

    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.num_params());
        v.extend_from_slice(self.policy.params());
        v.extend_from_slice(&self.head.log_std);
        v.extend_from_slice(self.value.params());
        v
    }

    pub fn set_flat(&mut self, flat: &[f64]) {
        assert_eq!(flat.len(), self.num_params(), "flat parameter length");
        let (a, rest) = flat.split_at(self.policy.params().len());
        let (b, c) = rest.split_at(self.head.log_std.len());
        self.policy.params_mut().copy_from_slice(a);
        self.head.log_std.copy_from_slice(b);
        self.value.params_mut().copy_from_slice(c);
    }

    /// Offsets of the log-std and value blocks in the flat layout.
    pub fn layout(&self) -> (usize, usize) {
        let p = self.policy.params().len();
        (p, p + self.head.log_std.len())
    }

    pub fn normalize(&self, obs: &[f64]) -> Result<Vec<f64>, RlError> {
        if obs.len() != self.obs_scale.len() {
            return Err(RlError::Shape {
                what: "observation",
                expected: self.obs_scale.len(),
                got: obs.len(),
            });
        }
        Ok(obs.iter().zip(&self.obs_scale).map(|(o, s)| o / s).collect())
    }

    pub fn value_of(&self, norm_obs: &[f64]) -> Result<f64, RlError> {
        Ok(self.value.forward(norm_obs)?[0])
    }

    /// Samples an action for a raw observation.
    pub fn act<R: Rng + ?Sized>(&self, obs: &[f64], rng: &mut R) -> Result<Act, RlError> {
        let norm = self.normalize(obs)?;
        let mean = self.policy.forward(&norm)?;
        let sample = self.head.sample(&mean, rng);
        let value = self.value_of(&norm)?;
        Ok(Act {
            obs: norm,
            sample,
            value,
        })
    }

    pub fn greedy_action(&self, obs: &[f64]) -> Result<Vec<f64>, RlError> {
        let mean = self.policy.forward(&self.normalize(obs)?)?;
        Ok(self.head.greedy(&mean))
    }

    pub fn greedy_policy(&self) -> GreedyPolicy {
        GreedyPolicy { agent: self.clone() }
    }
}

/// Deterministic evaluation policy: the squashed mean action.
#[derive(Debug, Clone)]
pub struct GreedyPolicy {
    pub agent: ActorCritic,
}

impl Policy for GreedyPolicy {
    fn act(&mut self, observation: &[f64]) -> Vec<f64> {
        self.agent
            .greedy_action(observation)
            .expect("observation length fixed by the scenario")
    }
}
