//! Seasonal stochastic demand.
//!
//! `d[i][j][t] = floor(d_max/2 * (1 + cos(4*pi*(2*i'*j + t) / T)) + U(0, d_var))`
//! with `i'` the 1-based product index and `j` the 1-based warehouse index.
//! The environment and the clairvoyant planner draw from the same stream, so
//! a [`DemandSampler`] seeded identically reproduces a live rollout exactly.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ScenarioConfig;

/// Deterministic (noise-free) part of the demand curve.
///
/// `product` is 0-based; `warehouse` is 1-based (`1..=J`).
pub fn seasonal_component(config: &ScenarioConfig, product: usize, warehouse: usize, t: usize) -> f64 {
    let d_max = config.demand_max[product];
    let phase = 2.0 * (product + 1) as f64 * warehouse as f64 + t as f64;
    let angle = 4.0 * PI * phase / config.episode_length as f64;
    d_max / 2.0 * (1.0 + angle.cos())
}

/// Demand for one (product, warehouse, step) given a noise draw `u` in `[0, 1)`.
pub fn demand_from_noise(
    config: &ScenarioConfig,
    product: usize,
    warehouse: usize,
    t: usize,
    u: f64,
) -> i64 {
    let noisy = seasonal_component(config, product, warehouse, t) + u * config.demand_var[product];
    noisy.floor() as i64
}

/// Samples one demand value, consuming exactly one uniform draw from `rng`.
pub fn sample_demand<R: Rng + ?Sized>(
    config: &ScenarioConfig,
    product: usize,
    warehouse: usize,
    t: usize,
    rng: &mut R,
) -> i64 {
    let u: f64 = rng.gen();
    demand_from_noise(config, product, warehouse, t, u)
}

/// Per-instance demand stream.
#[derive(Debug, Clone)]
pub struct DemandSampler {
    rng: ChaCha8Rng,
}

impl DemandSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Draws the full demand matrix `[i][j - 1]` for step `t`, product-major.
    pub fn draw_step(&mut self, config: &ScenarioConfig, t: usize) -> Vec<Vec<i64>> {
        (0..config.num_products)
            .map(|i| {
                (1..=config.num_warehouses)
                    .map(|j| sample_demand(config, i, j, t, &mut self.rng))
                    .collect()
            })
            .collect()
    }
}
