//! The inventory MDP.
//!
//! Observation layout (length `I*(J+1) + I*J*tau`):
//!
//! 1. stock levels, product-major: `q[0][0], q[0][1], .., q[0][J], q[1][0], ..`
//! 2. the last `tau` demand matrices, oldest first, each product-major over
//!    warehouses `1..=J`.
//!
//! Action layout (length `I*(J+1)`): product-major, node 0 is production and
//! nodes `1..=J` are shipments from the factory warehouse.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::config::ScenarioConfig;
use crate::demand::DemandSampler;
use crate::error::{ConfigError, EnvError};

/// Inclusive integer bounds `[0, upper]` per action component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionBounds {
    /// `[i][j]`, `j = 0..=J`.
    pub upper: Vec<Vec<i64>>,
}

impl ActionBounds {
    /// Production at product `i` is bounded by the sum of all node capacities
    /// for that product; shipment to warehouse `j` by that warehouse's capacity.
    pub fn from_config(config: &ScenarioConfig) -> Self {
        let upper = config
            .storage_capacity
            .iter()
            .map(|caps| {
                let total: i64 = caps.iter().sum();
                std::iter::once(total).chain(caps[1..].iter().copied()).collect()
            })
            .collect();
        Self { upper }
    }

    pub fn len(&self) -> usize {
        self.upper.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(lower, upper)` pairs in flat action order.
    pub fn ranges(&self) -> Vec<(i64, i64)> {
        self.upper.iter().flatten().map(|&u| (0, u)).collect()
    }

    pub fn flat_upper(&self) -> Vec<i64> {
        self.upper.iter().flatten().copied().collect()
    }

    /// Floors each component then clamps it into its range.
    pub fn clip(&self, raw: &[f64]) -> Result<ActionVector, EnvError> {
        if raw.len() != self.len() {
            return Err(EnvError::ActionLength {
                expected: self.len(),
                got: raw.len(),
            });
        }
        let mut it = raw.iter();
        let qty = self
            .upper
            .iter()
            .map(|row| {
                row.iter()
                    .map(|&u| {
                        let x = it.next().copied().unwrap_or(0.0);
                        // NaN maps to 0 through the saturating cast.
                        let floored = x.floor();
                        let v = if floored.is_nan() { 0 } else { floored as i64 };
                        v.clamp(0, u)
                    })
                    .collect()
            })
            .collect();
        Ok(ActionVector { qty })
    }

    pub fn check(&self, action: &ActionVector) -> Result<(), EnvError> {
        if action.qty.len() != self.upper.len()
            || action.qty.iter().zip(&self.upper).any(|(a, u)| a.len() != u.len())
        {
            return Err(EnvError::ActionLength {
                expected: self.len(),
                got: action.qty.iter().map(Vec::len).sum(),
            });
        }
        for (i, (row, urow)) in action.qty.iter().zip(&self.upper).enumerate() {
            for (j, (&a, &u)) in row.iter().zip(urow).enumerate() {
                if a < 0 || a > u {
                    return Err(EnvError::ActionOutOfBounds {
                        product: i,
                        node: j,
                        value: a,
                        upper: u,
                    });
                }
            }
        }
        Ok(())
    }
}

/// Integer production and shipment quantities, `[i][j]` with `j = 0..=J`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ActionVector {
    pub qty: Vec<Vec<i64>>,
}

impl ActionVector {
    pub fn zeros(config: &ScenarioConfig) -> Self {
        Self {
            qty: vec![vec![0; config.num_nodes()]; config.num_products],
        }
    }

    pub fn from_flat(config: &ScenarioConfig, flat: &[i64]) -> Self {
        Self {
            qty: flat.chunks(config.num_nodes()).map(<[i64]>::to_vec).collect(),
        }
    }

    pub fn to_flat(&self) -> Vec<i64> {
        self.qty.iter().flatten().copied().collect()
    }

    pub fn to_raw(&self) -> Vec<f64> {
        self.qty.iter().flatten().map(|&q| q as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InventoryState {
    /// `[i][j]`, `j = 0..=J`; negative values are backorders.
    pub stock: Vec<Vec<i64>>,
    /// Last `tau` demand matrices (`[i][j - 1]`), oldest first.
    pub demand_history: VecDeque<Vec<Vec<i64>>>,
    pub t: usize,
}

impl InventoryState {
    pub fn initial(config: &ScenarioConfig) -> Self {
        let stock = config
            .initial_stock
            .clone()
            .unwrap_or_else(|| vec![vec![0; config.num_nodes()]; config.num_products]);
        let fill = config
            .initial_demand
            .clone()
            .unwrap_or_else(|| vec![vec![0; config.num_warehouses]; config.num_products]);
        Self {
            stock,
            demand_history: std::iter::repeat(fill).take(config.history_len).collect(),
            t: 0,
        }
    }

    pub fn observation(&self) -> Vec<f64> {
        let stocks = self.stock.iter().flatten();
        let history = self.demand_history.iter().flatten().flatten();
        stocks.chain(history).map(|&x| x as f64).collect()
    }
}

/// Itemized per-step profit. All cost entries are nonnegative magnitudes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RewardBreakdown {
    pub revenue: f64,
    pub production_cost: f64,
    pub transport_cost: f64,
    pub storage_cost: f64,
    pub penalty_cost: f64,
}

impl RewardBreakdown {
    pub fn total(&self) -> f64 {
        self.revenue
            - self.production_cost
            - self.transport_cost
            - self.storage_cost
            - self.penalty_cost
    }

    pub fn accumulate(&mut self, other: &RewardBreakdown) {
        self.revenue += other.revenue;
        self.production_cost += other.production_cost;
        self.transport_cost += other.transport_cost;
        self.storage_cost += other.storage_cost;
        self.penalty_cost += other.penalty_cost;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub reward: f64,
    pub breakdown: RewardBreakdown,
    pub observation: Vec<f64>,
    pub demand_realized: Vec<Vec<i64>>,
    pub done: bool,
}

/// Applies one step of the dynamics to `stock` in place and returns the
/// profit breakdown.
///
/// Stocks above capacity are discarded; there is no lower clamp. Storage and
/// penalty terms are charged on the post-transition stocks.
pub fn transition(
    config: &ScenarioConfig,
    stock: &mut [Vec<i64>],
    action: &ActionVector,
    demand: &[Vec<i64>],
) -> RewardBreakdown {
    let mut b = RewardBreakdown::default();
    for i in 0..config.num_products {
        let caps = &config.storage_capacity[i];
        let a = &action.qty[i];
        let shipped: i64 = a[1..].iter().sum();
        stock[i][0] = (stock[i][0] + a[0] - shipped).min(caps[0]);
        for j in 1..=config.num_warehouses {
            stock[i][j] = (stock[i][j] + a[j] - demand[i][j - 1]).min(caps[j]);
        }

        let price = config.sale_price[i];
        let backlog = config.backlog_cost(i);
        b.revenue += demand[i].iter().map(|&d| price * d as f64).sum::<f64>();
        b.production_cost += config.production_cost[i] * a[0] as f64;
        b.transport_cost += (1..=config.num_warehouses)
            .map(|j| config.transport_cost[i][j - 1] * a[j] as f64)
            .sum::<f64>();
        for (j, &q) in stock[i].iter().enumerate() {
            if q > 0 {
                b.storage_cost += config.storage_cost[i][j] * q as f64;
            } else if q < 0 {
                b.penalty_cost += backlog * (-q) as f64;
            }
        }
    }
    b
}

/// One simulator instance with its own demand stream.
#[derive(Debug, Clone)]
pub struct Env {
    config: ScenarioConfig,
    bounds: ActionBounds,
    seed: u64,
    sampler: DemandSampler,
    state: InventoryState,
}

impl Env {
    pub fn new(config: ScenarioConfig, seed: u64) -> Result<Self, ConfigError> {
        config.validate()?;
        let bounds = ActionBounds::from_config(&config);
        let state = InventoryState::initial(&config);
        Ok(Self {
            sampler: DemandSampler::new(seed),
            config,
            bounds,
            seed,
            state,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn bounds(&self) -> &ActionBounds {
        &self.bounds
    }

    pub fn state(&self) -> &InventoryState {
        &self.state
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn is_done(&self) -> bool {
        self.state.t >= self.config.episode_length
    }

    /// Restarts the episode on the instance's current stream position.
    pub fn reset(&mut self) -> Vec<f64> {
        self.state = InventoryState::initial(&self.config);
        self.state.observation()
    }

    /// Restarts the episode and reseeds the demand stream.
    pub fn reset_with_seed(&mut self, seed: u64) -> Vec<f64> {
        self.seed = seed;
        self.sampler = DemandSampler::new(seed);
        self.reset()
    }

    pub fn observation(&self) -> Vec<f64> {
        self.state.observation()
    }

    pub fn clip_action(&self, raw: &[f64]) -> Result<ActionVector, EnvError> {
        self.bounds.clip(raw)
    }

    pub fn step(&mut self, action: &ActionVector) -> Result<StepOutcome, EnvError> {
        if self.is_done() {
            return Err(EnvError::EpisodeDone { t: self.state.t });
        }
        self.bounds.check(action)?;
        let demand = self.sampler.draw_step(&self.config, self.state.t);
        let breakdown = transition(&self.config, &mut self.state.stock, action, &demand);

        self.state.demand_history.pop_front();
        self.state.demand_history.push_back(demand.clone());
        self.state.t += 1;

        Ok(StepOutcome {
            reward: breakdown.total(),
            breakdown,
            observation: self.state.observation(),
            demand_realized: demand,
            done: self.is_done(),
        })
    }

    /// Clips a raw continuous action and steps.
    pub fn step_raw(&mut self, raw: &[f64]) -> Result<StepOutcome, EnvError> {
        let action = self.clip_action(raw)?;
        self.step(&action)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::fixtures::{exp1, exp2, one_by_one};
    use proptest::prelude::*;

    fn act(qty: &[i64]) -> ActionVector {
        ActionVector {
            qty: vec![qty.to_vec()],
        }
    }

    #[test]
    fn observation_length_1p1w() {
        let mut env = Env::new(exp2(), 7).unwrap();
        assert_eq!(env.reset().len(), 7);
    }

    #[test]
    fn bounds_1p1w_exp1() {
        let b = ActionBounds::from_config(&exp1());
        assert_eq!(b.ranges(), vec![(0, 15), (0, 10)]);
    }

    #[test]
    fn zero_capacities_give_zero_bounds() {
        let c = one_by_one(1.0, 0.0, 1.0, 1.0, [0, 0], [0.0, 0.0], 0.0, 0.0);
        assert_eq!(ActionBounds::from_config(&c).ranges(), vec![(0, 0), (0, 0)]);
    }

    #[test]
    fn clip_floors_and_clamps() {
        let b = ActionBounds::from_config(&exp1());
        assert_eq!(b.clip(&[3.9, 2.1]).unwrap().to_flat(), vec![3, 2]);
        assert_eq!(b.clip(&[-1.0, 99.0]).unwrap().to_flat(), vec![0, 10]);
        assert_eq!(b.clip(&[15.0, 10.0]).unwrap().to_flat(), vec![15, 10]);
        assert_eq!(b.clip(&[f64::NAN, f64::INFINITY]).unwrap().to_flat(), vec![0, 10]);
        assert_eq!(
            b.clip(&[1.0]).unwrap_err(),
            EnvError::ActionLength { expected: 2, got: 1 }
        );
    }

    #[test]
    fn exp2_balanced_step() {
        let mut c = exp2();
        c.demand_var = vec![0.0];
        let mut stock = vec![vec![0, 0]];
        let b = transition(&c, &mut stock, &act(&[5, 5]), &[vec![5]]);
        assert_eq!(stock, vec![vec![0, 0]]);
        assert!((b.total() - 74.75).abs() < 1e-12, "{}", b.total());
    }

    #[test]
    fn exp1_idle_step_with_backlog() {
        let c = exp1();
        let mut stock = vec![vec![0, 0]];
        let b = transition(&c, &mut stock, &act(&[0, 0]), &[vec![4]]);
        assert_eq!(stock, vec![vec![0, -4]]);
        assert!((b.total() - (-30.0)).abs() < 1e-12);
        assert!((b.penalty_cost - 90.0).abs() < 1e-12);
    }

    #[test]
    fn all_zero_step_is_neutral() {
        let c = exp1();
        let mut stock = vec![vec![0, 0]];
        let b = transition(&c, &mut stock, &act(&[0, 0]), &[vec![0]]);
        assert_eq!(stock, vec![vec![0, 0]]);
        assert_eq!(b.total(), 0.0);
    }

    #[test]
    fn overflow_is_discarded_and_factory_can_go_negative() {
        let c = exp1();
        let mut stock = vec![vec![0, 0]];
        transition(&c, &mut stock, &act(&[15, 0]), &[vec![0]]);
        assert_eq!(stock[0][0], 5);
        transition(&c, &mut stock, &act(&[0, 10]), &[vec![0]]);
        assert_eq!(stock, vec![vec![-5, 10]]);
    }

    #[test]
    fn step_rejects_out_of_bounds_and_after_done() {
        let mut c = exp2();
        c.episode_length = 2;
        let mut env = Env::new(c, 1).unwrap();
        env.reset();
        assert!(matches!(
            env.step(&act(&[16, 0])),
            Err(EnvError::ActionOutOfBounds { node: 0, .. })
        ));
        assert!(!env.step(&act(&[0, 0])).unwrap().done);
        assert!(env.step(&act(&[0, 0])).unwrap().done);
        assert_eq!(env.step(&act(&[0, 0])), Err(EnvError::EpisodeDone { t: 2 }));
    }

    #[test]
    fn history_shifts_oldest_out() {
        let mut c = exp2();
        c.history_len = 2;
        let mut env = Env::new(c, 5).unwrap();
        env.reset();
        let d0 = env.step(&act(&[0, 0])).unwrap().demand_realized[0][0];
        let out = env.step(&act(&[0, 0])).unwrap();
        let d1 = out.demand_realized[0][0];
        assert_eq!(out.observation[2..], [d0 as f64, d1 as f64]);
    }

    #[test]
    fn same_seed_same_trajectory_different_seed_differs() {
        let run = |seed| {
            let mut env = Env::new(exp2(), seed).unwrap();
            env.reset();
            let mut out = Vec::new();
            while !env.is_done() {
                let o = env.step(&act(&[3, 3])).unwrap();
                out.push((o.reward, o.demand_realized));
            }
            out
        };
        assert_eq!(run(7), run(7));
        let a: Vec<_> = run(7).into_iter().map(|x| x.1).collect();
        let b: Vec<_> = run(8).into_iter().map(|x| x.1).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn reset_with_seed_replays() {
        let mut env = Env::new(exp2(), 3).unwrap();
        env.reset();
        let first = env.step(&act(&[1, 1])).unwrap();
        env.reset_with_seed(3);
        assert_eq!(env.step(&act(&[1, 1])).unwrap(), first);
    }

    #[test]
    fn initial_overrides_apply() {
        let mut c = exp2();
        c.initial_stock = Some(vec![vec![2, 7]]);
        c.initial_demand = Some(vec![vec![4]]);
        let mut env = Env::new(c, 0).unwrap();
        assert_eq!(env.reset(), vec![2.0, 7.0, 4.0, 4.0, 4.0, 4.0, 4.0]);
    }

    fn arb_config() -> impl Strategy<Value = ScenarioConfig> {
        (1usize..3, 1usize..4, 1usize..8, 1usize..4).prop_flat_map(|(np, nw, t_len, tau)| {
            let nodes = nw + 1;
            (
                prop::collection::vec(0.0..30.0f64, np),
                prop::collection::vec(0.0..10.0f64, np),
                prop::collection::vec(prop::collection::vec(0.0..2.0f64, nw), np),
                prop::collection::vec(prop::collection::vec(0i64..12, nodes), np),
                prop::collection::vec(prop::collection::vec(0.0..4.0f64, nodes), np),
                prop::collection::vec(0.0..2.0f64, np),
                prop::collection::vec(0.0..10.0f64, np),
                prop::collection::vec(0.0..4.0f64, np),
            )
                .prop_map(move |(p, z, zt, c, zs, zp, dm, dv)| ScenarioConfig {
                    num_products: np,
                    num_warehouses: nw,
                    episode_length: t_len,
                    history_len: tau,
                    sale_price: p,
                    production_cost: z,
                    transport_cost: zt,
                    storage_capacity: c,
                    storage_cost: zs,
                    penalty_coeff: zp,
                    demand_max: dm,
                    demand_var: dv,
                    initial_stock: None,
                    initial_demand: None,
                })
        })
    }

    proptest! {
        #[test]
        fn rollout_invariants(config in arb_config(), seed in any::<u64>(), raw in prop::collection::vec(-5.0..40.0f64, 64)) {
            let mut env = Env::new(config.clone(), seed).unwrap();
            let obs = env.reset();
            prop_assert_eq!(obs.len(), config.observation_dim());
            let n = config.action_dim();
            let mut k = 0;
            while !env.is_done() {
                let r: Vec<f64> = (0..n).map(|m| raw[(k + m) % raw.len()]).collect();
                k += n;
                let prev = env.state().stock.clone();
                let action = env.clip_action(&r).unwrap();
                let out = env.step(&action).unwrap();
                let b = out.breakdown;
                prop_assert!((out.reward - b.total()).abs() < 1e-9);
                prop_assert!(b.storage_cost >= 0.0 && b.penalty_cost >= 0.0);
                prop_assert_eq!(out.observation.len(), config.observation_dim());
                let stock = &env.state().stock;
                for i in 0..config.num_products {
                    for j in 0..=config.num_warehouses {
                        prop_assert!(stock[i][j] <= config.storage_capacity[i][j]);
                    }
                    for j in 1..=config.num_warehouses {
                        let d = out.demand_realized[i][j - 1];
                        prop_assert!(d >= 0);
                        prop_assert!(d as f64 <= config.demand_max[i] + config.demand_var[i]);
                        // Conservation when no clip binds.
                        let unclipped = prev[i][j] + action.qty[i][j] - d;
                        if unclipped <= config.storage_capacity[i][j] {
                            prop_assert_eq!(stock[i][j], unclipped);
                        }
                    }
                    let shipped: i64 = action.qty[i][1..].iter().sum();
                    let unclipped = prev[i][0] + action.qty[i][0] - shipped;
                    if unclipped <= config.storage_capacity[i][0] {
                        prop_assert_eq!(stock[i][0], unclipped);
                    }
                }
            }
        }
    }
}
