use std::collections::HashMap;

use crate::config::ScenarioConfig;
use crate::env::{transition, ActionBounds, ActionVector, InventoryState};

use super::{DemandRealization, OracleError};

/// Upper bound on estimated state-action evaluations accepted by [`dp_exact`].
pub const DP_SIZE_LIMIT: f64 = 1e7;

/// Optimal cumulative profit under known demand, by memoized exhaustive
/// search over every integer action within bounds at every reachable state.
pub fn dp_exact(demand: &DemandRealization, config: &ScenarioConfig) -> Result<f64, OracleError> {
    demand.check(config)?;
    config.validate()?;

    let bounds = ActionBounds::from_config(config);
    let actions = enumerate_actions(config, &bounds);
    let estimate = size_estimate(demand, config, &bounds) * actions.len() as f64;
    if estimate > DP_SIZE_LIMIT {
        return Err(OracleError::TooLarge {
            estimate,
            limit: DP_SIZE_LIMIT,
        });
    }

    let demands: Vec<Vec<Vec<i64>>> = (0..config.episode_length).map(|t| demand.at(t)).collect();
    let mut solver = Solver {
        config,
        actions: &actions,
        demands: &demands,
        memo: HashMap::new(),
    };
    let start = InventoryState::initial(config).stock;
    Ok(solver.value(0, start))
}

struct Solver<'a> {
    config: &'a ScenarioConfig,
    actions: &'a [ActionVector],
    demands: &'a [Vec<Vec<i64>>],
    memo: HashMap<(usize, Vec<Vec<i64>>), f64>,
}

impl Solver<'_> {
    fn value(&mut self, t: usize, stock: Vec<Vec<i64>>) -> f64 {
        if t == self.config.episode_length {
            return 0.0;
        }
        if let Some(&v) = self.memo.get(&(t, stock.clone())) {
            return v;
        }
        let mut best = f64::NEG_INFINITY;
        for action in self.actions {
            let mut next = stock.clone();
            let reward = transition(self.config, &mut next, action, &self.demands[t]).total();
            let v = reward + self.value(t + 1, next);
            if v > best {
                best = v;
            }
        }
        self.memo.insert((t, stock), best);
        best
    }
}

fn enumerate_actions(config: &ScenarioConfig, bounds: &ActionBounds) -> Vec<ActionVector> {
    let upper = bounds.flat_upper();
    let mut out = Vec::new();
    let mut cur = vec![0i64; upper.len()];
    loop {
        out.push(ActionVector::from_flat(config, &cur));
        let mut k = 0;
        loop {
            if k == cur.len() {
                return out;
            }
            if cur[k] < upper[k] {
                cur[k] += 1;
                break;
            }
            cur[k] = 0;
            k += 1;
        }
    }
}

/// Horizon times the product of per-node reachable stock ranges.
fn size_estimate(demand: &DemandRealization, config: &ScenarioConfig, bounds: &ActionBounds) -> f64 {
    let horizon = config.episode_length as f64;
    let mut states = 1.0;
    for i in 0..config.num_products {
        let caps = &config.storage_capacity[i];
        let shipped_max: i64 = bounds.upper[i][1..].iter().sum();
        let q0 = config.initial_stock_at(i, 0);
        let lo = q0 - shipped_max * config.episode_length as i64;
        states *= (caps[0].max(q0) - lo + 1) as f64;
        for j in 1..=config.num_warehouses {
            let q0 = config.initial_stock_at(i, j);
            let total: i64 = demand.d[i][j - 1].iter().sum();
            states *= (caps[j].max(q0) - (q0 - total) + 1) as f64;
        }
    }
    horizon * states
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::fixtures::{exp1, one_by_one};

    #[test]
    fn zero_demand_is_zero() {
        let mut c = exp1();
        c.episode_length = 3;
        c.storage_capacity = vec![vec![2, 2]];
        let d = DemandRealization {
            d: vec![vec![vec![0, 0, 0]]],
        };
        assert_eq!(dp_exact(&d, &c).unwrap(), 0.0);
    }

    #[test]
    fn one_step_profitable_demand() {
        let mut c = one_by_one(0.0, 0.0, 10.0, 3.0, [3, 3], [1.0, 1.0], 0.5, 1.0);
        c.episode_length = 1;
        let d = DemandRealization {
            d: vec![vec![vec![2]]],
        };
        let v = dp_exact(&d, &c).unwrap();
        assert!((v - (10.0 * 2.0 - 3.5 * 2.0)).abs() < 1e-12);
    }

    #[test]
    fn large_instances_are_refused() {
        let c = exp1();
        let d = super::super::realize_demand(&c, 0);
        assert!(matches!(dp_exact(&d, &c), Err(OracleError::TooLarge { .. })));
    }

    #[test]
    fn enumeration_covers_box() {
        let mut c = exp1();
        c.storage_capacity = vec![vec![1, 2]];
        let b = ActionBounds::from_config(&c);
        assert_eq!(enumerate_actions(&c, &b).len(), 4 * 3);
    }
}
