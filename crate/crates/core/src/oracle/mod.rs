//! Clairvoyant planning: given the full demand realization of an episode,
//! choose the profit-maximizing production and shipment plan.
//!
//! Revenue does not depend on the actions, so maximizing profit is the same
//! as minimizing cost. With zero lead times and nonnegative factory storage
//! cost, producing exactly what is shipped is never worse than stocking the
//! factory, so the problem splits into one lot-sizing-with-backlog problem
//! per (product, warehouse). Each is solved as a time-expanded min-cost flow:
//!
//! * `source -> t`: ship at step t, capacity `c`, cost production + transport
//! * `t -> t+1`: hold stock, capacity `c`, cost storage
//! * `t+1 -> t`: serve step-t demand one step late, cost `zP * p`
//! * `source -> T-1`: demand left unserved at the end of the episode, cost `zP * p`
//! * `t -> sink`: demand at t, forced with a large negative cost
//!
//! [`dp_exact`] solves the joint problem by exhaustive dynamic programming
//! over the exact environment dynamics and is used to validate the planner.

mod dp;
mod flow;

use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::ScenarioConfig;
use crate::demand::DemandSampler;
use crate::env::{transition, ActionBounds, ActionVector, Env, InventoryState, RewardBreakdown};
use crate::policy::{EvalSummary, Policy};

pub use dp::{dp_exact, DP_SIZE_LIMIT};
pub use flow::{MinCostFlow, INF_CAP};

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("demand realization has shape {got:?}, scenario expects {expected:?}")]
    Shape {
        expected: (usize, usize, usize),
        got: (usize, usize, usize),
    },
    #[error("planner requires zero initial factory stock (product {product} starts at {stock})")]
    FactoryStock { product: usize, stock: i64 },
    #[error("exact DP instance too large: ~{estimate:.3e} state-action evaluations exceeds {limit:.0e}")]
    TooLarge { estimate: f64, limit: f64 },
    #[error("replayed profit {replayed} differs from planned profit {planned} (seed {seed})")]
    ReplayMismatch { seed: u64, planned: f64, replayed: f64 },
    #[error(transparent)]
    Env(#[from] crate::error::EnvError),
    #[error(transparent)]
    Config(#[from] crate::error::ConfigError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Demand `d[i][j - 1][t]` for a whole episode.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DemandRealization {
    pub d: Vec<Vec<Vec<i64>>>,
}

impl DemandRealization {
    pub fn shape(&self) -> (usize, usize, usize) {
        let nw = self.d.first().map_or(0, Vec::len);
        let t = self.d.first().and_then(|r| r.first()).map_or(0, Vec::len);
        (self.d.len(), nw, t)
    }

    /// Demand matrix `[i][j - 1]` at step `t`.
    pub fn at(&self, t: usize) -> Vec<Vec<i64>> {
        self.d
            .iter()
            .map(|row| row.iter().map(|series| series[t]).collect())
            .collect()
    }

    fn check(&self, config: &ScenarioConfig) -> Result<(), OracleError> {
        let expected = (config.num_products, config.num_warehouses, config.episode_length);
        let ragged = self
            .d
            .iter()
            .any(|r| r.len() != expected.1 || r.iter().any(|s| s.len() != expected.2));
        if self.d.len() != expected.0 || ragged {
            return Err(OracleError::Shape {
                expected,
                got: self.shape(),
            });
        }
        Ok(())
    }
}

/// The exact demand sequence an [`Env`] seeded with `seed` would draw.
pub fn realize_demand(config: &ScenarioConfig, seed: u64) -> DemandRealization {
    let mut sampler = DemandSampler::new(seed);
    let mut d = vec![vec![Vec::with_capacity(config.episode_length); config.num_warehouses]; config.num_products];
    for t in 0..config.episode_length {
        for (i, row) in sampler.draw_step(config, t).into_iter().enumerate() {
            for (j, x) in row.into_iter().enumerate() {
                d[i][j].push(x);
            }
        }
    }
    DemandRealization { d }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanResult {
    pub actions: Vec<ActionVector>,
    pub total_profit: f64,
    pub cost_breakdown: RewardBreakdown,
}

/// Per-unit costs of one (product, warehouse) lot-sizing problem.
#[derive(Debug, Clone, Copy)]
struct LaneCosts {
    capacity: i64,
    serve: f64,
    hold: f64,
    backlog: f64,
}

/// Optimal shipments for one lane given its demand series and initial stock.
fn plan_lane(costs: LaneCosts, demand: &[i64], initial: i64) -> Vec<i64> {
    let horizon = demand.len();
    let (source, sink) = (0, 1);
    let node = |t: usize| 2 + t;
    let mut g = MinCostFlow::new(2 + horizon);

    let max_unit = costs.serve.max(costs.hold).max(costs.backlog).max(1.0);
    let forced = 2.0 * (2 * horizon + 4) as f64 * max_unit + 1.0;

    let ship: Vec<usize> = (0..horizon)
        .map(|t| g.add_arc(source, node(t), costs.capacity, costs.serve))
        .collect();
    for t in 0..horizon.saturating_sub(1) {
        g.add_arc(node(t), node(t + 1), costs.capacity, costs.hold);
        g.add_arc(node(t + 1), node(t), INF_CAP, costs.backlog);
    }
    g.add_arc(source, node(horizon - 1), INF_CAP, costs.backlog);

    let mut required: Vec<i64> = demand.to_vec();
    if initial < 0 {
        required[0] += -initial;
    } else if initial > 0 {
        // Existing stock must be consumed or carried to the end.
        g.add_arc(source, node(0), initial, -forced);
        g.add_arc(node(horizon - 1), sink, costs.capacity, costs.hold);
    }
    for (t, &d) in required.iter().enumerate() {
        if d > 0 {
            g.add_arc(node(t), sink, d, -forced);
        }
    }
    g.min_cost_any_flow(source, sink);
    ship.iter().map(|&id| g.flow_on(id)).collect()
}

/// Cost-minimizing plan for a known demand realization.
pub fn plan_clairvoyant(
    demand: &DemandRealization,
    config: &ScenarioConfig,
) -> Result<PlanResult, OracleError> {
    demand.check(config)?;
    config.validate()?;
    for i in 0..config.num_products {
        let stock = config.initial_stock_at(i, 0);
        if stock != 0 {
            return Err(OracleError::FactoryStock { product: i, stock });
        }
    }

    let horizon = config.episode_length;
    let mut actions = vec![ActionVector::zeros(config); horizon];
    for i in 0..config.num_products {
        for j in 1..=config.num_warehouses {
            let costs = LaneCosts {
                capacity: config.storage_capacity[i][j],
                serve: config.production_cost[i] + config.transport_cost[i][j - 1],
                hold: config.storage_cost[i][j],
                backlog: config.backlog_cost(i),
            };
            let shipments = plan_lane(costs, &demand.d[i][j - 1], config.initial_stock_at(i, j));
            for (t, x) in shipments.into_iter().enumerate() {
                actions[t].qty[i][j] = x;
                actions[t].qty[i][0] += x;
            }
        }
    }

    let bounds = ActionBounds::from_config(config);
    let mut state = InventoryState::initial(config);
    let mut total_profit = 0.0;
    let mut cost_breakdown = RewardBreakdown::default();
    for (t, action) in actions.iter().enumerate() {
        bounds.check(action)?;
        let b = transition(config, &mut state.stock, action, &demand.at(t));
        total_profit += b.total();
        cost_breakdown.accumulate(&b);
    }
    Ok(PlanResult {
        actions,
        total_profit,
        cost_breakdown,
    })
}

/// Replays `plan` in a live environment seeded with `seed`.
pub fn replay_plan(config: &ScenarioConfig, plan: &PlanResult, seed: u64) -> Result<f64, OracleError> {
    let mut env = Env::new(config.clone(), seed)?;
    env.reset();
    let mut total = 0.0;
    for action in &plan.actions {
        total += env.step(action)?.reward;
    }
    Ok(total)
}

/// Realize, plan and replay `n_episodes` episodes seeded from `seed_base`.
pub fn oracle_evaluate(
    config: &ScenarioConfig,
    n_episodes: usize,
    seed_base: u64,
) -> Result<EvalSummary, OracleError> {
    let mut profits = Vec::with_capacity(n_episodes);
    for k in 0..n_episodes as u64 {
        let seed = seed_base + k;
        let plan = plan_clairvoyant(&realize_demand(config, seed), config)?;
        let replayed = replay_plan(config, &plan, seed)?;
        if replayed != plan.total_profit {
            return Err(OracleError::ReplayMismatch {
                seed,
                planned: plan.total_profit,
                replayed,
            });
        }
        profits.push(replayed);
    }
    Ok(EvalSummary::from_profits(profits))
}

/// Plays the clairvoyant plan for whatever episode seed it is reset with.
#[derive(Debug, Clone, Default)]
pub struct OraclePolicy {
    plan: Vec<Vec<f64>>,
    t: usize,
}

impl OraclePolicy {
    pub fn new() -> Self {
        Self::default()
    }
}

impl Policy for OraclePolicy {
    fn reset(&mut self, config: &ScenarioConfig, episode_seed: u64) {
        let plan = plan_clairvoyant(&realize_demand(config, episode_seed), config)
            .expect("scenario supported by the planner");
        self.plan = plan.actions.iter().map(ActionVector::to_raw).collect();
        self.t = 0;
    }

    fn act(&mut self, _observation: &[f64]) -> Vec<f64> {
        let a = self.plan[self.t].clone();
        self.t += 1;
        a
    }
}

/// Writes the plan as CSV: `t` followed by one `a_{i}_{j}` column per action
/// component in flat action order.
pub fn write_plan_csv<W: Write>(plan: &PlanResult, config: &ScenarioConfig, out: W) -> Result<(), OracleError> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    for i in 0..config.num_products {
        for j in 0..config.num_nodes() {
            header.push(format!("a_{i}_{j}"));
        }
    }
    w.write_record(&header).map_err(csv_io)?;
    for (t, a) in plan.actions.iter().enumerate() {
        let row = std::iter::once(t.to_string()).chain(a.to_flat().into_iter().map(|x| x.to_string()));
        w.write_record(row).map_err(csv_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_io(e: csv::Error) -> OracleError {
    OracleError::Io(std::io::Error::other(e))
}
