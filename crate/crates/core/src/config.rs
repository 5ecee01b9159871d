//! Scenario parameterization and its JSON representation.
//!
//! Node index `j = 0` is the factory warehouse; `j = 1..=J` are the
//! distribution warehouses. Per-node arrays (`storage_capacity`,
//! `storage_cost`) therefore have `J + 1` entries per product while
//! `transport_cost` has `J` (there is no transport into the factory).
//!
//! ```json
//! {
//!   "num_products": 1,
//!   "num_warehouses": 1,
//!   "episode_length": 25,
//!   "history_len": 5,
//!   "sale_price": [15.0],
//!   "production_cost": [5.0],
//!   "transport_cost": [[0.25]],
//!   "storage_capacity": [[5, 10]],
//!   "storage_cost": [[2.0, 1.0]],
//!   "penalty_coeff": [1.5],
//!   "demand_max": [10.0],
//!   "demand_var": [2.0]
//! }
//! ```
//!
//! `initial_stock` (`[i][j]`, `j = 0..=J`) and `initial_demand` (`[i][j-1]`,
//! used to fill every slot of the demand history) are optional and default
//! to zero.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub num_products: usize,
    pub num_warehouses: usize,
    pub episode_length: usize,
    #[serde(default = "default_history_len")]
    pub history_len: usize,
    pub sale_price: Vec<f64>,
    pub production_cost: Vec<f64>,
    /// `[i][j - 1]` for warehouses `j = 1..=J`.
    pub transport_cost: Vec<Vec<f64>>,
    /// `[i][j]` for nodes `j = 0..=J`.
    pub storage_capacity: Vec<Vec<i64>>,
    /// `[i][j]` for nodes `j = 0..=J`.
    pub storage_cost: Vec<Vec<f64>>,
    pub penalty_coeff: Vec<f64>,
    pub demand_max: Vec<f64>,
    pub demand_var: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_stock: Option<Vec<Vec<i64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub initial_demand: Option<Vec<Vec<i64>>>,
}

fn default_history_len() -> usize {
    5
}

impl ScenarioConfig {
    pub fn from_json_str(s: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig = serde_json::from_str(s)?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json_str(&text)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario config always serializes")
    }

    /// Number of nodes per product, factory included.
    pub fn num_nodes(&self) -> usize {
        self.num_warehouses + 1
    }

    /// Length of the flat action vector.
    pub fn action_dim(&self) -> usize {
        self.num_products * self.num_nodes()
    }

    /// Length of the flat observation vector.
    pub fn observation_dim(&self) -> usize {
        self.num_products * self.num_nodes()
            + self.num_products * self.num_warehouses * self.history_len
    }

    /// Per-unit backlog penalty for product `i` (penalty coefficient times price).
    pub fn backlog_cost(&self, i: usize) -> f64 {
        self.penalty_coeff[i] * self.sale_price[i]
    }

    /// Initial stock at `(i, j)`, zero unless overridden.
    pub fn initial_stock_at(&self, i: usize, j: usize) -> i64 {
        self.initial_stock.as_ref().map_or(0, |s| s[i][j])
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let np = self.num_products;
        let nw = self.num_warehouses;
        if np == 0 {
            return Err(ConfigError::invalid("num_products", "must be at least 1"));
        }
        if nw == 0 {
            return Err(ConfigError::invalid("num_warehouses", "must be at least 1"));
        }
        if self.episode_length == 0 {
            return Err(ConfigError::invalid("episode_length", "must be at least 1"));
        }
        if self.history_len == 0 {
            return Err(ConfigError::invalid("history_len", "must be at least 1"));
        }

        check_vec("sale_price", &self.sale_price, np)?;
        check_vec("production_cost", &self.production_cost, np)?;
        check_vec("penalty_coeff", &self.penalty_coeff, np)?;
        check_vec("demand_max", &self.demand_max, np)?;
        check_vec("demand_var", &self.demand_var, np)?;
        check_matrix("transport_cost", &self.transport_cost, np, nw)?;
        check_matrix("storage_cost", &self.storage_cost, np, nw + 1)?;
        check_shape("storage_capacity", &self.storage_capacity, np, nw + 1)?;
        for (i, row) in self.storage_capacity.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                if c < 0 {
                    return Err(ConfigError::invalid(
                        format!("storage_capacity[{i}][{j}]"),
                        format!("must be nonnegative, got {c}"),
                    ));
                }
            }
        }
        if let Some(stock) = &self.initial_stock {
            check_shape("initial_stock", stock, np, nw + 1)?;
            for (i, row) in stock.iter().enumerate() {
                for (j, &q) in row.iter().enumerate() {
                    if q > self.storage_capacity[i][j] {
                        return Err(ConfigError::invalid(
                            format!("initial_stock[{i}][{j}]"),
                            format!("{q} exceeds capacity {}", self.storage_capacity[i][j]),
                        ));
                    }
                }
            }
        }
        if let Some(demand) = &self.initial_demand {
            check_shape("initial_demand", demand, np, nw)?;
            for (i, row) in demand.iter().enumerate() {
                for (j, &d) in row.iter().enumerate() {
                    if d < 0 {
                        return Err(ConfigError::invalid(
                            format!("initial_demand[{i}][{j}]"),
                            format!("must be nonnegative, got {d}"),
                        ));
                    }
                }
            }
        }
        Ok(())
    }
}

fn check_vec(field: &str, v: &[f64], len: usize) -> Result<(), ConfigError> {
    if v.len() != len {
        return Err(ConfigError::invalid(
            field,
            format!("expected {len} entries, got {}", v.len()),
        ));
    }
    for (i, &x) in v.iter().enumerate() {
        if !x.is_finite() || x < 0.0 {
            return Err(ConfigError::invalid(
                format!("{field}[{i}]"),
                format!("must be finite and nonnegative, got {x}"),
            ));
        }
    }
    Ok(())
}

fn check_shape<T>(field: &str, m: &[Vec<T>], rows: usize, cols: usize) -> Result<(), ConfigError> {
    if m.len() != rows {
        return Err(ConfigError::invalid(
            field,
            format!("expected {rows} rows, got {}", m.len()),
        ));
    }
    for (i, row) in m.iter().enumerate() {
        if row.len() != cols {
            return Err(ConfigError::invalid(
                format!("{field}[{i}]"),
                format!("expected {cols} entries, got {}", row.len()),
            ));
        }
    }
    Ok(())
}

fn check_matrix(field: &str, m: &[Vec<f64>], rows: usize, cols: usize) -> Result<(), ConfigError> {
    check_shape(field, m, rows, cols)?;
    for (i, row) in m.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            if !x.is_finite() || x < 0.0 {
                return Err(ConfigError::invalid(
                    format!("{field}[{i}][{j}]"),
                    format!("must be finite and nonnegative, got {x}"),
                ));
            }
        }
    }
    Ok(())
}
