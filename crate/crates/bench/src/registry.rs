//! Built-in experiments: five 1P1W, five 1P3W and three 2P2W scenarios.
//!
//! Every experiment runs `T = 25` steps with a demand history of `tau = 5`.
//! Per-product arrays are indexed `[i]`, nodes `[i][j]` with the factory at
//! `j = 0`, and transport costs `[i][j - 1]`.

use std::path::Path;

use scim_core::ScenarioConfig;

use crate::BenchError;

pub const EPISODE_LENGTH: usize = 25;
pub const HISTORY_LEN: usize = 5;

/// Registered names: families 1p1w, 1p3w, 2p2w, experiments in order.
pub const NAMES: [&str; 13] = [
    "1p1w-exp1",
    "1p1w-exp2",
    "1p1w-exp3",
    "1p1w-exp4",
    "1p1w-exp5",
    "1p3w-exp1",
    "1p3w-exp2",
    "1p3w-exp3",
    "1p3w-exp4",
    "1p3w-exp5",
    "2p2w-exp1",
    "2p2w-exp2",
    "2p2w-exp3",
];

struct Product<'a> {
    demand_max: f64,
    demand_var: f64,
    price: f64,
    production: f64,
    capacity: &'a [i64],
    storage: &'a [f64],
    transport: &'a [f64],
    penalty: f64,
}

fn build(products: &[Product]) -> ScenarioConfig {
    ScenarioConfig {
        num_products: products.len(),
        num_warehouses: products[0].transport.len(),
        episode_length: EPISODE_LENGTH,
        history_len: HISTORY_LEN,
        sale_price: products.iter().map(|p| p.price).collect(),
        production_cost: products.iter().map(|p| p.production).collect(),
        transport_cost: products.iter().map(|p| p.transport.to_vec()).collect(),
        storage_capacity: products.iter().map(|p| p.capacity.to_vec()).collect(),
        storage_cost: products.iter().map(|p| p.storage.to_vec()).collect(),
        penalty_coeff: products.iter().map(|p| p.penalty).collect(),
        demand_max: products.iter().map(|p| p.demand_max).collect(),
        demand_var: products.iter().map(|p| p.demand_var).collect(),
        initial_stock: None,
        initial_demand: None,
    }
}

#[allow(clippy::too_many_arguments)]
fn single(
    demand_max: f64,
    demand_var: f64,
    price: f64,
    production: f64,
    capacity: &[i64],
    storage: &[f64],
    transport: &[f64],
    penalty: f64,
) -> ScenarioConfig {
    build(&[Product {
        demand_max,
        demand_var,
        price,
        production,
        capacity,
        storage,
        transport,
        penalty,
    }])
}

/// The built-in scenario called `name`, if any (case-insensitive).
pub fn builtin(name: &str) -> Option<ScenarioConfig> {
    let c = match name.to_ascii_lowercase().as_str() {
        "1p1w-exp1" => single(10.0, 2.0, 15.0, 5.0, &[5, 10], &[2.0, 1.0], &[0.25], 1.5),
        "1p1w-exp2" => single(5.0, 2.0, 20.0, 5.0, &[5, 10], &[2.0, 1.0], &[0.05], 0.1),
        "1p1w-exp3" => single(5.0, 2.0, 15.0, 10.0, &[5, 10], &[2.0, 1.0], &[1.0], 2.0),
        "1p1w-exp4" => single(10.0, 1.0, 20.0, 5.0, &[10, 15], &[4.0, 2.0], &[0.25], 1.5),
        "1p1w-exp5" => single(5.0, 3.0, 15.0, 5.0, &[5, 10], &[1.0, 2.0], &[0.25], 0.1),

        "1p3w-exp1" => single(7.0, 2.0, 15.0, 5.0, &[3, 6, 9, 12], &[4.0, 3.0, 2.0, 1.0], &[0.3, 0.6, 0.9], 1.5),
        "1p3w-exp2" => single(5.0, 2.0, 20.0, 5.0, &[3, 6, 9, 12], &[4.0, 3.0, 2.0, 1.0], &[0.03, 0.06, 0.09], 0.1),
        "1p3w-exp3" => single(5.0, 2.0, 15.0, 10.0, &[3, 6, 9, 12], &[4.0, 3.0, 2.0, 1.0], &[3.0, 2.0, 1.0], 2.0),
        "1p3w-exp4" => single(7.0, 1.0, 20.0, 5.0, &[4, 8, 12, 16], &[8.0, 6.0, 4.0, 2.0], &[0.3, 0.6, 0.9], 1.5),
        "1p3w-exp5" => single(5.0, 3.0, 15.0, 5.0, &[4, 8, 12, 16], &[4.0, 3.0, 2.0, 1.0], &[0.3, 0.6, 0.9], 0.1),

        "2p2w-exp1" => build(&[
            Product {
                demand_max: 3.0,
                demand_var: 2.0,
                price: 20.0,
                production: 2.0,
                capacity: &[3, 6, 9],
                storage: &[6.0, 4.0, 2.0],
                transport: &[0.1, 0.2],
                penalty: 0.5,
            },
            Product {
                demand_max: 6.0,
                demand_var: 1.0,
                price: 10.0,
                production: 1.0,
                capacity: &[4, 8, 12],
                storage: &[3.0, 2.0, 1.0],
                transport: &[0.3, 0.6],
                penalty: 0.5,
            },
        ]),
        "2p2w-exp2" => build(&[
            Product {
                demand_max: 3.0,
                demand_var: 2.0,
                price: 10.0,
                production: 2.0,
                capacity: &[3, 6, 9],
                storage: &[0.5, 1.0, 1.5],
                transport: &[0.01, 0.02],
                penalty: 1.5,
            },
            Product {
                demand_max: 6.0,
                demand_var: 1.0,
                price: 15.0,
                production: 1.0,
                capacity: &[4, 8, 12],
                storage: &[0.3, 0.6, 0.9],
                transport: &[0.025, 0.05],
                penalty: 1.5,
            },
        ]),
        "2p2w-exp3" => build(&[
            Product {
                demand_max: 4.0,
                demand_var: 2.0,
                price: 20.0,
                production: 2.0,
                capacity: &[9, 6, 3],
                storage: &[1.0, 2.0, 3.0],
                transport: &[0.1, 0.2],
                penalty: 0.5,
            },
            Product {
                demand_max: 2.0,
                demand_var: 2.0,
                price: 10.0,
                production: 1.0,
                capacity: &[4, 8, 12],
                storage: &[3.0, 2.0, 1.0],
                transport: &[0.3, 0.6],
                penalty: 0.5,
            },
        ]),
        _ => return None,
    };
    Some(c)
}

/// All built-ins, ordered as [`NAMES`].
pub fn builtins() -> Vec<(&'static str, ScenarioConfig)> {
    NAMES
        .iter()
        .map(|&n| (n, builtin(n).expect("every registered name builds")))
        .collect()
}

/// Expands a scenario selector: a registered name, a family prefix such as
/// `1p1w` (all of its experiments), or `all`.
pub fn expand(selector: &str) -> Vec<&'static str> {
    let s = selector.to_ascii_lowercase();
    if s == "all" {
        return NAMES.to_vec();
    }
    NAMES
        .iter()
        .copied()
        .filter(|n| *n == s || n.split('-').next() == Some(s.as_str()))
        .collect()
}

/// A registered name, or else a path to a JSON scenario file.
pub fn load_scenario(name_or_path: &str) -> Result<ScenarioConfig, BenchError> {
    if let Some(c) = builtin(name_or_path) {
        return Ok(c);
    }
    let path = Path::new(name_or_path);
    if !path.exists() {
        return Err(BenchError::UnknownScenario {
            name: name_or_path.to_string(),
            known: NAMES.join(", "),
        });
    }
    ScenarioConfig::from_file(path).map_err(|source| BenchError::ScenarioFile {
        path: path.display().to_string(),
        source,
    })
}

/// `(scenario, experiment)` labels for a selector: `1p1w-exp2` becomes
/// `("1p1w", "exp2")`; a file path becomes `(file stem, "custom")`.
pub fn labels(name_or_path: &str) -> (String, String) {
    let lower = name_or_path.to_ascii_lowercase();
    if builtin(&lower).is_some() {
        let (a, b) = lower.split_once('-').expect("registered names contain a dash");
        return (a.to_string(), b.to_string());
    }
    let stem = Path::new(name_or_path)
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| name_or_path.to_string());
    (stem, "custom".to_string())
}
