//! Experiment tables transcribed as raw table rows and parsed independently
//! of the registry code.

use scim_bench::builtin;
use scim_core::ScenarioConfig;

pub const ONE_BY_ONE: &str = r"
Max Demand Value     & 10             & 5              & 5              & 10             & 5
Max Demand Variation       & 2              & 2              & 2              & 1              & 3
Sale Price           & 15             & 20             & 15             & 20             & 15
Production Cost      & 5              & 5              & 10             & 5              & 5
Storage Capacities   & 5, 10          & 5, 10          & 5, 10          & 10, 15         & 5, 10
Storage Costs        & 2, 1           & 2, 1           & 2, 1           & 4, 2           & 1, 2
Transportation Cost  & 0.25           & 0.05           & 1              & 0.25           & 0.25
Penalty Coefficient         & 1.5            & 0.1            & 2              & 1.5            & 0.1
";

pub const ONE_BY_THREE: &str = r"
Max Demand Value     & 7   & 5   & 5  & 7   & 5
Max Demand Variation & 2   & 2   & 2  & 1   & 3
Sale Price      & 15  & 20  & 15 & 20  & 15
Production Cost           & 5   & 5   & 10 & 5   & 5
Storage Capacities   & 3, 6, 9, 12    & 3, 6, 9, 12      & 3, 6, 9, 12    & 4, 8, 12, 16   & 4, 8, 12, 16
Storage Costs        & 4, 3, 2, 1     & 4, 3, 2, 1       & 4, 3, 2, 1     & 8, 6, 4, 2     & 4, 3, 2, 1
Transportation Costs & 0.3, 0.6, 0.9  & 0.03, 0.06, 0.09 & 3, 2, 1        & 0.3, 0.6, 0.9  & 0.3, 0.6, 0.9
Penalty Coefficient         & 1.5 & 0.1 & 2  & 1.5 & 0.1
";

// Pairs are (product 1, product 2); groups run over nodes, factory first.
pub const TWO_BY_TWO: &str = r"
Max Demand Values     & 3, 6           & 3, 6           & 4, 2
Max Demand Variations & 2, 1           & 2, 1           & 2, 2
Sale Prices      & 20, 10         & 10, 15         & 20, 10
Production Costs           & 2, 1           & 2, 1           & 2, 1
Storage Capacities    & (3, 4), (6, 8), (9, 12) & (3, 4), (6, 8), (9, 12)            & (9, 4), (6, 8), (3, 12)
Storage Costs        & (6, 3), (4, 2), (2, 1)  & (0.5, 0.3), (1.0, 0.6), (1.5, 0.9) & (1, 3), (2, 2), (3, 1)
Transportation Costs & (0.1, 0.3), (0.2, 0.6)  & (0.01, 0.025), (0.02, 0.050)       & (0.1, 0.3), (0.2, 0.6)
Penalty Coefficient          & 0.5            & 1.5            & 0.5
";

/// `cells[row][experiment]` as lists of numbers. Brackets are dropped, so a
/// 2P2W cell becomes a flat node-major list of (p1, p2) pairs.
pub fn parse(table: &str) -> Vec<Vec<Vec<f64>>> {
    table
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            line.split('&')
                .skip(1)
                .map(|cell| {
                    cell.replace(['(', ')'], "")
                        .split(',')
                        .map(|x| x.trim().parse::<f64>().expect("numeric cell"))
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn ints(v: &[f64]) -> Vec<i64> {
    v.iter().map(|&x| x as i64).collect()
}

macro_rules! expect_eq {
    ($out:expr, $name:expr, $what:expr, $got:expr, $want:expr) => {
        if $got != $want {
            $out.push(format!("{} {}: registry {:?}, table {:?}", $name, $what, $got, $want));
        }
    };
}

fn check_common(out: &mut Vec<String>, name: &str, c: &ScenarioConfig) {
    expect_eq!(out, name, "episode length", c.episode_length, 25);
    expect_eq!(out, name, "history length", c.history_len, 5);
    expect_eq!(out, name, "initial stock unset", c.initial_stock.is_none(), true);
    expect_eq!(out, name, "initial demand unset", c.initial_demand.is_none(), true);
}

fn check_single_product(out: &mut Vec<String>, table: &str, family: &str, warehouses: usize) {
    let rows = parse(table);
    for e in 0..5 {
        let name = format!("{family}-exp{}", e + 1);
        let Some(c) = builtin(&name) else {
            out.push(format!("{name} is not registered"));
            continue;
        };
        check_common(out, &name, &c);
        expect_eq!(out, name, "shape", (c.num_products, c.num_warehouses), (1, warehouses));
        expect_eq!(out, name, "demand max", c.demand_max, rows[0][e]);
        expect_eq!(out, name, "demand variation", c.demand_var, rows[1][e]);
        expect_eq!(out, name, "sale price", c.sale_price, rows[2][e]);
        expect_eq!(out, name, "production cost", c.production_cost, rows[3][e]);
        expect_eq!(out, name, "capacities", c.storage_capacity, vec![ints(&rows[4][e])]);
        expect_eq!(out, name, "storage costs", c.storage_cost, vec![rows[5][e].clone()]);
        expect_eq!(out, name, "transport costs", c.transport_cost, vec![rows[6][e].clone()]);
        expect_eq!(out, name, "penalty", c.penalty_coeff, rows[7][e]);
    }
}

fn check_two_products(out: &mut Vec<String>) {
    let rows = parse(TWO_BY_TWO);
    // Node-major pairs to product-major rows.
    let by_product = |flat: &[f64]| -> Vec<Vec<f64>> {
        (0..2).map(|i| flat.chunks(2).map(|pair| pair[i]).collect()).collect()
    };
    for e in 0..3 {
        let name = format!("2p2w-exp{}", e + 1);
        let Some(c) = builtin(&name) else {
            out.push(format!("{name} is not registered"));
            continue;
        };
        check_common(out, &name, &c);
        expect_eq!(out, name, "shape", (c.num_products, c.num_warehouses), (2, 2));
        expect_eq!(out, name, "demand max", c.demand_max, rows[0][e]);
        expect_eq!(out, name, "demand variation", c.demand_var, rows[1][e]);
        expect_eq!(out, name, "sale price", c.sale_price, rows[2][e]);
        expect_eq!(out, name, "production cost", c.production_cost, rows[3][e]);
        let caps: Vec<Vec<i64>> = by_product(&rows[4][e]).iter().map(|r| ints(r)).collect();
        expect_eq!(out, name, "capacities", c.storage_capacity, caps);
        expect_eq!(out, name, "storage costs", c.storage_cost, by_product(&rows[5][e]));
        expect_eq!(out, name, "transport costs", c.transport_cost, by_product(&rows[6][e]));
        expect_eq!(out, name, "penalty", c.penalty_coeff, vec![rows[7][e][0]; 2]);
    }
}

/// Every field of every built-in experiment that differs from the tables.
pub fn golden_mismatches() -> Vec<String> {
    let mut out = Vec::new();
    check_single_product(&mut out, ONE_BY_ONE, "1p1w", 1);
    check_single_product(&mut out, ONE_BY_THREE, "1p3w", 3);
    check_two_products(&mut out);
    out
}
