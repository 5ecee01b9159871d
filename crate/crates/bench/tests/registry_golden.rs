mod common;

use scim_bench::{builtin, NAMES};

#[test]
fn every_builtin_field_matches_the_tables() {
    let bad = common::golden_mismatches();
    assert!(bad.is_empty(), "{}", bad.join("\n"));
}

#[test]
fn table_parser_reads_bracketed_pairs() {
    let rows = common::parse(common::TWO_BY_TWO);
    assert_eq!(rows.len(), 8);
    assert_eq!(rows[4][2], vec![9.0, 4.0, 6.0, 8.0, 3.0, 12.0]);
    assert_eq!(builtin("2p2w-exp3").unwrap().storage_capacity, vec![vec![9, 6, 3], vec![4, 8, 12]]);
}

#[test]
fn every_registered_name_loads_identically_twice() {
    assert_eq!(NAMES.len(), 13);
    for name in NAMES {
        assert_eq!(builtin(name).unwrap().to_json_pretty(), builtin(name).unwrap().to_json_pretty());
    }
}
