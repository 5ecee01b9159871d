use std::path::Path;
use std::process::{Command, Output};

use scim_bench::{import_results, Format};

fn scim(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scim"))
        .current_dir(dir)
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn simulate_writes_one_row_per_step() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&scim(dir.path(), &["--scenario", "2p2w-exp1", "--episodes", "2", "simulate", "--policy", "random"]));
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines.len(), 1 + 2 * 25);
    let header: Vec<&str> = lines[0].split(',').collect();
    assert_eq!(header.len(), 2 + 6 + 6 + 4 + 6);
    assert_eq!(header.last(), Some(&"reward"));
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), header.len());
    }
}

#[test]
fn oracle_plan_csv_and_profit_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = scim(dir.path(), &["--scenario", "1p1w-exp3", "--seed", "4", "--out", "plan.csv", "oracle"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("clairvoyant profit for seed 4"));
    let plan = std::fs::read_to_string(dir.path().join("plan.csv")).unwrap();
    assert_eq!(plan.lines().count(), 26);
}

#[test]
fn bench_exports_paired_records_in_both_formats() {
    let dir = tempfile::tempdir().unwrap();
    let common = ["--scenario", "1p1w-exp2", "--episodes", "20", "--seed", "7"];
    let csv_out = scim(dir.path(), &[&common[..], &["--out", "r.csv", "bench"]].concat());
    let json_out = scim(dir.path(), &[&common[..], &["--out", "r.json", "bench", "--methods", "oracle,random,zero"]].concat());
    assert!(csv_out.status.success() && json_out.status.success());
    let a = import_results(&dir.path().join("r.csv"), Format::Csv).unwrap();
    let b = import_results(&dir.path().join("r.json"), Format::Json).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.len(), 3);
    assert!(a.iter().all(|r| r.n_episodes == 20 && r.seed_base == 7 && r.wall_time == 0.0));
    assert!(a[0].mean > a[2].mean, "oracle should beat zero");
}

#[test]
fn timing_flag_records_wall_time() {
    let dir = tempfile::tempdir().unwrap();
    let out = stdout(&scim(dir.path(), &["--episodes", "5", "bench", "--methods", "oracle", "--timing"]));
    let row = out.lines().nth(1).unwrap();
    let wall: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!(wall > 0.0);
}

#[test]
fn evaluate_reads_tuned_parameters() {
    let dir = tempfile::tempdir().unwrap();
    let s = ["--scenario", "1p1w-exp1", "--episodes", "5"];
    assert!(scim(dir.path(), &[&s[..], &["tune-sq", "--budget", "10"]].concat()).status.success());
    assert!(dir.path().join("artifacts/1p1w-exp1.bo-sq.json").is_file());
    let log = std::fs::read_to_string(dir.path().join("artifacts/1p1w-exp1.bo-sq.trials.jsonl")).unwrap();
    assert_eq!(log.lines().count(), 10);
    let out = stdout(&scim(dir.path(), &[&s[..], &["evaluate", "--method", "bo-sq"]].concat()));
    assert!(out.starts_with("scenario,experiment,method"));
    assert!(out.contains("1p1w,exp1,bo-sq,"));
}

#[test]
fn failures_exit_nonzero_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 4] = [
        &["--scenario", "9p9w-exp1", "bench"],
        &["--scenario", "1p1w-exp1", "bench", "--methods", "ppo"],
        &["bench", "--methods", "a3c"],
        &["simulate", "--policy", "sq:missing.json"],
    ];
    for args in cases {
        let o = scim(dir.path(), args);
        assert!(!o.status.success(), "{args:?} should fail");
        assert!(!o.stderr.is_empty(), "{args:?} printed nothing");
    }
    let o = scim(dir.path(), &["--scenario", "1p1w-exp1", "bench", "--methods", "ppo"]);
    assert!(String::from_utf8_lossy(&o.stderr).contains("1p1w-exp1.ppo.json"));
}

#[test]
fn custom_scenario_file_is_labelled_by_its_stem() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = scim_bench::builtin("1p1w-exp5").unwrap();
    std::fs::write(dir.path().join("mine.json"), cfg.to_json_pretty()).unwrap();
    let out = stdout(&scim(dir.path(), &["--scenario", "mine.json", "--episodes", "3", "bench", "--methods", "zero"]));
    assert!(out.lines().nth(1).unwrap().starts_with("mine,custom,zero,"));
}
