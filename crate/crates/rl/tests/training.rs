use scim_core::{evaluate_policy, ScenarioConfig};
use scim_rl::{read_curve_csv, train, write_curve_csv, Algo, Checkpoint, TrainConfig};

fn exp2() -> ScenarioConfig {
    ScenarioConfig::from_json_str(
        r#"{"num_products":1,"num_warehouses":1,"episode_length":25,"history_len":5,
        "sale_price":[20.0],"production_cost":[5.0],"transport_cost":[[0.05]],
        "storage_capacity":[[5,10]],"storage_cost":[[2.0,1.0]],
        "penalty_coeff":[0.1],"demand_max":[5.0],"demand_var":[2.0]}"#,
    )
    .unwrap()
}

fn short(algo: Algo, episodes: usize) -> TrainConfig {
    TrainConfig {
        episodes,
        eval_every: 100,
        eval_episodes: 20,
        ..TrainConfig::preset(algo)
    }
}

#[test]
fn same_seed_same_agent_different_seed_different_agent() {
    let c = exp2();
    let cfg = short(Algo::Ppo, 80);
    let a = train(Algo::Ppo, &cfg, &c, 4).unwrap();
    let b = train(Algo::Ppo, &cfg, &c, 4).unwrap();
    let d = train(Algo::Ppo, &cfg, &c, 5).unwrap();
    assert_eq!(a.agent, b.agent);
    assert_eq!(a.curve, b.curve);
    assert_ne!(a.agent, d.agent);
    assert_eq!(a.episodes, 80);
}

#[test]
fn ppo_improves_on_its_initial_policy() {
    let c = exp2();
    let out = train(Algo::Ppo, &short(Algo::Ppo, 600), &c, 0).unwrap();
    let first = out.curve.first().unwrap().eval_mean;
    let last = out.curve.last().unwrap().eval_mean;
    assert!(last > first + 300.0, "curve {:?}", out.curve);
}

#[test]
fn vpg_runs_to_budget_with_finite_losses() {
    let c = exp2();
    let out = train(Algo::Vpg, &short(Algo::Vpg, 300), &c, 1).unwrap();
    assert_eq!(out.episodes, 300);
    let stats = out.last_stats.unwrap();
    assert!(stats.policy_loss.is_finite() && stats.value_loss.is_finite());
    assert!(out.curve.iter().all(|p| p.eval_mean.is_finite()));
}

#[test]
fn checkpoint_and_curve_round_trip_without_changing_behaviour() {
    let c = exp2();
    let cfg = short(Algo::Vpg, 60);
    let out = train(Algo::Vpg, &cfg, &c, 2).unwrap();
    let dir = tempfile::tempdir().unwrap();

    let ck_path = dir.path().join("agent.json");
    let ck = Checkpoint::new(Algo::Vpg, 2, cfg, c.clone(), out.agent);
    ck.save(&ck_path).unwrap();
    let loaded = Checkpoint::load(&ck_path).unwrap();
    assert_eq!(loaded, ck);
    let before = evaluate_policy(&c, &mut ck.policy(), 10, 77).unwrap();
    let after = evaluate_policy(&c, &mut loaded.policy(), 10, 77).unwrap();
    assert_eq!(before, after);

    let curve_path = dir.path().join("curve.csv");
    write_curve_csv(&curve_path, &out.curve).unwrap();
    assert_eq!(read_curve_csv(&curve_path).unwrap(), out.curve);
    let header = std::fs::read_to_string(&curve_path).unwrap();
    assert!(header.starts_with("episode,eval_mean,eval_std\n"));
}

#[test]
fn checkpoint_for_another_topology_is_rejected() {
    let c = exp2();
    let cfg = short(Algo::Ppo, 30);
    let out = train(Algo::Ppo, &cfg, &c, 0).unwrap();
    let mut ck = Checkpoint::new(Algo::Ppo, 0, cfg, c, out.agent);
    ck.scenario.num_warehouses = 2;
    ck.scenario.transport_cost = vec![vec![0.05, 0.05]];
    ck.scenario.storage_capacity = vec![vec![5, 10, 10]];
    ck.scenario.storage_cost = vec![vec![2.0, 1.0, 1.0]];
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    ck.save(&path).unwrap();
    assert!(Checkpoint::load(&path).is_err());
}
