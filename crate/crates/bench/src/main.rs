use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use scim_bench::results::{to_csv_string, to_json_string};
use scim_bench::{
    artifact_path, asha_sweep, expand, export_results, grid_sweep, labels, load_scenario,
    render_table, run_benchmark, tune_sq, BenchOptions, Format, Method, ResultRecord, SqArtifact, SqTuneConfig,
    SweepConfig,
};
use scim_core::oracle::{plan_clairvoyant, realize_demand, write_plan_csv, OraclePolicy};
use scim_core::{Env, Policy, RandomPolicy, SQPolicy, ScenarioConfig, ZeroPolicy};
use scim_rl::{train, write_curve_csv, Algo, Checkpoint, TrainConfig};
use scim_tune::{append_trial_log, AshaConfig, TrialLogEntry};

/// Two-echelon inventory benchmark: simulate, tune, train and compare
/// replenishment policies.
#[derive(Parser)]
#[command(name = "scim", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Registered scenario name (e.g. 1p1w-exp2) or a JSON scenario file.
    /// `bench` also accepts family prefixes, `all`, and comma lists.
    #[arg(long, global = true, default_value = "1p1w-exp1")]
    scenario: String,
    /// Seed: first episode seed for simulate/evaluate/bench/oracle, the
    /// training seed for train/sweep, the optimizer seed for tune-sq.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Episode count. Defaults: simulate 1, evaluate/bench 200, tune-sq 30
    /// per objective call, train and sweep the preset training budget.
    #[arg(long, global = true)]
    episodes: Option<usize>,
    /// Output file. Defaults depend on the subcommand; `-` means stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for episode fan-out (1 = single-worker mode).
    #[arg(long, global = true)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Roll a policy and write the per-step trajectory as CSV.
    Simulate {
        /// zero | random | oracle | sq:FILE | ckpt:FILE
        #[arg(long, default_value = "zero")]
        policy: String,
    },
    /// Tune (s, Q) parameters with Bayesian optimization.
    TuneSq {
        #[arg(long, default_value_t = 200)]
        budget: usize,
        /// First seed of the fixed tuning episodes.
        #[arg(long, default_value_t = 50_000)]
        tune_seed_base: u64,
        /// JSON-lines trial log; defaults to the artifact path with
        /// `.trials.jsonl`.
        #[arg(long)]
        trial_log: Option<PathBuf>,
        #[arg(long, default_value = "artifacts")]
        artifacts: PathBuf,
    },
    /// Train a VPG or PPO agent and save a checkpoint and learning curve.
    Train {
        #[arg(long, value_enum, default_value_t = AlgoArg::Ppo)]
        algo: AlgoArg,
        /// JSON training configuration; missing fields take preset values.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Learning-curve CSV; defaults to the checkpoint path with `.curve.csv`.
        #[arg(long)]
        curve: Option<PathBuf>,
        #[arg(long, default_value = "artifacts")]
        artifacts: PathBuf,
    },
    /// Evaluate one method under the benchmark seed protocol.
    Evaluate {
        #[arg(long)]
        method: Method,
        #[arg(long, default_value = "artifacts")]
        artifacts: PathBuf,
        #[arg(long)]
        format: Option<FormatArg>,
    },
    /// Evaluate methods on scenarios with paired seeds and export results.
    Bench {
        /// Comma-separated methods.
        #[arg(long, value_delimiter = ',', default_value = "oracle,random,zero")]
        methods: Vec<Method>,
        #[arg(long, default_value = "artifacts")]
        artifacts: PathBuf,
        /// Result format; inferred from the --out extension if omitted.
        #[arg(long)]
        format: Option<FormatArg>,
        /// Record wall-clock seconds per result (breaks byte-reproducibility).
        #[arg(long)]
        timing: bool,
    },
    /// Plan one episode clairvoyantly and write the plan as CSV.
    Oracle,
    /// Hyperparameter sweep over the DRL tuning grid.
    Sweep {
        #[arg(long, value_enum, default_value_t = AlgoArg::Ppo)]
        algo: AlgoArg,
        #[arg(long, value_enum, default_value_t = SearchArg::Asha)]
        search: SearchArg,
        /// ASHA rungs in training episodes, comma-separated.
        #[arg(long, value_delimiter = ',', default_value = "300,900,2700")]
        rungs: Vec<u64>,
        #[arg(long, default_value_t = 3)]
        eta: usize,
        #[arg(long, default_value_t = 27)]
        max_trials: usize,
        /// Episodes used to score each trained agent.
        #[arg(long, default_value_t = 50)]
        score_episodes: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Vpg,
    Ppo,
}

impl From<AlgoArg> for Algo {
    fn from(a: AlgoArg) -> Self {
        match a {
            AlgoArg::Vpg => Algo::Vpg,
            AlgoArg::Ppo => Algo::Ppo,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SearchArg {
    Grid,
    Asha,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(e) = run(cli) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(cli: Cli) -> Result<()> {
    let g = cli.global;
    if let Some(n) = g.workers {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .context("configuring worker threads")?;
    }
    match cli.command {
        Command::Simulate { policy } => simulate(&g, &policy),
        Command::TuneSq {
            budget,
            tune_seed_base,
            trial_log,
            artifacts,
        } => tune(&g, budget, tune_seed_base, trial_log, &artifacts),
        Command::Train {
            algo,
            config,
            curve,
            artifacts,
        } => train_cmd(&g, algo.into(), config, curve, &artifacts),
        Command::Evaluate {
            method,
            artifacts,
            format,
        } => {
            let opts = bench_options(&g, artifacts, false);
            let records = run_benchmark(&[g.scenario.clone()], &[method], &opts)?;
            let r = &records[0];
            eprintln!(
                "{} on {}: {:.2} ± {:.2} over {} episodes",
                r.method, g.scenario, r.mean, r.std, r.n_episodes
            );
            write_records(&records, g.out.as_deref(), format)
        }
        Command::Bench {
            methods,
            artifacts,
            format,
            timing,
        } => {
            let scenarios = scenario_list(&g.scenario)?;
            let opts = bench_options(&g, artifacts, timing);
            let records = run_benchmark(&scenarios, &methods, &opts)?;
            eprint!("{}", render_table(&records));
            write_records(&records, g.out.as_deref(), format)
        }
        Command::Oracle => {
            let config = load_scenario(&g.scenario)?;
            let plan = plan_clairvoyant(&realize_demand(&config, g.seed), &config)?;
            eprintln!("clairvoyant profit for seed {}: {:.4}", g.seed, plan.total_profit);
            write_plan_csv(&plan, &config, open_out(g.out.as_deref())?)?;
            Ok(())
        }
        Command::Sweep {
            algo,
            search,
            rungs,
            eta,
            max_trials,
            score_episodes,
        } => sweep(&g, algo.into(), search, rungs, eta, max_trials, score_episodes),
    }
}

fn bench_options(g: &Global, artifacts: PathBuf, timing: bool) -> BenchOptions {
    BenchOptions {
        n_episodes: g.episodes.unwrap_or(200),
        seed_base: g.seed,
        artifacts,
        timing,
    }
}

fn scenario_list(selector: &str) -> Result<Vec<String>> {
    let mut out = Vec::new();
    for part in selector.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let names = expand(part);
        if names.is_empty() {
            out.push(part.to_string());
        } else {
            out.extend(names.into_iter().map(String::from));
        }
    }
    if out.is_empty() {
        bail!("no scenarios selected by `{selector}`");
    }
    Ok(out)
}

fn open_out(path: Option<&Path>) -> Result<Box<dyn Write>> {
    match path {
        None => Ok(Box::new(io::stdout().lock())),
        Some(p) if p == Path::new("-") => Ok(Box::new(io::stdout().lock())),
        Some(p) => Ok(Box::new(File::create(p).with_context(|| format!("creating {}", p.display()))?)),
    }
}

fn write_records(records: &[ResultRecord], out: Option<&Path>, format: Option<FormatArg>) -> Result<()> {
    match out {
        Some(p) if p != Path::new("-") => {
            let format = format.map(Format::from).unwrap_or_else(|| Format::from_path(p));
            export_results(records, p, format)?;
        }
        _ => {
            let text = match format.map(Format::from).unwrap_or(Format::Csv) {
                Format::Csv => to_csv_string(records)?,
                Format::Json => to_json_string(records)?,
            };
            io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn make_policy(config: &ScenarioConfig, choice: &str, seed: u64) -> Result<Box<dyn Policy>> {
    Ok(match choice.split_once(':') {
        None if choice == "zero" => Box::new(ZeroPolicy::new(config)),
        None if choice == "random" => Box::new(RandomPolicy::new(config, seed)),
        None if choice == "oracle" => Box::new(OraclePolicy::new()),
        Some(("sq", file)) => Box::new(SQPolicy::new(config, SqArtifact::load(Path::new(file))?.params)?),
        Some(("ckpt", file)) => {
            let ck = Checkpoint::load(Path::new(file))?;
            if &ck.scenario != config {
                bail!("checkpoint {file} was trained on a different scenario");
            }
            Box::new(ck.policy())
        }
        _ => bail!("unknown policy `{choice}`; expected zero, random, oracle, sq:FILE or ckpt:FILE"),
    })
}

fn simulate(g: &Global, choice: &str) -> Result<()> {
    let config = load_scenario(&g.scenario)?;
    let mut policy = make_policy(&config, choice, g.seed)?;
    let mut w = csv::Writer::from_writer(open_out(g.out.as_deref())?);

    let mut header = vec!["episode_seed".to_string(), "t".to_string()];
    for prefix in ["stock", "action"] {
        for i in 0..config.num_products {
            for j in 0..config.num_nodes() {
                header.push(format!("{prefix}_{i}_{j}"));
            }
        }
    }
    for i in 0..config.num_products {
        for j in 1..=config.num_warehouses {
            header.push(format!("demand_{i}_{j}"));
        }
    }
    header.extend(["revenue", "production_cost", "transport_cost", "storage_cost", "penalty_cost", "reward"].map(String::from));
    w.write_record(&header)?;

    for k in 0..g.episodes.unwrap_or(1) as u64 {
        let seed = g.seed + k;
        let mut env = Env::new(config.clone(), seed)?;
        let mut obs = env.reset();
        policy.reset(&config, seed);
        while !env.is_done() {
            let t = env.state().t;
            let action = env.clip_action(&policy.act(&obs))?;
            let out = env.step(&action)?;
            let b = &out.breakdown;
            let row = [seed.to_string(), t.to_string()]
                .into_iter()
                .chain(env.state().stock.iter().flatten().map(i64::to_string))
                .chain(action.to_flat().into_iter().map(|x| x.to_string()))
                .chain(out.demand_realized.iter().flatten().map(i64::to_string))
                .chain(
                    [b.revenue, b.production_cost, b.transport_cost, b.storage_cost, b.penalty_cost, out.reward]
                        .map(|x| x.to_string()),
                );
            w.write_record(row)?;
            obs = out.observation;
        }
    }
    w.flush()?;
    Ok(())
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let s = path.to_string_lossy();
    PathBuf::from(format!("{}{suffix}", s.strip_suffix(".json").unwrap_or(&s)))
}

fn tune(g: &Global, budget: usize, tune_seed_base: u64, trial_log: Option<PathBuf>, artifacts: &Path) -> Result<()> {
    let config = load_scenario(&g.scenario)?;
    let tune = SqTuneConfig {
        budget,
        tune_episodes: g.episodes.unwrap_or(30),
        tune_seed_base,
        bo_seed: g.seed,
    };
    let out = tune_sq(&config, &tune)?;
    let path = match &g.out {
        Some(p) => p.clone(),
        None => {
            std::fs::create_dir_all(artifacts)?;
            artifact_path(artifacts, &g.scenario, Method::BoSq)
        }
    };
    SqArtifact {
        scenario: config,
        params: out.params.clone(),
        tuned_mean: out.tuned_mean,
        tune,
    }
    .save(&path)?;

    let log_path = trial_log.unwrap_or_else(|| with_suffix(&path, ".trials.jsonl"));
    let entries: Vec<TrialLogEntry> = out
        .history
        .iter()
        .map(|r| TrialLogEntry {
            trial: r.id,
            params: r.params.clone(),
            budget: 1,
            score: r.last_score().unwrap_or(f64::NAN),
            wall_time: 0.0,
        })
        .collect();
    if log_path.exists() {
        std::fs::remove_file(&log_path)?;
    }
    append_trial_log(&log_path, &entries)?;
    eprintln!(
        "tuned {} ({}): mean {:.2} on tuning seeds; wrote {} and {}",
        g.scenario,
        out.space.describe(&out.params.to_flat()),
        out.tuned_mean,
        path.display(),
        log_path.display()
    );
    Ok(())
}

fn train_cmd(g: &Global, algo: Algo, config: Option<PathBuf>, curve: Option<PathBuf>, artifacts: &Path) -> Result<()> {
    let scenario = load_scenario(&g.scenario)?;
    let mut cfg = match config {
        Some(p) => {
            let text = std::fs::read_to_string(&p).with_context(|| format!("reading {}", p.display()))?;
            let mut base = serde_json::to_value(TrainConfig::preset(algo))?;
            let overrides: serde_json::Value = serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?;
            let (Some(b), Some(o)) = (base.as_object_mut(), overrides.as_object()) else {
                bail!("{} must contain a JSON object", p.display());
            };
            b.extend(o.clone());
            serde_json::from_value(base)?
        }
        None => TrainConfig::preset(algo),
    };
    if let Some(n) = g.episodes {
        cfg.episodes = n;
    }
    let out = train(algo, &cfg, &scenario, g.seed)?;
    let method = match algo {
        Algo::Vpg => Method::Vpg,
        Algo::Ppo => Method::Ppo,
    };
    let path = match &g.out {
        Some(p) => p.clone(),
        None => {
            std::fs::create_dir_all(artifacts)?;
            artifact_path(artifacts, &g.scenario, method)
        }
    };
    Checkpoint::new(algo, g.seed, cfg, scenario, out.agent).save(&path)?;
    let curve_path = curve.unwrap_or_else(|| with_suffix(&path, ".curve.csv"));
    write_curve_csv(&curve_path, &out.curve)?;
    if let Some(last) = out.curve.last() {
        eprintln!(
            "{algo} after {} episodes ({} updates): eval {:.2} ± {:.2}; wrote {} and {}",
            out.episodes,
            out.updates,
            last.eval_mean,
            last.eval_std,
            path.display(),
            curve_path.display()
        );
    }
    Ok(())
}

fn sweep(
    g: &Global,
    algo: Algo,
    search: SearchArg,
    rungs: Vec<u64>,
    eta: usize,
    max_trials: usize,
    score_episodes: usize,
) -> Result<()> {
    let scenario = load_scenario(&g.scenario)?;
    let mut base = TrainConfig::preset(algo);
    if let Some(n) = g.episodes {
        base.episodes = n;
    }
    let cfg = SweepConfig {
        algo,
        base,
        seed: g.seed,
        score_episodes,
        score_seed_base: 100_000,
    };
    let space = scim_bench::hyper_space(algo);
    let (best, entries) = match search {
        SearchArg::Grid => {
            let ranked = grid_sweep(&cfg, &scenario, g.workers.unwrap_or(0))?;
            let entries = ranked
                .iter()
                .map(|t| TrialLogEntry {
                    trial: t.id,
                    params: t.params.clone(),
                    budget: cfg.base.episodes as u64,
                    score: t.last_score().unwrap_or(f64::NAN),
                    wall_time: 0.0,
                })
                .collect();
            (ranked[0].clone(), entries)
        }
        SearchArg::Asha => {
            let mut asha = AshaConfig::new(rungs, eta, max_trials);
            asha.workers = g.workers.unwrap_or(max_trials).max(1);
            asha_sweep(&cfg, &scenario, &asha, g.seed)?
        }
    };
    let (family, exp) = labels(&g.scenario);
    let log_path = g
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{family}-{exp}.{algo}.sweep.jsonl")));
    if log_path.exists() {
        std::fs::remove_file(&log_path)?;
    }
    append_trial_log(&log_path, &entries)?;
    eprintln!(
        "best {algo} configuration: {} (score {:.2}); log in {}",
        space.describe(&best.params),
        best.last_score().unwrap_or(f64::NAN),
        log_path.display()
    );
    Ok(())
}
