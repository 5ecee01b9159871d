//! The benchmark protocol: every method on a scenario is evaluated on the
//! same episode seeds `seed_base..seed_base + n_episodes`.
//!
//! Learned methods read artifacts from a directory, one file per
//! (scenario, method): `{scenario}.{method}.json`, where `{scenario}` is the
//! registered name or the scenario file stem. `a3c-slot` takes an actor-critic
//! checkpoint of any algorithm, so an externally trained agent can be slotted
//! into the comparison.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use scim_core::oracle::oracle_evaluate;
use scim_core::{evaluate_policy_par, EvalSummary, RandomPolicy, SQPolicy, ScenarioConfig, ZeroPolicy};
use scim_rl::Checkpoint;

use crate::registry::{labels, load_scenario};
use crate::results::ResultRecord;
use crate::sq::SqArtifact;
use crate::BenchError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    A3cSlot,
    Ppo,
    Vpg,
    BoSq,
    Oracle,
    Random,
    Zero,
}

impl Method {
    pub const ALL: [Method; 7] = [
        Method::A3cSlot,
        Method::Ppo,
        Method::Vpg,
        Method::BoSq,
        Method::Oracle,
        Method::Random,
        Method::Zero,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::A3cSlot => "a3c-slot",
            Method::Ppo => "ppo",
            Method::Vpg => "vpg",
            Method::BoSq => "bo-sq",
            Method::Oracle => "oracle",
            Method::Random => "random",
            Method::Zero => "zero",
        }
    }

    pub fn needs_artifact(self) -> bool {
        matches!(self, Method::A3cSlot | Method::Ppo | Method::Vpg | Method::BoSq)
    }

    fn hint(self) -> &'static str {
        match self {
            Method::BoSq => "produce it with `scim tune-sq`",
            Method::Ppo => "produce it with `scim train --algo ppo`",
            Method::Vpg => "produce it with `scim train --algo vpg`",
            _ => "copy any actor-critic checkpoint there",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.to_ascii_lowercase();
        Method::ALL.into_iter().find(|m| m.name() == lower).ok_or_else(|| {
            let known: Vec<_> = Method::ALL.iter().map(|m| m.name()).collect();
            BenchError::Usage(format!("unknown method `{s}`; expected one of {}", known.join(", ")))
        })
    }
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub n_episodes: usize,
    pub seed_base: u64,
    pub artifacts: PathBuf,
    /// Record wall-clock seconds; otherwise `wall_time` is 0 so that result
    /// files are reproducible byte for byte.
    pub timing: bool,
}

impl Default for BenchOptions {
    fn default() -> Self {
        Self {
            n_episodes: 200,
            seed_base: 0,
            artifacts: PathBuf::from("artifacts"),
            timing: false,
        }
    }
}

/// Artifact file key for a scenario selector.
pub fn scenario_key(name_or_path: &str) -> String {
    match labels(name_or_path) {
        (stem, exp) if exp == "custom" => stem,
        (family, exp) => format!("{family}-{exp}"),
    }
}

pub fn artifact_path(dir: &Path, name_or_path: &str, method: Method) -> PathBuf {
    dir.join(format!("{}.{}.json", scenario_key(name_or_path), method.name()))
}

fn require_artifact(dir: &Path, name_or_path: &str, method: Method) -> Result<PathBuf, BenchError> {
    let path = artifact_path(dir, name_or_path, method);
    if path.is_file() {
        Ok(path)
    } else {
        Err(BenchError::MissingArtifact {
            method: method.name().to_string(),
            scenario: name_or_path.to_string(),
            path: path.display().to_string(),
            hint: method.hint().to_string(),
        })
    }
}

/// Evaluates one method on one scenario under the common seed protocol.
pub fn evaluate_method(
    name_or_path: &str,
    config: &ScenarioConfig,
    method: Method,
    opts: &BenchOptions,
) -> Result<EvalSummary, BenchError> {
    let (n, base) = (opts.n_episodes, opts.seed_base);
    if n == 0 {
        return Err(BenchError::Usage("episode count must be positive".into()));
    }
    let summary = match method {
        Method::Zero => evaluate_policy_par(config, || ZeroPolicy::new(config), n, base)?,
        Method::Random => evaluate_policy_par(config, || RandomPolicy::new(config, base), n, base)?,
        Method::Oracle => oracle_evaluate(config, n, base)?,
        Method::BoSq => {
            let path = require_artifact(&opts.artifacts, name_or_path, method)?;
            let art = SqArtifact::load(&path)?;
            if &art.scenario != config {
                return Err(BenchError::ScenarioMismatch {
                    path: path.display().to_string(),
                });
            }
            let policy = SQPolicy::new(config, art.params)?;
            evaluate_policy_par(config, || policy.clone(), n, base)?
        }
        Method::Ppo | Method::Vpg | Method::A3cSlot => {
            let path = require_artifact(&opts.artifacts, name_or_path, method)?;
            let ck = Checkpoint::load(&path)?;
            if &ck.scenario != config {
                return Err(BenchError::ScenarioMismatch {
                    path: path.display().to_string(),
                });
            }
            let policy = ck.policy();
            evaluate_policy_par(config, || policy.clone(), n, base)?
        }
    };
    Ok(summary)
}

/// Runs every (scenario, method) pair. All required artifacts are checked
/// before any evaluation starts, so a missing file fails fast.
pub fn run_benchmark(
    scenarios: &[String],
    methods: &[Method],
    opts: &BenchOptions,
) -> Result<Vec<ResultRecord>, BenchError> {
    if scenarios.is_empty() || methods.is_empty() {
        return Err(BenchError::Usage("benchmark needs at least one scenario and one method".into()));
    }
    let mut configs = Vec::with_capacity(scenarios.len());
    for s in scenarios {
        configs.push(load_scenario(s)?);
        for &m in methods.iter().filter(|m| m.needs_artifact()) {
            require_artifact(&opts.artifacts, s, m)?;
        }
    }

    let mut records = Vec::with_capacity(scenarios.len() * methods.len());
    for (s, config) in scenarios.iter().zip(&configs) {
        let (scenario, experiment) = labels(s);
        for &m in methods {
            let start = Instant::now();
            let summary = evaluate_method(s, config, m, opts)?;
            let elapsed = start.elapsed().as_secs_f64();
            records.push(ResultRecord {
                scenario: scenario.clone(),
                experiment: experiment.clone(),
                method: m.name().to_string(),
                mean: summary.mean,
                std: summary.std,
                n_episodes: opts.n_episodes,
                seed_base: opts.seed_base,
                wall_time: if opts.timing { elapsed } else { 0.0 },
            });
        }
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::registry::builtin;
    use scim_core::{evaluate_policy, SQParams};

    fn opts(dir: &Path) -> BenchOptions {
        BenchOptions {
            n_episodes: 6,
            seed_base: 11,
            artifacts: dir.to_path_buf(),
            timing: false,
        }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.name().parse::<Method>().unwrap(), m);
        }
        assert!("a3c".parse::<Method>().is_err());
    }

    #[test]
    fn artifact_paths() {
        let d = Path::new("arts");
        assert_eq!(artifact_path(d, "1p1w-exp2", Method::Ppo), d.join("1p1w-exp2.ppo.json"));
        assert_eq!(artifact_path(d, "cfg/mine.json", Method::BoSq), d.join("mine.bo-sq.json"));
    }

    #[test]
    fn missing_artifact_names_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let err = run_benchmark(&["1p1w-exp1".into()], &[Method::Zero, Method::Ppo], &opts(dir.path())).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("1p1w-exp1.ppo.json"), "{msg}");
        assert!(msg.contains("scim train"), "{msg}");
    }

    #[test]
    fn baselines_use_the_common_seeds() {
        let dir = tempfile::tempdir().unwrap();
        let o = opts(dir.path());
        let recs = run_benchmark(&["1p1w-exp1".into()], &[Method::Zero, Method::Random, Method::Oracle], &o).unwrap();
        assert_eq!(recs.len(), 3);
        let c = builtin("1p1w-exp1").unwrap();
        let zero = evaluate_policy(&c, &mut ZeroPolicy::new(&c), 6, 11).unwrap();
        assert_eq!(recs[0].mean, zero.mean);
        assert!(recs[2].mean >= recs[0].mean && recs[2].mean >= recs[1].mean);
        assert!(recs.iter().all(|r| r.wall_time == 0.0 && r.seed_base == 11 && r.experiment == "exp1"));
    }

    #[test]
    fn sq_artifact_is_evaluated_and_checked_against_the_scenario() {
        let dir = tempfile::tempdir().unwrap();
        let c = builtin("1p1w-exp1").unwrap();
        let params = SQParams::from_flat(&c, &[4, 10, 6, 8]);
        SqArtifact {
            scenario: c.clone(),
            params: params.clone(),
            tuned_mean: 0.0,
            tune: Default::default(),
        }
        .save(&artifact_path(dir.path(), "1p1w-exp1", Method::BoSq))
        .unwrap();
        let got = evaluate_method("1p1w-exp1", &c, Method::BoSq, &opts(dir.path())).unwrap();
        let want = evaluate_policy(&c, &mut SQPolicy::new(&c, params).unwrap(), 6, 11).unwrap();
        assert_eq!(got, want);

        let other = builtin("1p1w-exp2").unwrap();
        let err = evaluate_method("1p1w-exp1", &other, Method::BoSq, &opts(dir.path())).unwrap_err();
        assert!(matches!(err, BenchError::ScenarioMismatch { .. }));
    }
}
