//! Asynchronous successive halving.
//!
//! Trials climb a ladder of budgets. After reporting at rung `k` a trial
//! pauses; it is promoted to rung `k + 1` only when it ranks within the top
//! `ceil(n_k / eta)` of the `n_k` scores recorded at rung `k` so far and fewer
//! than `ceil(n_k / eta)` trials have left that rung. Decisions use only the
//! scores observed at the time a worker asks for a job.
//!
//! [`asha_run`] drives the scheduler with simulated workers on a virtual
//! clock, so runs are reproducible regardless of host threading.

use rand::Rng;
use rayon::prelude::*;

use crate::space::{Point, SearchSpace};
use crate::trial::{TrialLogEntry, TrialRecord, TrialStatus};
use crate::TuneError;

/// Scheduler reaction to a reported score.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    /// Waiting at the rung for a promotion slot.
    Pause,
    /// Reported at the final rung.
    Complete,
}

/// Work handed to a free worker.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Job {
    /// Continue an existing trial from `from` to `to` budget units.
    Promote { trial: usize, from: u64, to: u64 },
    /// Nothing promotable right now.
    Idle,
}

#[derive(Debug, Clone)]
struct Rung {
    budget: u64,
    /// (trial, score) in arrival order.
    scores: Vec<(usize, f64)>,
    promoted: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct AshaScheduler {
    eta: usize,
    rungs: Vec<Rung>,
    trials: Vec<TrialRecord>,
}

impl AshaScheduler {
    pub fn new(rungs: &[u64], eta: usize) -> Result<Self, TuneError> {
        if eta < 2 {
            return Err(TuneError::Asha(format!("eta must be at least 2, got {eta}")));
        }
        if rungs.is_empty() {
            return Err(TuneError::Asha("budget ladder is empty".into()));
        }
        if rungs[0] == 0 || rungs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(TuneError::Asha(format!(
                "budget ladder must be positive and strictly increasing: {rungs:?}"
            )));
        }
        Ok(Self {
            eta,
            rungs: rungs
                .iter()
                .map(|&budget| Rung {
                    budget,
                    scores: Vec::new(),
                    promoted: Vec::new(),
                })
                .collect(),
            trials: Vec::new(),
        })
    }

    pub fn eta(&self) -> usize {
        self.eta
    }

    pub fn ladder(&self) -> Vec<u64> {
        self.rungs.iter().map(|r| r.budget).collect()
    }

    pub fn trials(&self) -> &[TrialRecord] {
        &self.trials
    }

    /// Registers a new trial that starts running toward the first rung.
    /// Returns its id and target budget.
    pub fn add_trial(&mut self, params: Point) -> (usize, u64) {
        let id = self.trials.len();
        self.trials.push(TrialRecord::new(id, params));
        (id, self.rungs[0].budget)
    }

    /// Index of the rung a running trial is heading to.
    fn target_rung(&self, trial: usize) -> usize {
        self.trials[trial].scores.len()
    }

    /// Records a score at the rung the trial was running toward.
    pub fn report(&mut self, trial: usize, score: f64) -> Result<Decision, TuneError> {
        let rec = self
            .trials
            .get(trial)
            .ok_or_else(|| TuneError::Asha(format!("unknown trial {trial}")))?;
        if rec.status != TrialStatus::Running {
            return Err(TuneError::Asha(format!("trial {trial} is not running ({:?})", rec.status)));
        }
        let k = self.target_rung(trial);
        let budget = self.rungs[k].budget;
        let rec = &mut self.trials[trial];
        rec.record(budget, score)?;
        self.rungs[k].scores.push((trial, score));
        let decision = if k + 1 == self.rungs.len() {
            rec.status = TrialStatus::Complete;
            Decision::Complete
        } else {
            rec.status = TrialStatus::Paused;
            Decision::Pause
        };
        Ok(decision)
    }

    /// Records scores that arrive at the same instant. All are recorded
    /// before any promotion is decided.
    pub fn report_batch(&mut self, batch: &[(usize, f64)]) -> Result<Vec<Decision>, TuneError> {
        batch.iter().map(|&(t, s)| self.report(t, s)).collect()
    }

    /// Promotion quota for rung `k` given its current arrivals.
    pub fn quota(&self, k: usize) -> usize {
        self.rungs[k].scores.len().div_ceil(self.eta)
    }

    pub fn promotions(&self, k: usize) -> usize {
        self.rungs[k].promoted.len()
    }

    pub fn arrivals(&self, k: usize) -> usize {
        self.rungs[k].scores.len()
    }

    /// Best paused trial eligible for promotion out of rung `k`, if any.
    fn promotable(&self, k: usize) -> Option<usize> {
        let quota = self.quota(k);
        if self.promotions(k) >= quota {
            return None;
        }
        let mut ranked = self.rungs[k].scores.clone();
        // Best first; earlier arrival wins ties.
        ranked.sort_by(|a, b| rank_key(b.1).total_cmp(&rank_key(a.1)));
        ranked
            .iter()
            .take(quota)
            .map(|&(t, _)| t)
            .find(|&t| self.trials[t].status == TrialStatus::Paused && self.target_rung(t) == k + 1)
    }

    /// Hands out the most advanced promotion available, or [`Job::Idle`].
    pub fn next_job(&mut self) -> Job {
        for k in (0..self.rungs.len() - 1).rev() {
            if let Some(t) = self.promotable(k) {
                self.rungs[k].promoted.push(t);
                self.trials[t].status = TrialStatus::Running;
                return Job::Promote {
                    trial: t,
                    from: self.rungs[k].budget,
                    to: self.rungs[k + 1].budget,
                };
            }
        }
        Job::Idle
    }

    /// Stops every paused trial whose rung can receive no further arrivals:
    /// no running trial is below or at it and `more_trials` is false.
    pub fn stop_exhausted(&mut self, more_trials: bool) {
        if more_trials {
            return;
        }
        for k in 0..self.rungs.len() - 1 {
            let feeding = self
                .trials
                .iter()
                .any(|t| t.status == TrialStatus::Running && t.scores.len() <= k);
            if feeding || self.promotable(k).is_some() {
                continue;
            }
            for t in &mut self.trials {
                if t.status == TrialStatus::Paused && t.scores.len() == k + 1 {
                    t.status = TrialStatus::Stopped;
                }
            }
        }
    }

    /// Highest scorer at the final rung; earliest arrival wins ties.
    pub fn best(&self) -> Option<&TrialRecord> {
        let last = self.rungs.last()?;
        let mut best: Option<(usize, f64)> = None;
        for &(t, s) in &last.scores {
            if best.is_none_or(|(_, b)| rank_key(s) > rank_key(b)) {
                best = Some((t, s));
            }
        }
        best.map(|(t, _)| &self.trials[t])
    }
}

fn rank_key(s: f64) -> f64 {
    if s.is_nan() {
        f64::NEG_INFINITY
    } else {
        s
    }
}

/// Evaluates a trial configuration at a budget.
///
/// `from` is the budget the trial already reached (0 for a fresh trial), so
/// runners that keep state can resume instead of restarting.
pub trait TrialRunner: Sync {
    fn run(&self, trial: usize, params: &Point, from: u64, to: u64) -> f64;
}

impl<F> TrialRunner for F
where
    F: Fn(usize, &Point, u64, u64) -> f64 + Sync,
{
    fn run(&self, trial: usize, params: &Point, from: u64, to: u64) -> f64 {
        self(trial, params, from, to)
    }
}

#[derive(Debug, Clone)]
pub struct AshaConfig {
    pub rungs: Vec<u64>,
    pub eta: usize,
    pub max_trials: usize,
    /// Simulated concurrent workers.
    pub workers: usize,
    /// Job durations are the budget increment times `1 + jitter * u`,
    /// `u ~ U[0, 1)`. Zero gives synchronous arrival within each wave.
    pub jitter: f64,
}

impl AshaConfig {
    pub fn new(rungs: Vec<u64>, eta: usize, max_trials: usize) -> Self {
        Self {
            rungs,
            eta,
            max_trials,
            workers: max_trials.max(1),
            jitter: 0.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AshaOutcome {
    pub best: TrialRecord,
    pub trials: Vec<TrialRecord>,
    /// Promotions out of each rung except the last.
    pub promotions: Vec<usize>,
    /// Arrivals at each rung.
    pub arrivals: Vec<usize>,
    /// One entry per (trial, rung) report, in completion order.
    pub log: Vec<TrialLogEntry>,
}

struct Running {
    finish: f64,
    trial: usize,
    from: u64,
    to: u64,
}

/// Runs ASHA over configurations sampled from `space` and returns the
/// highest final-rung scorer. Concurrent completions are evaluated in
/// parallel and reported as one batch.
pub fn asha_run<T, R>(runner: &T, space: &SearchSpace, config: &AshaConfig, rng: &mut R) -> Result<AshaOutcome, TuneError>
where
    T: TrialRunner,
    R: Rng + ?Sized,
{
    space.validate()?;
    if config.max_trials == 0 || config.workers == 0 {
        return Err(TuneError::Asha("max_trials and workers must be positive".into()));
    }
    let mut sched = AshaScheduler::new(&config.rungs, config.eta)?;
    let mut running: Vec<Running> = Vec::new();
    let mut log = Vec::new();
    let mut clock = 0.0f64;

    loop {
        while running.len() < config.workers {
            let (trial, from, to) = match sched.next_job() {
                Job::Promote { trial, from, to } => (trial, from, to),
                Job::Idle if sched.trials().len() < config.max_trials => {
                    let (trial, to) = sched.add_trial(space.sample(rng));
                    (trial, 0, to)
                }
                Job::Idle => break,
            };
            let u: f64 = if config.jitter > 0.0 { rng.gen() } else { 0.0 };
            let duration = (to - from) as f64 * (1.0 + config.jitter * u);
            running.push(Running {
                finish: clock + duration,
                trial,
                from,
                to,
            });
        }
        if running.is_empty() {
            break;
        }

        let next = running.iter().map(|r| r.finish).fold(f64::INFINITY, f64::min);
        clock = next;
        let (done, rest): (Vec<Running>, Vec<Running>) = running.into_iter().partition(|r| r.finish <= next);
        running = rest;
        let params: Vec<Point> = done.iter().map(|r| sched.trials()[r.trial].params.clone()).collect();
        let scores: Vec<f64> = done
            .par_iter()
            .zip(&params)
            .map(|(r, p)| runner.run(r.trial, p, r.from, r.to))
            .collect();
        let batch: Vec<(usize, f64)> = done.iter().map(|r| r.trial).zip(scores).collect();
        sched.report_batch(&batch)?;
        for (r, &(trial, score)) in done.iter().zip(&batch) {
            log.push(TrialLogEntry {
                trial,
                params: sched.trials()[trial].params.clone(),
                budget: r.to,
                score,
                wall_time: clock,
            });
        }
        sched.stop_exhausted(sched.trials().len() < config.max_trials);
    }
    sched.stop_exhausted(false);

    let best = sched
        .best()
        .cloned()
        .ok_or_else(|| TuneError::Asha("no trial reached the final rung".into()))?;
    let k = config.rungs.len();
    Ok(AshaOutcome {
        best,
        trials: sched.trials().to_vec(),
        promotions: (0..k - 1).map(|i| sched.promotions(i)).collect(),
        arrivals: (0..k).map(|i| sched.arrivals(i)).collect(),
        log,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::seq::SliceRandom;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn quality(p: &Point) -> f64 {
        p[0] as f64
    }

    #[test]
    fn nine_three_one_synchronous() {
        let space = SearchSpace::from_ranges(&[(0, 1000)]);
        let runner = |_: usize, p: &Point, _: u64, to: u64| quality(p) * to as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let out = asha_run(&runner, &space, &AshaConfig::new(vec![1, 3, 9], 3, 9), &mut rng).unwrap();
        assert_eq!(out.arrivals, vec![9, 3, 1]);
        assert_eq!(out.promotions, vec![3, 1]);
        let global = out.trials.iter().map(|t| quality(&t.params)).fold(f64::MIN, f64::max);
        assert_eq!(quality(&out.best.params), global);
        assert_eq!(out.log.len(), 13);
        let stopped = out.trials.iter().filter(|t| t.status == TrialStatus::Stopped).count();
        assert_eq!(stopped, 8);
    }

    #[test]
    fn single_trial_reaches_final_rung() {
        let space = SearchSpace::from_ranges(&[(0, 5)]);
        let runner = |_: usize, _: &Point, _: u64, to: u64| to as f64;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = asha_run(&runner, &space, &AshaConfig::new(vec![1, 2, 4, 8], 2, 1), &mut rng).unwrap();
        assert_eq!(out.best.id, 0);
        assert_eq!(out.best.status, TrialStatus::Complete);
        assert_eq!(out.best.scores.iter().map(|s| s.0).collect::<Vec<_>>(), vec![1, 2, 4, 8]);
    }

    #[test]
    fn bad_setups_are_rejected() {
        assert!(AshaScheduler::new(&[1, 3], 1).is_err());
        assert!(AshaScheduler::new(&[3, 3], 2).is_err());
        assert!(AshaScheduler::new(&[], 2).is_err());
        let mut s = AshaScheduler::new(&[1, 2], 2).unwrap();
        assert!(s.report(0, 1.0).is_err());
        let (t, _) = s.add_trial(vec![0]);
        assert_eq!(s.report(t, 1.0), Ok(Decision::Pause));
        assert!(s.report(t, 1.0).is_err());
    }

    #[test]
    fn increasing_arrivals_can_strand_the_best() {
        // One worker, scores arriving in increasing order: the quota fills
        // with early arrivals before the best trial reports.
        let mut s = AshaScheduler::new(&[1, 3], 3).unwrap();
        let mut promoted = Vec::new();
        for q in 0..9 {
            let (t, _) = s.add_trial(vec![q]);
            s.report(t, q as f64).unwrap();
            if let Job::Promote { trial, .. } = s.next_job() {
                promoted.push(trial);
            }
        }
        assert_eq!(promoted, vec![0, 3, 6]);
        assert_eq!(s.next_job(), Job::Idle);
    }

    #[test]
    fn trials_are_reproducible() {
        let space = SearchSpace::from_ranges(&[(0, 50), (0, 50)]);
        let runner = |_: usize, p: &Point, _: u64, to: u64| (p[0] - p[1]) as f64 + to as f64 * 0.01;
        let cfg = AshaConfig {
            workers: 3,
            jitter: 0.5,
            ..AshaConfig::new(vec![1, 2, 4], 2, 20)
        };
        let run = || asha_run(&runner, &space, &cfg, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let (a, b) = (run(), run());
        assert_eq!(a.trials, b.trials);
        assert_eq!(a.log, b.log);
    }

    proptest! {
        #[test]
        fn promotions_respect_quota_under_any_arrival_order(
            scores in prop::collection::vec(-100.0..100.0f64, 1..40),
            eta in 2usize..5,
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut s = AshaScheduler::new(&[1, 2, 4], eta).unwrap();
            let mut pending: Vec<usize> = scores.iter().map(|_| s.add_trial(vec![0]).0).collect();
            pending.shuffle(&mut rng);
            let score_of = |t: usize, k: usize| scores[t] + k as f64;
            while let Some(t) = pending.pop() {
                let k = s.trials()[t].scores.len();
                s.report(t, score_of(t, k)).unwrap();
                while rng.gen_bool(0.5) {
                    match s.next_job() {
                        Job::Promote { trial, .. } => {
                            let at = rng.gen_range(0..=pending.len());
                            pending.insert(at, trial);
                        }
                        Job::Idle => break,
                    }
                }
                for k in 0..2 {
                    prop_assert!(s.promotions(k) <= s.arrivals(k).div_ceil(eta));
                }
            }
        }

        #[test]
        fn rank_stable_objective_finds_global_best(
            qualities in prop::collection::vec(0i64..1000, 1..30),
            eta in 2usize..4,
        ) {
            // Synchronous waves: every trial of a rung reports before any promotion.
            let space = SearchSpace::from_ranges(&[(0, 1000)]);
            let mut s = AshaScheduler::new(&[1, 3, 9], eta).unwrap();
            let ids: Vec<usize> = qualities.iter().map(|&q| s.add_trial(vec![q]).0).collect();
            let mut wave = ids;
            loop {
                let batch: Vec<(usize, f64)> = wave
                    .iter()
                    .map(|&t| {
                        let k = s.trials()[t].scores.len() as f64;
                        (t, s.trials()[t].params[0] as f64 * (1.0 + k))
                    })
                    .collect();
                s.report_batch(&batch).unwrap();
                wave.clear();
                while let Job::Promote { trial, .. } = s.next_job() {
                    wave.push(trial);
                }
                if wave.is_empty() {
                    break;
                }
            }
            let best = s.best().unwrap();
            prop_assert_eq!(best.params[0], *qualities.iter().max().unwrap());
            prop_assert!(space.contains(&best.params));
        }
    }
}
