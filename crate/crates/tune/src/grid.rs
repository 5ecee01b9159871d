use rayon::prelude::*;

use crate::space::{Point, SearchSpace};
use crate::trial::{TrialRecord, TrialStatus};
use crate::TuneError;

/// Evaluates every lattice point of `space` once and returns the trials
/// ranked best first. Ties keep enumeration order; NaN scores rank last.
///
/// `parallelism` caps the worker threads (0 or 1 runs sequentially). The
/// ranking does not depend on it.
pub fn grid_search<F>(space: &SearchSpace, objective: F, parallelism: usize) -> Result<Vec<TrialRecord>, TuneError>
where
    F: Fn(&Point) -> f64 + Sync,
{
    space.validate()?;
    let points = space.grid();
    let scores: Vec<f64> = if parallelism <= 1 {
        points.iter().map(&objective).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(parallelism)
            .build()
            .map_err(|e| TuneError::Asha(format!("thread pool: {e}")))?;
        pool.install(|| points.par_iter().map(&objective).collect())
    };

    let mut trials: Vec<TrialRecord> = points
        .into_iter()
        .zip(scores)
        .enumerate()
        .map(|(id, (params, score))| TrialRecord {
            id,
            params,
            scores: vec![(1, score)],
            status: TrialStatus::Complete,
        })
        .collect();
    let key = |t: &TrialRecord| {
        let s = t.scores[0].1;
        if s.is_nan() {
            f64::NEG_INFINITY
        } else {
            s
        }
    };
    trials.sort_by(|a, b| key(b).total_cmp(&key(a)));
    Ok(trials)
}
