//! Bayesian optimization over integer boxes.
//!
//! Random initial design, then repeatedly: fit a [`GpSurrogate`] on
//! normalized coordinates, score a random candidate set (rounded onto the
//! lattice) by expected improvement, evaluate the best unseen candidate.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use statrs::function::erf::erfc;

use crate::gp::{GpSurrogate, KernelParams};
use crate::space::{Point, SearchSpace};
use crate::trial::{TrialRecord, TrialStatus};
use crate::TuneError;

#[derive(Debug, Clone)]
pub struct BoConfig {
    /// Total objective evaluations.
    pub budget: usize,
    /// Fraction of the budget spent on the random initial design.
    pub initial_fraction: f64,
    /// Random candidates scored per iteration.
    pub candidates: usize,
    /// Extra candidates drawn by perturbing the incumbent.
    pub local_candidates: usize,
    /// Kernel hyperparameters are re-searched every this many iterations.
    pub refit_every: usize,
}

impl Default for BoConfig {
    fn default() -> Self {
        Self {
            budget: 100,
            initial_fraction: 0.2,
            candidates: 1024,
            local_candidates: 256,
            refit_every: 5,
        }
    }
}

impl BoConfig {
    pub fn with_budget(budget: usize) -> Self {
        Self {
            budget,
            ..Self::default()
        }
    }

    pub fn initial_design_size(&self) -> usize {
        ((self.budget as f64 * self.initial_fraction).round() as usize).max(1)
    }
}

#[derive(Debug, Clone)]
pub struct BoOutcome {
    pub best: TrialRecord,
    /// Every evaluation in order; trial ids are evaluation indices.
    pub history: Vec<TrialRecord>,
}

fn standard_normal_cdf(z: f64) -> f64 {
    0.5 * erfc(-z / std::f64::consts::SQRT_2)
}

fn standard_normal_pdf(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Expected improvement of a maximization objective over `best_so_far`.
pub fn expected_improvement(surrogate: &GpSurrogate, point: &[f64], best_so_far: f64) -> f64 {
    let (mu, var) = surrogate.predict(point);
    ei_from_moments(mu, var.sqrt(), best_so_far)
}

pub(crate) fn ei_from_moments(mu: f64, sigma: f64, best: f64) -> f64 {
    let gain = mu - best;
    if sigma <= 0.0 {
        return gain.max(0.0);
    }
    let z = gain / sigma;
    (gain * standard_normal_cdf(z) + sigma * standard_normal_pdf(z)).max(0.0)
}

/// Maximizes `objective` over `space` with at most `config.budget`
/// evaluations (fewer if the space is exhausted). Deterministic given `rng`.
pub fn bo_optimize<F, R>(
    mut objective: F,
    space: &SearchSpace,
    config: &BoConfig,
    rng: &mut R,
) -> Result<BoOutcome, TuneError>
where
    F: FnMut(&Point) -> f64,
    R: Rng + ?Sized,
{
    space.validate()?;
    let initial = config.initial_design_size();
    if config.budget < initial {
        return Err(TuneError::Budget {
            budget: config.budget,
            initial,
        });
    }
    let budget = (config.budget as u64).min(space.cardinality()) as usize;

    let mut seen: HashSet<Point> = HashSet::new();
    let mut history: Vec<TrialRecord> = Vec::with_capacity(budget);
    let mut evaluate = |p: Point, history: &mut Vec<TrialRecord>, seen: &mut HashSet<Point>| {
        let value = objective(&p);
        let mut rec = TrialRecord::new(history.len(), p.clone());
        rec.scores.push((1, value));
        rec.status = TrialStatus::Complete;
        history.push(rec);
        seen.insert(p);
    };

    let mut attempts = 0;
    while history.len() < initial.min(budget) && attempts < 100 * initial {
        attempts += 1;
        let p = space.sample(rng);
        if !seen.contains(&p) {
            evaluate(p, &mut history, &mut seen);
        }
    }

    let mut kernel = KernelParams::default();
    let mut iteration = 0;
    while history.len() < budget {
        let xs: Vec<Vec<f64>> = history.iter().map(|r| space.normalize(&r.params)).collect();
        let ys: Vec<f64> = history.iter().map(|r| r.scores[0].1).collect();
        let gp = if iteration % config.refit_every.max(1) == 0 {
            GpSurrogate::fit(&xs, &ys, kernel)
        } else {
            GpSurrogate::fit_with(&xs, &ys, kernel)
        };
        iteration += 1;
        let best_idx = argmax(&ys);
        let best_value = ys[best_idx];

        let mut candidates: Vec<Point> = Vec::with_capacity(config.candidates + config.local_candidates);
        let mut proposed: HashSet<Point> = HashSet::new();
        for _ in 0..config.candidates {
            let u: Vec<f64> = (0..space.len()).map(|_| rng.gen::<f64>()).collect();
            let p = space.denormalize(&u);
            if !seen.contains(&p) && proposed.insert(p.clone()) {
                candidates.push(p);
            }
        }
        let incumbent = history[best_idx].params.clone();
        for _ in 0..config.local_candidates {
            let p: Point = incumbent
                .iter()
                .zip(&space.dims)
                .map(|(&x, (_, d))| {
                    let span = (d.hi() - d.lo()).max(1);
                    let radius = (span / 5).max(1);
                    let step = if rng.gen_bool(0.5) { rng.gen_range(-radius..=radius) } else { 0 };
                    (x + step).clamp(d.lo(), d.hi())
                })
                .collect();
            if !seen.contains(&p) && proposed.insert(p.clone()) {
                candidates.push(p);
            }
        }

        let next = match &gp {
            Some(gp) if !candidates.is_empty() => {
                kernel = gp.kernel;
                let scores: Vec<f64> = candidates
                    .par_iter()
                    .map(|p| expected_improvement(gp, &space.normalize(p), best_value))
                    .collect();
                candidates.swap_remove(argmax(&scores))
            }
            _ => match unseen_point(space, &seen, rng) {
                Some(p) => p,
                None => break,
            },
        };
        evaluate(next, &mut history, &mut seen);
    }

    let ys: Vec<f64> = history.iter().map(|r| r.scores[0].1).collect();
    let best = history[argmax(&ys)].clone();
    Ok(BoOutcome { best, history })
}

/// First maximal index.
fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (k, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = k;
        }
    }
    best
}

fn unseen_point<R: Rng + ?Sized>(space: &SearchSpace, seen: &HashSet<Point>, rng: &mut R) -> Option<Point> {
    for _ in 0..1000 {
        let p = space.sample(rng);
        if !seen.contains(&p) {
            return Some(p);
        }
    }
    if space.cardinality() <= 1_000_000 {
        return space.grid().into_iter().find(|p| !seen.contains(p));
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ei_closed_forms() {
        assert_eq!(ei_from_moments(1.0, 0.0, 1.0), 0.0);
        assert_eq!(ei_from_moments(0.5, 0.0, 1.0), 0.0);
        assert!((ei_from_moments(1.0, 1.0, 1.0) - 0.398_942_280_4).abs() < 1e-9);
        assert!((standard_normal_cdf(0.0) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn finds_parabola_peak_on_small_lattice() {
        let space = SearchSpace::new().int("x", 0, 10);
        // Exhaustive reference.
        let f = |x: i64| -((x - 3) as f64).powi(2);
        let argbest = (0..=10).max_by(|&a, &b| f(a).partial_cmp(&f(b)).unwrap()).unwrap();
        assert_eq!(argbest, 3);

        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let out = bo_optimize(|p| f(p[0]), &space, &BoConfig::with_budget(30), &mut rng).unwrap();
        assert_eq!(out.best.params, vec![3]);
        assert!(out.history.len() <= 11);
    }

    #[test]
    fn constant_objective_returns_the_constant() {
        let space = SearchSpace::from_ranges(&[(0, 4), (0, 4)]);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let out = bo_optimize(|_| 7.5, &space, &BoConfig::with_budget(10), &mut rng).unwrap();
        assert_eq!(out.best.last_score(), Some(7.5));
    }

    #[test]
    fn finds_2d_optimum_and_is_deterministic() {
        let space = SearchSpace::from_ranges(&[(0, 30), (0, 30)]);
        let f = |p: &Point| -((p[0] - 21) as f64).powi(2) - 0.5 * ((p[1] - 7) as f64).powi(2);
        let run = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            bo_optimize(f, &space, &BoConfig::with_budget(60), &mut rng).unwrap()
        };
        let a = run(3);
        assert_eq!(a.best.params, vec![21, 7]);
        let b = run(3);
        let pa: Vec<_> = a.history.iter().map(|r| r.params.clone()).collect();
        let pb: Vec<_> = b.history.iter().map(|r| r.params.clone()).collect();
        assert_eq!(pa, pb);
    }

    #[test]
    fn best_is_max_of_history_and_inside_space() {
        let space = SearchSpace::from_ranges(&[(-5, 5), (0, 3), (2, 9)]);
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let f = |p: &Point| ((p[0] * 7 + p[1] * 3 + p[2]) % 11) as f64;
        let out = bo_optimize(f, &space, &BoConfig::with_budget(40), &mut rng).unwrap();
        let max = out
            .history
            .iter()
            .map(|r| r.last_score().unwrap())
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(out.best.last_score(), Some(max));
        assert!(out.history.iter().all(|r| space.contains(&r.params)));
        let distinct: HashSet<_> = out.history.iter().map(|r| r.params.clone()).collect();
        assert_eq!(distinct.len(), out.history.len());
    }

    proptest::proptest! {
        #[test]
        fn ei_is_nonnegative(
            pts in proptest::collection::vec((0.0..1.0f64, -50.0..50.0f64), 1..10),
            q in 0.0..1.0f64,
            best in -60.0..60.0f64,
        ) {
            let xs: Vec<Vec<f64>> = pts.iter().map(|p| vec![p.0]).collect();
            let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
            let gp = GpSurrogate::fit(&xs, &ys, KernelParams::default()).unwrap();
            proptest::prop_assert!(expected_improvement(&gp, &[q], best) >= 0.0);
        }
    }

    #[test]
    fn empty_space_is_an_error() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = bo_optimize(|_| 0.0, &SearchSpace::new(), &BoConfig::default(), &mut rng).unwrap_err();
        assert_eq!(err, TuneError::EmptySpace);
    }
}
