//! Diagonal Gaussian over pre-squash values `z`, mapped onto `[0, upper]`
//! by `a = upper * sigmoid(z)`.
//!
//! Log-probabilities are densities of the squashed action `a`, i.e. the
//! Gaussian log-density of `z` minus `log |da/dz|`. Dimensions with
//! `upper == 0` are degenerate (the action is always 0) and contribute only
//! the Gaussian term, which cancels in probability ratios.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

const LN_2PI: f64 = 1.837_877_066_409_345_5;

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `log sigmoid(z)` without overflow.
fn log_sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        -(-z).exp().ln_1p()
    } else {
        z - z.exp().ln_1p()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianHead {
    pub log_std: Vec<f64>,
    pub upper: Vec<f64>,
}

/// A sampled action with everything an update needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    pub z: Vec<f64>,
    pub action: Vec<f64>,
    pub log_prob: f64,
}

impl GaussianHead {
    /// Unit pre-squash standard deviation in every dimension.
    pub fn new(upper: Vec<f64>) -> Self {
        Self {
            log_std: vec![0.0; upper.len()],
            upper,
        }
    }

    pub fn dim(&self) -> usize {
        self.upper.len()
    }

    pub fn squash(&self, z: &[f64]) -> Vec<f64> {
        z.iter().zip(&self.upper).map(|(&z, &u)| u * sigmoid(z)).collect()
    }

    /// Deterministic action: the squashed mean.
    pub fn greedy(&self, mean: &[f64]) -> Vec<f64> {
        self.squash(mean)
    }

    pub fn sample<R: Rng + ?Sized>(&self, mean: &[f64], rng: &mut R) -> Sample {
        let z: Vec<f64> = mean
            .iter()
            .zip(&self.log_std)
            .map(|(&m, &ls)| {
                let eps: f64 = rng.sample(StandardNormal);
                m + ls.exp() * eps
            })
            .collect();
        let log_prob = self.log_prob(mean, &z);
        Sample {
            action: self.squash(&z),
            z,
            log_prob,
        }
    }

    /// Log-density of the squashed action produced by pre-squash `z`.
    pub fn log_prob(&self, mean: &[f64], z: &[f64]) -> f64 {
        let mut lp = 0.0;
        for d in 0..self.dim() {
            let std = self.log_std[d].exp();
            let u = (z[d] - mean[d]) / std;
            lp += -0.5 * u * u - self.log_std[d] - 0.5 * LN_2PI;
            if self.upper[d] > 0.0 {
                // log(da/dz) = log upper + log sigmoid(z) + log sigmoid(-z)
                lp -= self.upper[d].ln() + log_sigmoid(z[d]) + log_sigmoid(-z[d]);
            }
        }
        lp
    }

    /// Log-density at action `a` strictly inside `(0, upper)`.
    pub fn log_prob_action(&self, mean: &[f64], action: &[f64]) -> f64 {
        let z: Vec<f64> = action
            .iter()
            .zip(&self.upper)
            .map(|(&a, &u)| {
                let p = a / u;
                (p / (1.0 - p)).ln()
            })
            .collect();
        self.log_prob(mean, &z)
    }

    /// Gradients of [`GaussianHead::log_prob`] with respect to the mean and
    /// the log-std, per dimension.
    pub fn log_prob_grad(&self, mean: &[f64], z: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut d_mean = Vec::with_capacity(self.dim());
        let mut d_log_std = Vec::with_capacity(self.dim());
        for d in 0..self.dim() {
            let var = (2.0 * self.log_std[d]).exp();
            let diff = z[d] - mean[d];
            d_mean.push(diff / var);
            d_log_std.push(diff * diff / var - 1.0);
        }
        (d_mean, d_log_std)
    }

    /// Entropy of the pre-squash Gaussian.
    pub fn entropy(&self) -> f64 {
        self.log_std.iter().map(|ls| ls + 0.5 * (LN_2PI + 1.0)).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn greedy_at_zero_mean_is_midpoint() {
        let h = GaussianHead::new(vec![10.0]);
        assert_eq!(h.greedy(&[0.0]), vec![5.0]);
    }

    #[test]
    fn zero_upper_always_zero() {
        let h = GaussianHead::new(vec![0.0, 4.0]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..100 {
            let s = h.sample(&[3.0, -1.0], &mut rng);
            assert_eq!(s.action[0], 0.0);
            assert!(s.log_prob.is_finite());
        }
    }

    #[test]
    fn density_integrates_to_one() {
        // Uniform importance sampling over (0, upper): E[upper * p(a)] = 1.
        let h = GaussianHead {
            log_std: vec![-0.3],
            upper: vec![7.0],
        };
        let mean = [0.4];
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 1_000_000;
        let mut acc = 0.0;
        for _ in 0..n {
            let a: f64 = rng.gen_range(0.0..7.0);
            if a > 0.0 {
                acc += 7.0 * h.log_prob_action(&mean, &[a]).exp();
            }
        }
        let integral = acc / n as f64;
        assert!((integral - 1.0).abs() < 0.02, "integral {integral}");
    }

    #[test]
    fn log_prob_gradient_matches_differences() {
        let h = GaussianHead {
            log_std: vec![0.2, -0.5],
            upper: vec![3.0, 8.0],
        };
        let mean = [0.3, -1.1];
        let z = [1.0, -0.4];
        let (dm, ds) = h.log_prob_grad(&mean, &z);
        let e = 1e-6;
        for d in 0..2 {
            let mut mp = mean;
            mp[d] += e;
            let mut mm = mean;
            mm[d] -= e;
            let fd = (h.log_prob(&mp, &z) - h.log_prob(&mm, &z)) / (2.0 * e);
            assert!((fd - dm[d]).abs() < 1e-6);
            let mut hp = h.clone();
            hp.log_std[d] += e;
            let mut hm = h.clone();
            hm.log_std[d] -= e;
            let fd = (hp.log_prob(&mean, &z) - hm.log_prob(&mean, &z)) / (2.0 * e);
            assert!((fd - ds[d]).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn samples_stay_in_bounds(
            mean in prop::collection::vec(-30.0..30.0f64, 1..5),
            log_std in -3.0..2.0f64,
            upper in 0.0..50.0f64,
            seed in any::<u64>(),
        ) {
            let h = GaussianHead {
                log_std: vec![log_std; mean.len()],
                upper: vec![upper; mean.len()],
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = h.sample(&mean, &mut rng);
            prop_assert!(s.action.iter().all(|&a| (0.0..=upper).contains(&a)));
            prop_assert!(s.log_prob.is_finite());
        }
    }
}
