//! Gaussian-process regression with an isotropic RBF kernel.
//!
//! Inputs are expected on the unit cube (see [`crate::SearchSpace::normalize`]).
//! Targets are standardized internally; kernel hyperparameters are chosen by
//! coordinate search on the log marginal likelihood.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams {
    pub lengthscale: f64,
    /// Signal variance in standardized target units.
    pub signal_var: f64,
    /// Noise variance in standardized target units.
    pub noise_var: f64,
}

impl Default for KernelParams {
    fn default() -> Self {
        Self {
            lengthscale: 0.3,
            signal_var: 1.0,
            noise_var: 1e-2,
        }
    }
}

// Search box for log-hyperparameters.
const LOG_LENGTHSCALE: (f64, f64) = (-4.0, 1.6);
const LOG_SIGNAL: (f64, f64) = (-3.0, 3.0);
const LOG_NOISE: (f64, f64) = (-13.8, 0.0);

#[derive(Debug, Clone)]
pub struct GpSurrogate {
    pub kernel: KernelParams,
    x: Vec<Vec<f64>>,
    y_mean: f64,
    y_scale: f64,
    chol: Cholesky<f64, Dyn>,
    alpha: DVector<f64>,
    y_std: DVector<f64>,
}

impl GpSurrogate {
    /// Fits with hyperparameters chosen by log-marginal-likelihood search,
    /// starting from `start`.
    pub fn fit(x: &[Vec<f64>], y: &[f64], start: KernelParams) -> Option<Self> {
        let mut best = Self::fit_with(x, y, start)?;
        let mut best_lml = best.log_marginal_likelihood();
        let mut logs = [
            start.lengthscale.ln(),
            start.signal_var.ln(),
            start.noise_var.ln(),
        ];
        let boxes = [LOG_LENGTHSCALE, LOG_SIGNAL, LOG_NOISE];
        let mut step = 1.0;
        while step > 0.05 {
            let mut improved = false;
            for k in 0..3 {
                for dir in [-1.0, 1.0] {
                    let mut trial = logs;
                    trial[k] = (trial[k] + dir * step).clamp(boxes[k].0, boxes[k].1);
                    if trial[k] == logs[k] {
                        continue;
                    }
                    let params = KernelParams {
                        lengthscale: trial[0].exp(),
                        signal_var: trial[1].exp(),
                        noise_var: trial[2].exp(),
                    };
                    if let Some(gp) = Self::fit_with(x, y, params) {
                        let lml = gp.log_marginal_likelihood();
                        if lml > best_lml + 1e-9 {
                            best = gp;
                            best_lml = lml;
                            logs = trial;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                step /= 2.0;
            }
        }
        Some(best)
    }

    /// Fits with fixed hyperparameters. Returns `None` if the kernel matrix
    /// is not numerically positive definite or there is no data.
    pub fn fit_with(x: &[Vec<f64>], y: &[f64], kernel: KernelParams) -> Option<Self> {
        let n = x.len();
        if n == 0 || y.len() != n {
            return None;
        }
        let y_mean = y.iter().sum::<f64>() / n as f64;
        let var = y.iter().map(|v| (v - y_mean).powi(2)).sum::<f64>() / n as f64;
        let y_scale = if var > 1e-24 { var.sqrt() } else { 1.0 };
        let y_std = DVector::from_iterator(n, y.iter().map(|v| (v - y_mean) / y_scale));

        let mut k = DMatrix::from_fn(n, n, |i, j| rbf(&x[i], &x[j], &kernel));
        for i in 0..n {
            k[(i, i)] += kernel.noise_var + 1e-10;
        }
        let chol = Cholesky::new(k)?;
        let alpha = chol.solve(&y_std);
        Some(Self {
            kernel,
            x: x.to_vec(),
            y_mean,
            y_scale,
            chol,
            alpha,
            y_std,
        })
    }

    /// Log marginal likelihood of the standardized targets.
    pub fn log_marginal_likelihood(&self) -> f64 {
        let n = self.x.len() as f64;
        let fit = -0.5 * self.y_std.dot(&self.alpha);
        let log_det: f64 = self.chol.l_dirty().diagonal().iter().map(|d| d.ln()).sum();
        fit - log_det - 0.5 * n * (2.0 * std::f64::consts::PI).ln()
    }

    /// Posterior mean and variance of the latent function, in target units.
    pub fn predict(&self, q: &[f64]) -> (f64, f64) {
        let n = self.x.len();
        let ks = DVector::from_iterator(n, self.x.iter().map(|xi| rbf(xi, q, &self.kernel)));
        let mean = ks.dot(&self.alpha);
        let v = self
            .chol
            .l_dirty()
            .solve_lower_triangular(&ks)
            .expect("Cholesky factor has a positive diagonal");
        let var = (self.kernel.signal_var - v.dot(&v)).max(0.0);
        (
            self.y_mean + self.y_scale * mean,
            var * self.y_scale * self.y_scale,
        )
    }

    /// Noise standard deviation in target units.
    pub fn noise_std(&self) -> f64 {
        self.kernel.noise_var.sqrt() * self.y_scale
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}

fn rbf(a: &[f64], b: &[f64], k: &KernelParams) -> f64 {
    let d2: f64 = a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum();
    k.signal_var * (-0.5 * d2 / (k.lengthscale * k.lengthscale)).exp()
}
