use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::TuneError;

/// A point in a [`SearchSpace`]: integer coordinates, categorical dimensions
/// encoded by choice index.
pub type Point = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Dimension {
    /// Inclusive integer range.
    Int { lo: i64, hi: i64 },
    /// Finite set of labelled choices; coordinates are indices into `choices`.
    Categorical { choices: Vec<String> },
}

impl Dimension {
    pub fn lo(&self) -> i64 {
        match self {
            Dimension::Int { lo, .. } => *lo,
            Dimension::Categorical { .. } => 0,
        }
    }

    pub fn hi(&self) -> i64 {
        match self {
            Dimension::Int { hi, .. } => *hi,
            Dimension::Categorical { choices } => choices.len() as i64 - 1,
        }
    }

    pub fn size(&self) -> u64 {
        (self.hi() - self.lo() + 1).max(0) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchSpace {
    pub dims: Vec<(String, Dimension)>,
}

impl SearchSpace {
    pub fn new() -> Self {
        Self { dims: Vec::new() }
    }

    pub fn int(mut self, name: impl Into<String>, lo: i64, hi: i64) -> Self {
        self.dims.push((name.into(), Dimension::Int { lo, hi }));
        self
    }

    pub fn categorical<S: Into<String>>(mut self, name: impl Into<String>, choices: impl IntoIterator<Item = S>) -> Self {
        let choices = choices.into_iter().map(Into::into).collect();
        self.dims.push((name.into(), Dimension::Categorical { choices }));
        self
    }

    /// Integer box from `(lo, hi)` pairs, dimensions named `x0, x1, ..`.
    pub fn from_ranges(ranges: &[(i64, i64)]) -> Self {
        ranges
            .iter()
            .enumerate()
            .fold(Self::new(), |s, (k, &(lo, hi))| s.int(format!("x{k}"), lo, hi))
    }

    pub fn len(&self) -> usize {
        self.dims.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dims.is_empty()
    }

    pub fn validate(&self) -> Result<(), TuneError> {
        if self.dims.is_empty() {
            return Err(TuneError::EmptySpace);
        }
        for (name, d) in &self.dims {
            if d.size() == 0 {
                return Err(TuneError::EmptyDimension(name.clone()));
            }
        }
        Ok(())
    }

    /// Number of lattice points (saturating).
    pub fn cardinality(&self) -> u64 {
        self.dims
            .iter()
            .fold(1u64, |acc, (_, d)| acc.saturating_mul(d.size()))
    }

    pub fn contains(&self, p: &[i64]) -> bool {
        p.len() == self.dims.len()
            && p.iter()
                .zip(&self.dims)
                .all(|(&x, (_, d))| (d.lo()..=d.hi()).contains(&x))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Point {
        self.dims
            .iter()
            .map(|(_, d)| rng.gen_range(d.lo()..=d.hi()))
            .collect()
    }

    /// Coordinates rescaled to `[0, 1]`; singleton dimensions map to 0.
    pub fn normalize(&self, p: &[i64]) -> Vec<f64> {
        p.iter()
            .zip(&self.dims)
            .map(|(&x, (_, d))| {
                let span = (d.hi() - d.lo()) as f64;
                if span > 0.0 {
                    (x - d.lo()) as f64 / span
                } else {
                    0.0
                }
            })
            .collect()
    }

    /// Inverse of [`SearchSpace::normalize`], rounding to the lattice.
    pub fn denormalize(&self, u: &[f64]) -> Point {
        u.iter()
            .zip(&self.dims)
            .map(|(&v, (_, d))| {
                let x = d.lo() as f64 + v.clamp(0.0, 1.0) * (d.hi() - d.lo()) as f64;
                (x.round() as i64).clamp(d.lo(), d.hi())
            })
            .collect()
    }

    /// Every lattice point, first dimension varying slowest.
    pub fn grid(&self) -> Vec<Point> {
        let mut out: Vec<Point> = vec![Vec::new()];
        for (_, d) in &self.dims {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    (d.lo()..=d.hi()).map(move |x| {
                        let mut p = prefix.clone();
                        p.push(x);
                        p
                    })
                })
                .collect();
        }
        out
    }

    /// Human-readable `name=value` rendering; categorical values by label.
    pub fn describe(&self, p: &[i64]) -> String {
        p.iter()
            .zip(&self.dims)
            .map(|(&x, (name, d))| match d {
                Dimension::Int { .. } => format!("{name}={x}"),
                Dimension::Categorical { choices } => format!("{name}={}", choices[x as usize]),
            })
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl Default for SearchSpace {
    fn default() -> Self {
        Self::new()
    }
}
