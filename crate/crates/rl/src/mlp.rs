//! Fully connected network with tanh hidden layers and a linear output.
//!
//! All parameters live in one flat vector. Layer `l` stores its weights as a
//! row-major `out x in` block followed by `out` biases.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::RlError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Mlp {
    sizes: Vec<usize>,
    params: Vec<f64>,
}

/// Layer inputs recorded by [`Mlp::forward_trace`]; `acts[0]` is the network
/// input and the last entry is the output.
#[derive(Debug, Clone)]
pub struct Trace {
    pub acts: Vec<Vec<f64>>,
}

impl Trace {
    pub fn output(&self) -> &[f64] {
        self.acts.last().expect("trace holds at least the input")
    }
}

fn param_count(sizes: &[usize]) -> usize {
    sizes.windows(2).map(|w| w[1] * w[0] + w[1]).sum()
}

impl Mlp {
    /// Glorot-uniform weights, zero biases.
    pub fn new<R: Rng + ?Sized>(sizes: &[usize], rng: &mut R) -> Self {
        assert!(sizes.len() >= 2, "an MLP needs input and output sizes");
        let mut params = Vec::with_capacity(param_count(sizes));
        for w in sizes.windows(2) {
            let (fan_in, fan_out) = (w[0], w[1]);
            let limit = (6.0 / (fan_in + fan_out).max(1) as f64).sqrt();
            params.extend((0..fan_in * fan_out).map(|_| rng.gen_range(-limit..=limit)));
            params.extend(std::iter::repeat_n(0.0, fan_out));
        }
        Self {
            sizes: sizes.to_vec(),
            params,
        }
    }

    pub fn from_parts(sizes: &[usize], params: Vec<f64>) -> Result<Self, RlError> {
        if sizes.len() < 2 || params.len() != param_count(sizes) {
            return Err(RlError::Shape {
                what: "mlp parameters",
                expected: param_count(sizes),
                got: params.len(),
            });
        }
        Ok(Self {
            sizes: sizes.to_vec(),
            params,
        })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn input_dim(&self) -> usize {
        self.sizes[0]
    }

    pub fn output_dim(&self) -> usize {
        *self.sizes.last().expect("sizes nonempty")
    }

    pub fn num_layers(&self) -> usize {
        self.sizes.len() - 1
    }

    pub fn params(&self) -> &[f64] {
        &self.params
    }

    pub fn params_mut(&mut self) -> &mut [f64] {
        &mut self.params
    }

    /// Multiplies the output layer's weights and biases by `factor`.
    pub fn scale_output_layer(&mut self, factor: f64) {
        let l = self.num_layers() - 1;
        let start = self.offset(l);
        for p in &mut self.params[start..] {
            *p *= factor;
        }
    }

    /// Start of layer `l`'s weight block.
    fn offset(&self, l: usize) -> usize {
        param_count(&self.sizes[..=l])
    }

    fn check_input(&self, x: &[f64]) -> Result<(), RlError> {
        if x.len() != self.input_dim() {
            return Err(RlError::Shape {
                what: "mlp input",
                expected: self.input_dim(),
                got: x.len(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>, RlError> {
        Ok(self.forward_trace(x)?.acts.pop().expect("output present"))
    }

    pub fn forward_trace(&self, x: &[f64]) -> Result<Trace, RlError> {
        self.check_input(x)?;
        let mut acts = Vec::with_capacity(self.sizes.len());
        acts.push(x.to_vec());
        for l in 0..self.num_layers() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let w = &self.params[self.offset(l)..self.offset(l) + n_in * n_out];
            let b = &self.params[self.offset(l) + n_in * n_out..self.offset(l + 1)];
            let input = &acts[l];
            let hidden = l + 1 < self.num_layers();
            let out: Vec<f64> = (0..n_out)
                .map(|o| {
                    let row = &w[o * n_in..(o + 1) * n_in];
                    let pre = b[o] + row.iter().zip(input).map(|(a, b)| a * b).sum::<f64>();
                    if hidden {
                        pre.tanh()
                    } else {
                        pre
                    }
                })
                .collect();
            acts.push(out);
        }
        Ok(Trace { acts })
    }

    /// Reverse pass for one sample. Adds `dL/dparams` into `grad` and
    /// returns `dL/dinput`, given `d_out = dL/doutput`.
    pub fn backward(&self, trace: &Trace, d_out: &[f64], grad: &mut [f64]) -> Vec<f64> {
        debug_assert_eq!(grad.len(), self.params.len());
        debug_assert_eq!(d_out.len(), self.output_dim());
        let mut delta = d_out.to_vec();
        for l in (0..self.num_layers()).rev() {
            let (n_in, n_out) = (self.sizes[l], self.sizes[l + 1]);
            let w_off = self.offset(l);
            let b_off = w_off + n_in * n_out;
            let x = &trace.acts[l];
            let mut dx = vec![0.0; n_in];
            for (o, &d) in delta.iter().enumerate() {
                if d == 0.0 {
                    continue;
                }
                grad[b_off + o] += d;
                let row = w_off + o * n_in;
                for i in 0..n_in {
                    grad[row + i] += d * x[i];
                    dx[i] += self.params[row + i] * d;
                }
            }
            if l > 0 {
                // x = tanh(pre) for every hidden layer.
                for (g, &xi) in dx.iter_mut().zip(x) {
                    *g *= 1.0 - xi * xi;
                }
            }
            delta = dx;
        }
        delta
    }
}
