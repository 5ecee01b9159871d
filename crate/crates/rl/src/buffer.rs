//! On-policy rollout storage and generalized advantage estimation.

/// Steps in collection order. Episodes and fragments are contiguous; a
/// segment ends either at a terminal step (`done`) or at a step carrying a
/// bootstrap value for the state that follows it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RolloutBuffer {
    pub obs: Vec<Vec<f64>>,
    /// Pre-squash action samples.
    pub z: Vec<Vec<f64>>,
    pub log_prob: Vec<f64>,
    pub reward: Vec<f64>,
    pub value: Vec<f64>,
    pub done: Vec<bool>,
    /// `Some(V(s_{t+1}))` where a segment is cut before its episode ends.
    pub bootstrap: Vec<Option<f64>>,
}

impl RolloutBuffer {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.reward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reward.is_empty()
    }

    pub fn push(&mut self, obs: Vec<f64>, z: Vec<f64>, log_prob: f64, reward: f64, value: f64, done: bool) {
        self.obs.push(obs);
        self.z.push(z);
        self.log_prob.push(log_prob);
        self.reward.push(reward);
        self.value.push(value);
        self.done.push(done);
        self.bootstrap.push(None);
    }

    /// Ends the current segment mid-episode with the value of the next state.
    pub fn cut(&mut self, next_value: f64) {
        if let Some(last) = self.bootstrap.last_mut() {
            if !self.done.last().copied().unwrap_or(true) {
                *last = Some(next_value);
            }
        }
    }

    pub fn clear(&mut self) {
        *self = Self::default();
    }

    pub fn lengths_consistent(&self) -> bool {
        let n = self.len();
        [
            self.obs.len(),
            self.z.len(),
            self.log_prob.len(),
            self.value.len(),
            self.done.len(),
            self.bootstrap.len(),
        ]
        .iter()
        .all(|&l| l == n)
    }

    /// Undiscounted reward sums of the completed episodes, in order.
    pub fn episode_returns(&self) -> Vec<f64> {
        let mut out = Vec::new();
        let mut acc = 0.0;
        for (r, &d) in self.reward.iter().zip(&self.done) {
            acc += r;
            if d {
                out.push(acc);
                acc = 0.0;
            }
        }
        out
    }
}

/// Advantages and value targets:
/// `delta_t = r_t + gamma * V(s_{t+1}) * (1 - done_t) - V(s_t)`,
/// `A_t = sum_k (gamma * lambda)^k delta_{t+k}` within a segment, and
/// `returns = A + V`. A final step that is neither terminal nor cut
/// bootstraps with 0.
pub fn compute_gae(buf: &RolloutBuffer, gamma: f64, lambda: f64) -> (Vec<f64>, Vec<f64>) {
    let n = buf.len();
    let mut adv = vec![0.0; n];
    let mut carry = 0.0;
    for t in (0..n).rev() {
        let (next_value, continues) = if buf.done[t] {
            (0.0, false)
        } else if let Some(v) = buf.bootstrap[t] {
            (v, false)
        } else if t + 1 < n {
            (buf.value[t + 1], true)
        } else {
            (0.0, false)
        };
        let delta = buf.reward[t] + gamma * next_value - buf.value[t];
        carry = delta + if continues { gamma * lambda * carry } else { 0.0 };
        adv[t] = carry;
    }
    let returns = adv.iter().zip(&buf.value).map(|(a, v)| a + v).collect();
    (adv, returns)
}

/// Shifts to zero mean and scales to unit population std. A batch with
/// (numerically) zero spread maps to all zeros.
pub fn normalize(xs: &[f64]) -> Vec<f64> {
    let n = xs.len().max(1) as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let std = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt();
    if std < 1e-8 {
        return vec![0.0; xs.len()];
    }
    xs.iter().map(|x| (x - mean) / std).collect()
}
