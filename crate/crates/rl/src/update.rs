//! Policy-gradient losses with analytic gradients, and the VPG/PPO updates.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::agent::ActorCritic;
use crate::buffer::{compute_gae, normalize, RolloutBuffer};
use crate::optim::{clip_grad_norm, Optimizer};
use crate::RlError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Surrogate {
    /// `mean(log pi * A)`.
    Vanilla,
    /// `mean(min(rho * A, clip(rho, 1 - eps, 1 + eps) * A))`.
    Clipped { eps: f64 },
}

/// Everything a loss evaluation reads from a collected batch.
#[derive(Debug, Clone)]
pub struct Batch {
    pub obs: Vec<Vec<f64>>,
    pub z: Vec<Vec<f64>>,
    pub old_log_prob: Vec<f64>,
    pub advantages: Vec<f64>,
    pub returns: Vec<f64>,
}

impl Batch {
    /// Runs GAE on `buf`, optionally normalizing advantages over the batch.
    pub fn from_buffer(buf: &RolloutBuffer, gamma: f64, lambda: f64, normalize_advantages: bool) -> Self {
        let (adv, returns) = compute_gae(buf, gamma, lambda);
        Self {
            obs: buf.obs.clone(),
            z: buf.z.clone(),
            old_log_prob: buf.log_prob.clone(),
            advantages: if normalize_advantages { normalize(&adv) } else { adv },
            returns,
        }
    }

    pub fn len(&self) -> usize {
        self.returns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.returns.is_empty()
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct LossStats {
    pub policy_loss: f64,
    pub value_loss: f64,
    pub entropy: f64,
    pub mean_ratio: f64,
    pub clip_fraction: f64,
    pub approx_kl: f64,
    pub grad_norm: f64,
}

impl LossStats {
    pub fn total(&self, vf_coef: f64, ent_coef: f64) -> f64 {
        self.policy_loss + vf_coef * self.value_loss - ent_coef * self.entropy
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossWeights {
    pub vf_coef: f64,
    pub ent_coef: f64,
}

/// Loss `policy_loss + vf_coef * mean((V - R)^2) - ent_coef * entropy` over
/// the rows `idx`, and its gradient in the flat layout of `ac`.
pub fn loss_and_grad(
    ac: &ActorCritic,
    batch: &Batch,
    idx: &[usize],
    surrogate: Surrogate,
    w: LossWeights,
) -> Result<(LossStats, Vec<f64>), RlError> {
    let (ls_off, v_off) = ac.layout();
    let mut grad = vec![0.0; ac.num_params()];
    let n = idx.len().max(1) as f64;
    let mut st = LossStats::default();

    for &k in idx {
        let obs = &batch.obs[k];
        let adv = batch.advantages[k];

        let tr = ac.policy.forward_trace(obs)?;
        let mean = tr.output();
        let logp = ac.head.log_prob(mean, &batch.z[k]);
        let log_ratio = logp - batch.old_log_prob[k];
        let ratio = log_ratio.exp();
        // d(per-sample objective)/d(log pi)
        let (objective, d_obj) = match surrogate {
            Surrogate::Vanilla => (logp * adv, adv),
            Surrogate::Clipped { eps } => {
                let clipped = ratio.clamp(1.0 - eps, 1.0 + eps);
                if clipped != ratio {
                    st.clip_fraction += 1.0;
                }
                let unclipped_obj = ratio * adv;
                let clipped_obj = clipped * adv;
                if unclipped_obj <= clipped_obj {
                    (unclipped_obj, ratio * adv)
                } else {
                    (clipped_obj, 0.0)
                }
            }
        };
        st.policy_loss -= objective / n;
        st.mean_ratio += ratio / n;
        st.approx_kl += ((ratio - 1.0) - log_ratio) / n;

        if d_obj != 0.0 {
            let (d_mean, d_ls) = ac.head.log_prob_grad(mean, &batch.z[k]);
            let scale = -d_obj / n;
            let d_out: Vec<f64> = d_mean.iter().map(|g| g * scale).collect();
            ac.policy.backward(&tr, &d_out, &mut grad[..ls_off]);
            for (g, d) in grad[ls_off..v_off].iter_mut().zip(&d_ls) {
                *g += d * scale;
            }
        }

        let vt = ac.value.forward_trace(obs)?;
        let err = vt.output()[0] - batch.returns[k];
        st.value_loss += err * err / n;
        ac.value
            .backward(&vt, &[w.vf_coef * 2.0 * err / n], &mut grad[v_off..]);
    }
    if idx.is_empty() {
        st.mean_ratio = 1.0;
    } else {
        st.clip_fraction /= n;
    }

    st.entropy = ac.head.entropy();
    if w.ent_coef != 0.0 {
        for g in &mut grad[ls_off..v_off] {
            *g -= w.ent_coef;
        }
    }
    Ok((st, grad))
}

fn checked_step(
    ac: &mut ActorCritic,
    opt: &mut Optimizer,
    mut stats: LossStats,
    mut grad: Vec<f64>,
    max_grad_norm: f64,
    update: usize,
) -> Result<LossStats, RlError> {
    if !stats.policy_loss.is_finite() || !stats.value_loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
        return Err(RlError::Divergence {
            update,
            detail: format!(
                "policy loss {}, value loss {}, mean ratio {}",
                stats.policy_loss, stats.value_loss, stats.mean_ratio
            ),
        });
    }
    stats.grad_norm = clip_grad_norm(&mut grad, max_grad_norm);
    let mut flat = ac.to_flat();
    opt.step(&mut flat, &grad);
    ac.set_flat(&flat);
    Ok(stats)
}

/// One gradient step on the whole batch.
pub fn vpg_update(
    ac: &mut ActorCritic,
    opt: &mut Optimizer,
    batch: &Batch,
    weights: LossWeights,
    max_grad_norm: f64,
    update: usize,
) -> Result<LossStats, RlError> {
    let idx: Vec<usize> = (0..batch.len()).collect();
    let (stats, grad) = loss_and_grad(ac, batch, &idx, Surrogate::Vanilla, weights)?;
    checked_step(ac, opt, stats, grad, max_grad_norm, update)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpoSchedule {
    pub clip_eps: f64,
    pub epochs: usize,
    pub minibatch: usize,
}

/// `epochs` passes over shuffled minibatches of the clipped surrogate.
/// Returns the stats of the last minibatch of each epoch.
#[allow(clippy::too_many_arguments)]
pub fn ppo_update<R: Rng + ?Sized>(
    ac: &mut ActorCritic,
    opt: &mut Optimizer,
    batch: &Batch,
    schedule: PpoSchedule,
    weights: LossWeights,
    max_grad_norm: f64,
    update: usize,
    rng: &mut R,
) -> Result<Vec<LossStats>, RlError> {
    let mut idx: Vec<usize> = (0..batch.len()).collect();
    let mb = schedule.minibatch.clamp(1, batch.len().max(1));
    let mut out = Vec::with_capacity(schedule.epochs);
    for _ in 0..schedule.epochs {
        idx.shuffle(rng);
        let mut last = LossStats::default();
        for chunk in idx.chunks(mb) {
            let (stats, grad) = loss_and_grad(
                ac,
                batch,
                chunk,
                Surrogate::Clipped {
                    eps: schedule.clip_eps,
                },
                weights,
            )?;
            last = checked_step(ac, opt, stats, grad, max_grad_norm, update)?;
        }
        out.push(last);
    }
    Ok(out)
}
