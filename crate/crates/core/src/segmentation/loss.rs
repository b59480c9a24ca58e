use serde::{Deserialize, Serialize};

use super::{InstanceMap, VoteField};
use crate::geometry::{OrganizedCloud, Point3};
use crate::pose_codec::PROB_EPS;
use crate::{Error, Result};

pub const HUBER_DELTA: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossWeights {
    pub lambda_fg: f64,
    pub lambda_co: f64,
}

impl Default for LossWeights {
    fn default() -> Self {
        Self {
            lambda_fg: 1.0,
            lambda_co: 1.0,
        }
    }
}

/// Smooth-L1 on a residual norm: quadratic below `delta`, linear above,
/// with matching value and slope at the branch point.
pub fn huber(r: f64, delta: f64) -> f64 {
    if r <= delta {
        0.5 * r * r / delta
    } else {
        r - 0.5 * delta
    }
}

/// Class-balanced binary cross-entropy. Each pixel is weighted by the
/// inverse size of its class, normalized so the weights sum to 1.
pub fn foreground_loss(pred_probs: &[f64], gt: &[bool]) -> Result<f64> {
    if pred_probs.len() != gt.len() {
        return Err(Error::Data(format!(
            "{} probabilities for {} labels",
            pred_probs.len(),
            gt.len()
        )));
    }
    if gt.is_empty() {
        return Err(Error::Data("empty image".into()));
    }
    let n_fg = gt.iter().filter(|g| **g).count();
    let n_bg = gt.len() - n_fg;
    let classes = (n_fg > 0) as usize + (n_bg > 0) as usize;
    let w_fg = if n_fg > 0 { 1.0 / (classes * n_fg) as f64 } else { 0.0 };
    let w_bg = if n_bg > 0 { 1.0 / (classes * n_bg) as f64 } else { 0.0 };
    Ok(pred_probs
        .iter()
        .zip(gt)
        .map(|(&p, &g)| {
            let p = p.clamp(PROB_EPS, 1.0 - PROB_EPS);
            if g {
                -w_fg * p.ln()
            } else {
                -w_bg * (1.0 - p).ln()
            }
        })
        .sum())
}

/// Instance-balanced Huber loss on `‖D_i + V′_i − c_i‖` over foreground
/// pixels. `centers[k]` is the center of instance `k + 1`.
pub fn center_offset_loss(
    cloud: &OrganizedCloud,
    votes: &VoteField,
    gt: &InstanceMap,
    centers: &[Point3],
    delta: f64,
) -> Result<f64> {
    let n = gt.labels.len();
    if cloud.grid.len() != n || votes.offsets.len() != n {
        return Err(Error::Data("cloud, votes and labels differ in size".into()));
    }
    let counts = gt.pixel_counts();
    let present = counts.iter().filter(|c| **c > 0).count();
    if present == 0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (i, &label) in gt.labels.iter().enumerate() {
        if label == 0 {
            continue;
        }
        let k = label as usize - 1;
        let c = centers
            .get(k)
            .ok_or_else(|| Error::Data(format!("instance {label} has no center")))?;
        let d = cloud.grid[i].ok_or_else(|| Error::Data(format!("foreground pixel {i} has no depth")))?;
        let r = (d + votes.offsets[i] - c).norm();
        total += huber(r, delta) / (present * counts[k]) as f64;
    }
    Ok(total)
}

pub fn nonpre_loss(l_fg: f64, l_co: f64, w: &LossWeights) -> Result<f64> {
    for (name, v) in [
        ("l_fg", l_fg),
        ("l_co", l_co),
        ("lambda_fg", w.lambda_fg),
        ("lambda_co", w.lambda_co),
    ] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Data(format!("{name} = {v} must be finite and non-negative")));
        }
    }
    Ok(w.lambda_fg * l_fg + w.lambda_co * l_co)
}
