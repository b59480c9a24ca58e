//! Reference calculators for the prehensile-branch training losses.

use serde::{Deserialize, Serialize};

use super::bins::EncodedParam;
use crate::{Error, Result};

/// Probabilities are clamped to `[PROB_EPS, 1 - PROB_EPS]` before logs.
pub const PROB_EPS: f64 = 1e-7;

/// Network output for one parameter: per-bin logits and per-bin residuals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedParam {
    pub bin_logits: Vec<f64>,
    pub residuals: Vec<f64>,
}

impl PredictedParam {
    pub fn bin_count(&self) -> usize {
        self.bin_logits.len()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FocalParams {
    pub alpha: f64,
    pub gamma: f64,
}

impl Default for FocalParams {
    fn default() -> Self {
        Self {
            alpha: 0.25,
            gamma: 2.0,
        }
    }
}

/// Cross-entropy of the softmaxed logits against the target bin plus the
/// squared error of the residual predicted at the target bin.
pub fn bin_loss(pred: &PredictedParam, target: &EncodedParam) -> Result<f64> {
    let m = pred.bin_logits.len();
    if m == 0 || pred.residuals.len() != m {
        return Err(Error::Data(format!(
            "prediction has {} logits and {} residuals",
            m,
            pred.residuals.len()
        )));
    }
    let k = target.bin_index as usize;
    if k >= m {
        return Err(Error::Data(format!("target bin {k} outside {m} predicted bins")));
    }
    let max = pred.bin_logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let log_sum = max + pred.bin_logits.iter().map(|l| (l - max).exp()).sum::<f64>().ln();
    let ce = log_sum - pred.bin_logits[k];
    let reg = (pred.residuals[k] - target.residual).powi(2);
    Ok(ce + reg)
}

pub fn focal_loss(pred_prob: f64, label: bool, params: FocalParams) -> f64 {
    let p = pred_prob.clamp(PROB_EPS, 1.0 - PROB_EPS);
    let pt = if label { p } else { 1.0 - p };
    -params.alpha * (1.0 - pt).powf(params.gamma) * pt.ln()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointPrediction {
    /// Predicted probability that the point is a positive proposal.
    pub point_prob: f64,
    pub score: f64,
    pub params: Vec<PredictedParam>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointTarget {
    /// Encoded parameters for positive points, `None` for negatives.
    pub params: Option<Vec<EncodedParam>>,
    pub score: f64,
}

/// Term-by-term breakdown of a branch loss.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BranchLoss {
    /// Bin classification + residual regression averaged over positives.
    pub regression: f64,
    /// Mean focal loss of the point classification.
    pub focal: f64,
    /// Mean squared error of the predicted scores.
    pub score: f64,
    pub total: f64,
    pub positives: usize,
    /// Set when no positive point existed; `regression` is then 0.
    pub no_positives: bool,
}

fn branch_loss(
    preds: &[PointPrediction],
    targets: &[PointTarget],
    params_per_point: usize,
    focal: FocalParams,
) -> Result<BranchLoss> {
    if preds.len() != targets.len() {
        return Err(Error::Data(format!(
            "{} predictions for {} targets",
            preds.len(),
            targets.len()
        )));
    }
    if preds.is_empty() {
        return Err(Error::Data("no points".into()));
    }
    let mut reg_sum = 0.0;
    let mut positives = 0usize;
    let mut focal_sum = 0.0;
    let mut score_sum = 0.0;
    for (i, (p, t)) in preds.iter().zip(targets).enumerate() {
        if let Some(enc) = &t.params {
            if enc.len() != params_per_point || p.params.len() != params_per_point {
                return Err(Error::Data(format!(
                    "point {i}: expected {params_per_point} parameters, got {} predicted / {} target",
                    p.params.len(),
                    enc.len()
                )));
            }
            for (pp, e) in p.params.iter().zip(enc) {
                reg_sum += bin_loss(pp, e)?;
            }
            positives += 1;
        }
        focal_sum += focal_loss(p.point_prob, t.params.is_some(), focal);
        score_sum += (p.score - t.score).powi(2);
    }
    let n = preds.len() as f64;
    let regression = if positives > 0 {
        reg_sum / positives as f64
    } else {
        0.0
    };
    let focal = focal_sum / n;
    let score = score_sum / n;
    Ok(BranchLoss {
        regression,
        focal,
        score,
        total: regression + focal + score,
        positives,
        no_positives: positives == 0,
    })
}

/// Grasp-branch loss over `(x, y, z, w, θ1, θ2, θ3)`.
pub fn grasp_loss(preds: &[PointPrediction], targets: &[PointTarget], focal: FocalParams) -> Result<BranchLoss> {
    branch_loss(preds, targets, 7, focal)
}

/// Suction-branch loss; the regression sum runs over `θ1, θ2, θ3` only.
pub fn suction_loss(preds: &[PointPrediction], targets: &[PointTarget], focal: FocalParams) -> Result<BranchLoss> {
    branch_loss(preds, targets, 3, focal)
}

pub fn prehensile_loss(grasp_loss_val: f64, suction_loss_val: f64) -> Result<f64> {
    for v in [grasp_loss_val, suction_loss_val] {
        if !v.is_finite() || v < 0.0 {
            return Err(Error::Data(format!("branch loss {v} must be finite and non-negative")));
        }
    }
    Ok(grasp_loss_val + suction_loss_val)
}
