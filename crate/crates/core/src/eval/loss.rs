use crate::data::{BinaryMask, ProbabilityMap};
use crate::error::{Error, Result};

/// Focal-dice loss weights.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossParams {
    pub alpha: f64,
    pub gamma: f64,
    pub beta: f64,
    /// Probabilities are clipped to `[eps, 1 - eps]` before taking logs.
    pub eps: f64,
}

impl Default for LossParams {
    fn default() -> Self {
        LossParams {
            alpha: 0.5,
            gamma: 3.33,
            beta: 1.0,
            eps: 1e-7,
        }
    }
}

impl LossParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "alpha {} outside (0, 1)",
                self.alpha
            )));
        }
        if !(self.gamma > 0.0 && self.beta > 0.0) {
            return Err(Error::InvalidParameter(
                "gamma and beta must be positive".into(),
            ));
        }
        if !(self.eps > 0.0 && self.eps < 0.5) {
            return Err(Error::InvalidParameter(format!(
                "eps {} outside (0, 0.5)",
                self.eps
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossValue {
    /// Mean binary focal loss.
    pub focal: f64,
    /// Soft dice loss, `1 - F_beta`.
    pub dice: f64,
    pub total: f64,
}

/// Binary focal loss plus soft dice loss of `pred` against `gt`.
///
/// The dice term uses soft counts (`tp = Σ g·p`, `fp = Σ (1-g)·p`, `fn = Σ g·(1-p)`). When
/// the ground truth is empty and no prediction exceeds `eps`, precision and recall are
/// both taken as 1.
pub fn focal_dice_loss(
    gt: &BinaryMask,
    pred: &ProbabilityMap,
    params: &LossParams,
) -> Result<LossValue> {
    if gt.width() != pred.width() || gt.height() != pred.height() {
        return Err(Error::DimensionMismatch(format!(
            "ground truth is {}x{}, prediction is {}x{}",
            gt.width(),
            gt.height(),
            pred.width(),
            pred.height()
        )));
    }
    let n = gt.data().len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty raster".into()));
    }
    let LossParams {
        alpha,
        gamma,
        beta,
        eps,
    } = *params;

    let mut focal_sum = 0.0;
    let (mut tp, mut fp, mut fn_) = (0.0, 0.0, 0.0);
    let mut gt_empty = true;
    let mut pred_empty = true;
    for (&g, &p) in gt.data().iter().zip(pred.data()) {
        let raw = p;
        let clipped = raw.clamp(eps, 1.0 - eps);
        pred_empty &= p <= eps;
        if g != 0 {
            gt_empty = false;
            focal_sum -= alpha * (1.0 - clipped).powf(gamma) * clipped.ln();
            tp += raw;
            fn_ += 1.0 - raw;
        } else {
            focal_sum -= alpha * clipped.powf(gamma) * (1.0 - clipped).ln();
            fp += raw;
        }
    }
    let focal = focal_sum / n as f64;

    let (precision, recall) = if gt_empty && pred_empty {
        (1.0, 1.0)
    } else {
        let div = |a: f64, b: f64| if b > 0.0 { a / b } else { 0.0 };
        (div(tp, tp + fp), div(tp, tp + fn_))
    };
    let b2 = beta * beta;
    let denom = b2 * precision + recall;
    let dice = if denom > 0.0 {
        1.0 - (1.0 + b2) * precision * recall / denom
    } else {
        1.0
    };
    Ok(LossValue {
        focal,
        dice,
        total: focal + dice,
    })
}
