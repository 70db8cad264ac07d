use std::fmt::Write as _;

use crate::data::{BinaryMask, ProbabilityMap};
use crate::error::{Error, Result};

use super::{metrics, ConfusionCounts, MetricReport};

/// Number of thresholds in the search grid `0.00, 0.01, ..., 0.99`.
pub const GRID_SIZE: usize = 100;

pub fn grid_threshold(k: usize) -> f64 {
    k as f64 / 100.0
}

pub fn threshold_grid() -> impl Iterator<Item = f64> {
    (0..GRID_SIZE).map(grid_threshold)
}

/// Number of grid thresholds a value lies strictly above.
fn grid_rank(v: f64) -> usize {
    let mut m = ((v * 100.0).ceil().max(0.0) as usize).min(GRID_SIZE);
    while m < GRID_SIZE && grid_threshold(m) < v {
        m += 1;
    }
    while m > 0 && grid_threshold(m - 1) >= v {
        m -= 1;
    }
    m
}

/// Confusion counts for every grid threshold, gathered in one pass over the pixels.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdSweep {
    positives: [u64; GRID_SIZE + 1],
    negatives: [u64; GRID_SIZE + 1],
}

impl Default for ThresholdSweep {
    fn default() -> Self {
        ThresholdSweep {
            positives: [0; GRID_SIZE + 1],
            negatives: [0; GRID_SIZE + 1],
        }
    }
}

impl ThresholdSweep {
    pub fn add(&mut self, pred: &ProbabilityMap, gt: &BinaryMask) -> Result<()> {
        if pred.width() != gt.width() || pred.height() != gt.height() {
            return Err(Error::DimensionMismatch(format!(
                "prediction is {}x{}, ground truth is {}x{}",
                pred.width(),
                pred.height(),
                gt.width(),
                gt.height()
            )));
        }
        for (&v, &g) in pred.data().iter().zip(gt.data()) {
            let rank = grid_rank(v);
            if g != 0 {
                self.positives[rank] += 1;
            } else {
                self.negatives[rank] += 1;
            }
        }
        Ok(())
    }

    pub fn from_pairs(pairs: &[(ProbabilityMap, BinaryMask)]) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::InvalidParameter(
                "no prediction/ground-truth pairs".into(),
            ));
        }
        let mut sweep = ThresholdSweep::default();
        for (i, (pred, gt)) in pairs.iter().enumerate() {
            sweep
                .add(pred, gt)
                .map_err(|e| Error::DimensionMismatch(format!("pair {i}: {e}")))?;
        }
        Ok(sweep)
    }

    /// Counts at grid threshold `k / 100`.
    pub fn counts(&self, k: usize) -> ConfusionCounts {
        // a pixel of rank m is predicted positive iff m > k
        let above = |h: &[u64; GRID_SIZE + 1]| h[k + 1..].iter().sum::<u64>();
        let (pos_total, neg_total) = (
            self.positives.iter().sum::<u64>(),
            self.negatives.iter().sum::<u64>(),
        );
        let tp = above(&self.positives);
        let fp = above(&self.negatives);
        ConfusionCounts::new(tp, fp, pos_total - tp, neg_total - fp)
    }

    pub fn reports(&self) -> Vec<MetricReport> {
        (0..GRID_SIZE)
            .map(|k| metrics(self.counts(k), grid_threshold(k)))
            .collect()
    }
}

/// Best F-measure over the grid; ties go to the smallest threshold.
pub fn grid_search_threshold(pairs: &[(ProbabilityMap, BinaryMask)]) -> Result<MetricReport> {
    let reports = ThresholdSweep::from_pairs(pairs)?.reports();
    Ok(reports
        .into_iter()
        .reduce(|best, r| if r.f > best.f { r } else { best })
        .expect("grid is non-empty"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Roc,
    Pr,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub threshold: f64,
    /// ROC: false-positive rate. PR: precision.
    pub x: f64,
    /// ROC: true-positive rate. PR: recall.
    pub y: f64,
}

pub fn curve_points(
    pairs: &[(ProbabilityMap, BinaryMask)],
    kind: CurveKind,
) -> Result<Vec<CurvePoint>> {
    let sweep = ThresholdSweep::from_pairs(pairs)?;
    Ok(sweep
        .reports()
        .into_iter()
        .map(|rep| {
            let c = rep.counts;
            let (x, y) = match kind {
                CurveKind::Roc => {
                    let negatives = c.fp + c.tn;
                    let fpr = if negatives == 0 {
                        0.0
                    } else {
                        c.fp as f64 / negatives as f64
                    };
                    (fpr, rep.r)
                }
                CurveKind::Pr => (rep.p, rep.r),
            };
            CurvePoint {
                threshold: rep.threshold,
                x,
                y,
            }
        })
        .collect())
}

pub fn curve_csv(points: &[CurvePoint], kind: CurveKind) -> String {
    let mut out = String::from(match kind {
        CurveKind::Roc => "T,FPR,TPR\n",
        CurveKind::Pr => "T,P,R\n",
    });
    for p in points {
        writeln!(out, "{:.2},{},{}", p.threshold, p.x, p.y).unwrap();
    }
    out
}

pub const REPORT_HEADER: &str = "dataset,T,G,C,mIoU,P,R,F";

/// One `dataset,T,G,C,mIoU,P,R,F` row (no trailing newline).
pub fn report_row(dataset: &str, r: &MetricReport) -> String {
    format!(
        "{dataset},{:.2},{},{},{},{},{},{}",
        r.threshold, r.g, r.c, r.miou, r.p, r.r, r.f
    )
}
