use std::ops::Add;

use crate::data::{BinaryMask, ProbabilityMap};
use crate::error::{Error, Result};

/// Pixel tallies with crack as the positive class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionCounts {
    pub fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        ConfusionCounts { tp, fp, fn_, tn }
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }
}

impl Add for ConfusionCounts {
    type Output = ConfusionCounts;

    fn add(self, o: ConfusionCounts) -> ConfusionCounts {
        ConfusionCounts::new(
            self.tp + o.tp,
            self.fp + o.fp,
            self.fn_ + o.fn_,
            self.tn + o.tn,
        )
    }
}

impl std::iter::Sum for ConfusionCounts {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ConfusionCounts::default(), Add::add)
    }
}

/// Scores at one threshold: global accuracy, class-average accuracy, mean IoU over the
/// two classes, precision, recall and F-measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricReport {
    pub threshold: f64,
    pub counts: ConfusionCounts,
    pub g: f64,
    pub c: f64,
    pub miou: f64,
    pub p: f64,
    pub r: f64,
    pub f: f64,
}

/// 1 iff the value is strictly above `threshold`.
pub fn binarize(map: &ProbabilityMap, threshold: f64) -> BinaryMask {
    let data = map.data().iter().map(|&v| (v > threshold) as u8).collect();
    BinaryMask::new(map.width(), map.height(), data).expect("same shape")
}

pub fn confusion(pred: &BinaryMask, gt: &BinaryMask) -> Result<ConfusionCounts> {
    if !pred.same_size(gt) {
        return Err(Error::DimensionMismatch(format!(
            "prediction is {}x{}, ground truth is {}x{}",
            pred.width(),
            pred.height(),
            gt.width(),
            gt.height()
        )));
    }
    let mut counts = ConfusionCounts::default();
    for (&p, &g) in pred.data().iter().zip(gt.data()) {
        match (p != 0, g != 0) {
            (true, true) => counts.tp += 1,
            (true, false) => counts.fp += 1,
            (false, true) => counts.fn_ += 1,
            (false, false) => counts.tn += 1,
        }
    }
    Ok(counts)
}

/// `num / den`, with `0 / 0` resolved to 1 when the class is absent from both prediction
/// and ground truth and to 0 otherwise.
fn ratio(num: u64, den: u64, class_absent: bool) -> f64 {
    if den == 0 {
        if class_absent {
            1.0
        } else {
            0.0
        }
    } else {
        num as f64 / den as f64
    }
}

pub fn metrics(counts: ConfusionCounts, threshold: f64) -> MetricReport {
    let ConfusionCounts { tp, fp, fn_, tn } = counts;
    let crack_absent = tp + fp + fn_ == 0;
    let background_absent = tn + fp + fn_ == 0;

    let total = counts.total();
    let g = ratio(tp + tn, total, total == 0);
    let r = ratio(tp, tp + fn_, crack_absent);
    let p = ratio(tp, tp + fp, crack_absent);
    let bg_recall = ratio(tn, tn + fp, background_absent);
    let c = 0.5 * (r + bg_recall);
    let iou_crack = ratio(tp, tp + fp + fn_, crack_absent);
    let iou_bg = ratio(tn, tn + fn_ + fp, background_absent);
    let miou = 0.5 * (iou_crack + iou_bg);
    let f = if p + r > 0.0 {
        2.0 * p * r / (p + r)
    } else {
        0.0
    };
    MetricReport {
        threshold,
        counts,
        g,
        c,
        miou,
        p,
        r,
        f,
    }
}

/// Micro-averaged report: confusion counts are summed over all pairs first.
pub fn evaluate_set(
    pairs: &[(ProbabilityMap, BinaryMask)],
    threshold: f64,
) -> Result<MetricReport> {
    if pairs.is_empty() {
        return Err(Error::InvalidParameter(
            "no prediction/ground-truth pairs".into(),
        ));
    }
    let mut total = ConfusionCounts::default();
    for (i, (pred, gt)) in pairs.iter().enumerate() {
        let counts = confusion(&binarize(pred, threshold), gt)
            .map_err(|e| Error::DimensionMismatch(format!("pair {i}: {e}")))?;
        total = total + counts;
    }
    Ok(metrics(total, threshold))
}
