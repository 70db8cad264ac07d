use crate::error::{Error, Result};
use crate::round_half_away;

use super::BinStructure;

/// Remaining selection parameter at or below this value counts as exhausted.
pub const SELECTION_EPSILON: f64 = 1e-9;

/// Number of images to draw from each bin.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionQuotas {
    /// Quota per bin index.
    pub select_mapping: Vec<usize>,
    pub s: f64,
    pub dec: f64,
    pub n_bins: usize,
}

impl SelectionQuotas {
    /// Quotas listed in the order bins were visited (`idx_descending`).
    pub fn along(&self, order: &[usize]) -> Vec<usize> {
        order.iter().map(|&b| self.select_mapping[b]).collect()
    }

    pub fn sum(&self) -> usize {
        self.select_mapping.iter().sum()
    }
}

/// Assigns per-bin quotas by walking bins from most to least populated.
///
/// The first bin receives `round(num_images * s / (n_bins - 1))`; after each assignment
/// `s` shrinks by `s0 / (n_bins - 1)` and the quota is recomputed. Bins reached once `s`
/// is exhausted receive nothing.
pub fn selection_quotas(
    bins: &BinStructure,
    num_images: usize,
    s0: f64,
) -> Result<SelectionQuotas> {
    let n_bins = bins.n_bins();
    if n_bins < 2 {
        return Err(Error::InvalidParameter(
            "quota recurrence needs at least 2 bins".into(),
        ));
    }
    if num_images == 0 {
        return Err(Error::InvalidParameter(
            "num_images must be at least 1".into(),
        ));
    }
    if !(s0.is_finite() && s0 >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "selection parameter {s0} must be >= 0"
        )));
    }
    let steps = (n_bins - 1) as f64;
    let dec = s0 / steps;
    let quota = |s: f64| round_half_away(num_images as f64 * s / steps).max(0) as usize;

    let mut select_mapping = vec![0usize; n_bins];
    let mut s = s0;
    let mut select = quota(s);
    for &b in &bins.idx_descending {
        if s > SELECTION_EPSILON {
            select_mapping[b] = select;
            s -= dec;
            select = quota(s);
        }
    }
    Ok(SelectionQuotas {
        select_mapping,
        s: s0,
        dec,
        n_bins,
    })
}
