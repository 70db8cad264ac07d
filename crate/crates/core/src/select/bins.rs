use crate::error::{Error, Result};

use super::CoordinateMap;

/// `|x_i - mean(x)|` for each value, in input order.
pub fn distances_from_mean(values: &[f64]) -> Vec<f64> {
    if values.is_empty() {
        return Vec::new();
    }
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    values.iter().map(|v| (v - mean).abs()).collect()
}

impl CoordinateMap {
    /// Distance of each image's first coordinate from the mean first coordinate.
    pub fn distances_from_mean(&self) -> Vec<f64> {
        distances_from_mean(self.first())
    }
}

/// Equal-width histogram over per-image distances.
#[derive(Debug, Clone, PartialEq)]
pub struct BinStructure {
    /// `n_bins + 1` ascending edges. Bin `b` is `[edges[b], edges[b + 1])`; the last bin
    /// is closed on the right.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    /// Bin index of each input item, in input order.
    pub bin_of: Vec<usize>,
    /// Bin indices by count descending, ties by ascending index.
    pub idx_descending: Vec<usize>,
    /// Ids of each bin sorted by ascending distance, then id.
    pub members: Vec<Vec<String>>,
}

impl BinStructure {
    pub fn n_bins(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Bins `distances` (aligned with `ids`) into `n_bins` equal-width bins spanning
/// `[min, max]`. When every distance is equal, all items land in bin 0 and the edges
/// span `[min, min + 1]`.
pub fn build_bins(ids: &[String], distances: &[f64], n_bins: usize) -> Result<BinStructure> {
    if n_bins == 0 {
        return Err(Error::InvalidParameter("n_bins must be at least 1".into()));
    }
    if distances.is_empty() {
        return Err(Error::InvalidParameter(
            "cannot bin an empty distance list".into(),
        ));
    }
    if ids.len() != distances.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} ids for {} distances",
            ids.len(),
            distances.len()
        )));
    }
    if let Some(d) = distances.iter().find(|d| !d.is_finite()) {
        return Err(Error::NonFinite(format!("distance {d}")));
    }
    let min = distances.iter().copied().fold(f64::INFINITY, f64::min);
    let max = distances.iter().copied().fold(f64::NEG_INFINITY, f64::max);

    let (edges, bin_of) = if max > min {
        let step = (max - min) / n_bins as f64;
        let mut edges: Vec<f64> = (0..=n_bins).map(|i| min + i as f64 * step).collect();
        edges[n_bins] = max;
        let bin_of = distances
            .iter()
            .map(|&d| {
                let mut b = (((d - min) / step).floor() as usize).min(n_bins - 1);
                if d < edges[b] {
                    b -= 1;
                } else if b + 1 < n_bins && d >= edges[b + 1] {
                    b += 1;
                }
                b
            })
            .collect::<Vec<_>>();
        (edges, bin_of)
    } else {
        let step = 1.0 / n_bins as f64;
        let edges = (0..=n_bins).map(|i| min + i as f64 * step).collect();
        (edges, vec![0; distances.len()])
    };

    let mut counts = vec![0usize; n_bins];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_bins];
    for (i, &b) in bin_of.iter().enumerate() {
        counts[b] += 1;
        members[b].push(i);
    }
    for bin in &mut members {
        bin.sort_by(|&a, &b| {
            distances[a]
                .total_cmp(&distances[b])
                .then_with(|| ids[a].cmp(&ids[b]))
        });
    }
    let mut idx_descending: Vec<usize> = (0..n_bins).collect();
    idx_descending.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));

    Ok(BinStructure {
        edges,
        counts,
        bin_of,
        idx_descending,
        members: members
            .into_iter()
            .map(|bin| bin.into_iter().map(|i| ids[i].clone()).collect())
            .collect(),
    })
}
