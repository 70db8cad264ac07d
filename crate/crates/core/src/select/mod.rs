//! Trueset selection: first principal coordinate per image, a histogram of distances
//! from the mean coordinate, per-bin quotas, and an evenly spread 90/10 pick inside
//! every bin.

mod bins;
mod pca;
mod quotas;
mod trueset;

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

pub use bins::{build_bins, distances_from_mean, BinStructure};
pub use pca::{pca_project, CoordinateMap};
pub use quotas::{selection_quotas, SelectionQuotas, SELECTION_EPSILON};
pub use trueset::{allset_split, check_split, select_true_images, TrueSplit, TRAIN_FRACTION};

use crate::data::FeatureTable;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    pub n_bins: usize,
    /// Selection parameter `s` in `[0, 1]`.
    pub s0: f64,
    /// Principal components to compute (1 or 2); only the first drives selection.
    pub components: usize,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig {
            n_bins: 10,
            s0: 0.5,
            components: 1,
        }
    }
}

/// Everything computed on the way from features to a split.
#[derive(Debug, Clone)]
pub struct SelectionResult {
    pub coords: CoordinateMap,
    pub distances: Vec<f64>,
    pub bins: BinStructure,
    pub quotas: SelectionQuotas,
    pub split: TrueSplit,
}

/// Runs projection, binning, quota assignment and per-bin picking.
pub fn run_selection(table: &FeatureTable, config: &SelectionConfig) -> Result<SelectionResult> {
    let coords = pca_project(table, config.components)?;
    let distances = coords.distances_from_mean();
    let bins = build_bins(coords.ids(), &distances, config.n_bins)?;
    let quotas = selection_quotas(&bins, table.len(), config.s0)?;
    let split = select_true_images(&bins, &quotas);
    Ok(SelectionResult {
        coords,
        distances,
        bins,
        quotas,
        split,
    })
}

/// CSV with columns `id,c1[,c2],distance,bin`. Floats use shortest round-trip formatting.
pub fn coordinates_csv(result: &SelectionResult) -> String {
    let coords = &result.coords;
    let k = coords.component_count();
    let mut out = String::from("id,c1");
    if k > 1 {
        out.push_str(",c2");
    }
    out.push_str(",distance,bin\n");
    for (i, id) in coords.ids().iter().enumerate() {
        out.push_str(id);
        for j in 0..k {
            write!(out, ",{}", coords.component(j)[i]).unwrap();
        }
        writeln!(out, ",{},{}", result.distances[i], result.bins.bin_of[i]).unwrap();
    }
    out
}

pub fn emit_coordinates(result: &SelectionResult, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, coordinates_csv(result)).map_err(|e| Error::io(path, e))
}
