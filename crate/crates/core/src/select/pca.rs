use nalgebra::{DMatrix, SymmetricEigen};

use crate::data::FeatureTable;
use crate::error::{Error, Result};

/// Per-image principal coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct CoordinateMap {
    ids: Vec<String>,
    /// `components[j][i]` is image `i` projected on direction `j`.
    components: Vec<Vec<f64>>,
    /// Sample-covariance eigenvalue of each component.
    variances: Vec<f64>,
    /// Unit-norm principal directions in feature space.
    directions: Vec<Vec<f64>>,
}

impl CoordinateMap {
    /// Builds a map from precomputed coordinates (one vector per component).
    pub fn from_coordinates(ids: Vec<String>, components: Vec<Vec<f64>>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one component required".into(),
            ));
        }
        for comp in &components {
            if comp.len() != ids.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} coordinates for {} ids",
                    comp.len(),
                    ids.len()
                )));
            }
            if comp.iter().any(|v| !v.is_finite()) {
                return Err(Error::NonFinite("coordinate".into()));
            }
        }
        Ok(CoordinateMap {
            ids,
            variances: vec![f64::NAN; components.len()],
            directions: Vec::new(),
            components,
        })
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn first(&self) -> &[f64] {
        &self.components[0]
    }

    pub fn component(&self, j: usize) -> &[f64] {
        &self.components[j]
    }

    pub fn variances(&self) -> &[f64] {
        &self.variances
    }

    pub fn directions(&self) -> &[Vec<f64>] {
        &self.directions
    }
}

/// Projects mean-centred rows onto the top `k` principal directions (`k` is 1 or 2).
///
/// The eigenproblem is solved on the n×n Gram matrix of the centred data, which is
/// small when there are far fewer images than feature dimensions. Each direction is
/// signed so that its largest-magnitude loading is positive.
pub fn pca_project(table: &FeatureTable, k: usize) -> Result<CoordinateMap> {
    if !(1..=2).contains(&k) {
        return Err(Error::InvalidParameter(format!(
            "component count must be 1 or 2, got {k}"
        )));
    }
    let n = table.len();
    let dim = table.dim();
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "PCA needs at least 2 rows, got {n}"
        )));
    }
    if dim == 0 {
        return Err(Error::DegenerateVariance);
    }

    let mut mean = vec![0f64; dim];
    for i in 0..n {
        for (m, &v) in mean.iter_mut().zip(table.row(i)) {
            *m += v as f64;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let centred: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            table
                .row(i)
                .iter()
                .zip(&mean)
                .map(|(&v, m)| v as f64 - m)
                .collect()
        })
        .collect();

    let raw_energy: f64 = table.values().iter().map(|&v| (v as f64).powi(2)).sum();
    let gram = DMatrix::from_fn(n, n, |i, j| dot(&centred[i], &centred[j]));
    let trace = gram.trace();
    if trace.is_nan() || trace <= 1e-24 * raw_energy.max(f64::MIN_POSITIVE) {
        return Err(Error::DegenerateVariance);
    }

    let eigen = SymmetricEigen::new(gram);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eigen.eigenvalues[b].total_cmp(&eigen.eigenvalues[a]));

    let mut components = Vec::with_capacity(k);
    let mut variances = Vec::with_capacity(k);
    let mut directions = Vec::with_capacity(k);
    for &e in order.iter().take(k) {
        let lambda = eigen.eigenvalues[e].max(0.0);
        if lambda <= 1e-12 * trace {
            // no variance left along this component
            components.push(vec![0.0; n]);
            variances.push(0.0);
            directions.push(vec![0.0; dim]);
            continue;
        }
        let u = eigen.eigenvectors.column(e);
        let norm = lambda.sqrt();
        let mut direction = vec![0f64; dim];
        for (i, row) in centred.iter().enumerate() {
            let ui = u[i] / norm;
            for (d, &x) in direction.iter_mut().zip(row) {
                *d += x * ui;
            }
        }
        let len = dot(&direction, &direction).sqrt();
        direction.iter_mut().for_each(|d| *d /= len);
        let pivot = direction
            .iter()
            .enumerate()
            .fold((0, 0.0f64), |best, (i, &d)| {
                if d.abs() > best.1 {
                    (i, d.abs())
                } else {
                    best
                }
            })
            .0;
        if direction[pivot] < 0.0 {
            direction.iter_mut().for_each(|d| *d = -*d);
        }
        components.push(centred.iter().map(|row| dot(row, &direction)).collect());
        variances.push(lambda / (n - 1) as f64);
        directions.push(direction);
    }

    Ok(CoordinateMap {
        ids: table.ids().to_vec(),
        components,
        variances,
        directions,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
