//! Per-image feature vectors for selection.
//!
//! Two providers are registered: `file` reads a precomputed TDF1 table (e.g. encoder
//! outputs produced by an external extractor), `builtin` computes a small deterministic
//! descriptor from the images themselves.

use std::path::PathBuf;

use image::GrayImage;
use rayon::prelude::*;

use crate::data::{read_feature_table, read_gray8, DatasetManifest, FeatureTable};
use crate::error::{Error, Result};
use crate::registry::Registry;

pub trait FeatureProvider: Send + Sync {
    fn name(&self) -> &'static str;

    /// One row per manifest entry, in manifest order.
    fn features(&self, manifest: &DatasetManifest) -> Result<FeatureTable>;
}

/// Rows copied verbatim from a TDF1 file.
#[derive(Debug, Clone)]
pub struct FileFeatures {
    pub path: PathBuf,
}

impl FeatureProvider for FileFeatures {
    fn name(&self) -> &'static str {
        "file"
    }

    fn features(&self, manifest: &DatasetManifest) -> Result<FeatureTable> {
        let table = read_feature_table(&self.path)?;
        let ids: Vec<&str> = manifest.ids().collect();
        table.select(&ids)
    }
}

/// Grid-cell mean intensities followed by a histogram of gradient magnitudes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BuiltinDescriptor {
    pub grid: usize,
    pub bins: usize,
}

impl Default for BuiltinDescriptor {
    fn default() -> Self {
        BuiltinDescriptor { grid: 16, bins: 8 }
    }
}

impl BuiltinDescriptor {
    pub fn dim(&self) -> usize {
        self.grid * self.grid + self.bins
    }

    pub fn describe(&self, image: &GrayImage) -> Vec<f32> {
        let (w, h) = (image.width() as usize, image.height() as usize);
        let px: Vec<f64> = image.as_raw().iter().map(|&v| v as f64 / 255.0).collect();
        let mut out = Vec::with_capacity(self.dim());

        let span = |i: usize, len: usize| {
            let start = (i * len / self.grid).min(len - 1);
            let end = ((i + 1) * len / self.grid).max(start + 1);
            start..end
        };
        for gr in 0..self.grid {
            let rows = span(gr, h);
            for gc in 0..self.grid {
                let cols = span(gc, w);
                let mut sum = 0.0;
                for r in rows.clone() {
                    sum += px[r * w + cols.start..r * w + cols.end].iter().sum::<f64>();
                }
                out.push((sum / (rows.len() * cols.len()) as f64) as f32);
            }
        }

        // central differences with replicated borders
        let mut magnitudes = Vec::with_capacity(w * h);
        for r in 0..h {
            let (up, down) = (r.saturating_sub(1), (r + 1).min(h - 1));
            for c in 0..w {
                let (left, right) = (c.saturating_sub(1), (c + 1).min(w - 1));
                let gx = (px[r * w + right] - px[r * w + left]) / 2.0;
                let gy = (px[down * w + c] - px[up * w + c]) / 2.0;
                magnitudes.push(gx.hypot(gy));
            }
        }
        let peak = magnitudes.iter().copied().fold(0.0, f64::max);
        let mut hist = vec![0f64; self.bins];
        if peak > 0.0 {
            for m in &magnitudes {
                let b = ((m / peak) * self.bins as f64).floor() as usize;
                hist[b.min(self.bins - 1)] += 1.0;
            }
            let n = magnitudes.len() as f64;
            hist.iter_mut().for_each(|v| *v /= n);
        }
        out.extend(hist.into_iter().map(|v| v as f32));
        out
    }
}

impl FeatureProvider for BuiltinDescriptor {
    fn name(&self) -> &'static str {
        "builtin"
    }

    fn features(&self, manifest: &DatasetManifest) -> Result<FeatureTable> {
        let rows: Vec<Vec<f32>> = manifest
            .entries()
            .par_iter()
            .map(|entry| {
                let image = read_gray8(manifest.image_path(entry))?;
                Ok(self.describe(&image))
            })
            .collect::<Result<_>>()?;
        let ids = manifest.ids().map(str::to_owned).collect();
        FeatureTable::new(ids, self.dim(), rows.concat())
    }
}

/// Settings consumed by the provider factories.
#[derive(Debug, Clone)]
pub struct ProviderOptions {
    pub features_path: Option<PathBuf>,
    pub grid: usize,
    pub bins: usize,
}

impl Default for ProviderOptions {
    fn default() -> Self {
        let d = BuiltinDescriptor::default();
        ProviderOptions {
            features_path: None,
            grid: d.grid,
            bins: d.bins,
        }
    }
}

pub type ProviderFactory =
    Box<dyn Fn(&ProviderOptions) -> Result<Box<dyn FeatureProvider>> + Send + Sync>;

/// Registry with the `file` and `builtin` providers.
pub fn provider_registry() -> Registry<ProviderFactory> {
    let mut reg: Registry<ProviderFactory> = Registry::new("feature provider");
    reg.register(
        "file",
        Box::new(|opts| {
            let path = opts.features_path.clone().ok_or_else(|| {
                Error::InvalidParameter("the file provider needs a feature table path".into())
            })?;
            Ok(Box::new(FileFeatures { path }))
        }),
    );
    reg.register(
        "builtin",
        Box::new(|opts| {
            if opts.grid == 0 || opts.bins == 0 {
                return Err(Error::InvalidParameter(
                    "grid and bins must be positive".into(),
                ));
            }
            Ok(Box::new(BuiltinDescriptor {
                grid: opts.grid,
                bins: opts.bins,
            }))
        }),
    );
    reg
}

pub fn features_for(
    manifest: &DatasetManifest,
    provider: &dyn FeatureProvider,
) -> Result<FeatureTable> {
    provider.features(manifest)
}
