//! Dataset manifests, mask rasters and the feature-table file format.

mod features;
mod manifest;
mod raster;

pub use features::{read_feature_table, write_feature_table, FeatureTable, TDF1_MAGIC};
pub use manifest::{load_manifest, DatasetManifest, ManifestEntry, Split};
pub use raster::{
    read_gray8, read_mask, read_probability_map, write_mask, BinaryMask, ProbabilityMap,
    MASK_THRESHOLD,
};
