//! Training-subset ("trueset") selection, ground-truth augmentation and scoring for
//! binary crack-segmentation datasets.
//!
//! The pipeline is: feature vectors ([`embed`]) → first principal coordinate and
//! distance-histogram quotas ([`select`]) → knowledge-based mask augmentation
//! ([`augment`]) → evaluation of probability maps ([`eval`]).

pub mod augment;
pub mod data;
pub mod embed;
pub mod error;
pub mod eval;
pub mod imageops;
pub mod registry;
pub mod select;

pub use error::{Error, Result};

/// Rounds to the nearest integer, halves away from zero.
pub fn round_half_away(x: f64) -> i64 {
    x.round() as i64
}
