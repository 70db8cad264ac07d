//! Scoring of probability maps against ground-truth masks.

mod loss;
mod metrics;
mod threshold;

pub use loss::{focal_dice_loss, LossParams, LossValue};
pub use metrics::{binarize, confusion, evaluate_set, metrics, ConfusionCounts, MetricReport};
pub use threshold::{
    curve_csv, curve_points, grid_search_threshold, grid_threshold, report_row, threshold_grid,
    CurveKind, CurvePoint, ThresholdSweep, GRID_SIZE, REPORT_HEADER,
};
