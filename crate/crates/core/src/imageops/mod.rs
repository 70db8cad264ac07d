//! Raster primitives used by the augmentation generators.

mod components;
mod geometry;
mod morphology;
mod resize;

pub use components::{connected_components, ConnectedComponent};
pub use geometry::{convex_hull, point_in_polygon, Point, Polygon};
pub use morphology::{dilate, Kernel};
pub use resize::{resize, resize_mask_nearest, Interpolation};
