use crate::data::BinaryMask;
use crate::error::{Error, Result};
use crate::imageops::{
    connected_components, convex_hull, dilate, point_in_polygon, resize, ConnectedComponent,
    Interpolation, Kernel, Point, Polygon,
};
use crate::round_half_away;

use super::RandomSource;

/// Area limits (pixels) that decide how many squares a component loses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MaskingThresholds {
    /// Components up to this area are left alone.
    pub t0: usize,
    pub t1: usize,
    pub t2: usize,
}

impl Default for MaskingThresholds {
    fn default() -> Self {
        MaskingThresholds {
            t0: 50,
            t1: 100,
            t2: 200,
        }
    }
}

impl MaskingThresholds {
    pub fn validate(&self) -> Result<()> {
        if self.t0 < self.t1 && self.t1 < self.t2 {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "thresholds must satisfy t0 < t1 < t2, got {} {} {}",
                self.t0, self.t1, self.t2
            )))
        }
    }

    /// Inclusive range for the number of squares cut from a component of `area` pixels,
    /// or `None` when the component is too small to touch.
    pub fn point_range(&self, area: usize) -> Option<(usize, usize)> {
        if area <= self.t0 {
            None
        } else if area <= self.t1 {
            Some((1, 3))
        } else if area <= self.t2 {
            Some((2, 5))
        } else {
            Some((5, 8))
        }
    }
}

/// Attempts per point before falling back to a random component pixel.
pub const MAX_SAMPLING_TRIALS: usize = 1000;

/// One dilation per kernel, in kernel order.
pub fn stochastic_width(mask: &BinaryMask, kernels: &[Kernel]) -> Vec<BinaryMask> {
    kernels.iter().map(|&k| dilate(mask, k)).collect()
}

/// Inclusive range of square sides for a component, scaled by its estimated stroke width
/// `area / max(bbox height, bbox width)`.
pub fn side_range(component: &ConnectedComponent) -> (usize, usize) {
    let longest = component.bbox_height().max(component.bbox_width());
    let width = component.area() as f64 / longest as f64;
    let lo = round_half_away(width).max(3) as usize;
    let hi = round_half_away(3.0 * width).max(5) as usize;
    (lo, hi.max(lo))
}

enum SamplingRegion {
    Hull(Polygon),
    /// Collinear pixels: sample the bounding box directly.
    Box,
}

fn sample_points(
    component: &ConnectedComponent,
    count: usize,
    rng: &mut dyn RandomSource,
) -> Vec<(usize, usize)> {
    let region = match convex_hull(component) {
        Some(hull) => SamplingRegion::Hull(hull),
        None => SamplingRegion::Box,
    };
    let (r0, c0, r1, c1) = component.bbox;
    let to_pixel = |p: Point| {
        (
            (round_half_away(p.row).max(0) as usize).clamp(r0, r1),
            (round_half_away(p.col).max(0) as usize).clamp(c0, c1),
        )
    };
    (0..count)
        .map(|_| match &region {
            SamplingRegion::Box => {
                let row = rng.real_in(r0 as f64, r1 as f64);
                let col = rng.real_in(c0 as f64, c1 as f64);
                to_pixel(Point::new(row, col))
            }
            SamplingRegion::Hull(hull) => {
                let (hr0, hc0, hr1, hc1) = hull.bounds();
                for _ in 0..MAX_SAMPLING_TRIALS {
                    let p = Point::new(rng.real_in(hr0, hr1), rng.real_in(hc0, hc1));
                    if point_in_polygon(p, hull) {
                        return to_pixel(p);
                    }
                }
                component.pixels[rng.int_in(0, component.area() - 1)]
            }
        })
        .collect()
}

/// Cuts random squares out of every component larger than `t0`, shortening the
/// apparent length of cracks. Only the component's own pixels are erased, so nearby
/// components are never affected.
pub fn random_masking(
    mask: &BinaryMask,
    thresholds: &MaskingThresholds,
    rng: &mut dyn RandomSource,
) -> BinaryMask {
    let mut out = mask.clone();
    for component in connected_components(mask) {
        let Some((lo, hi)) = thresholds.point_range(component.area()) else {
            continue;
        };
        let (side_lo, side_hi) = side_range(&component);
        let npts = rng.int_in(lo, hi);
        let points = sample_points(&component, npts, rng);
        for (row, col) in points {
            let side = rng.int_in(side_lo, side_hi);
            let half = side / 2;
            let rows = row as isize - half as isize..row as isize - half as isize + side as isize;
            let cols = col as isize - half as isize..col as isize - half as isize + side as isize;
            for &(r, c) in &component.pixels {
                if rows.contains(&(r as isize)) && cols.contains(&(c as isize)) {
                    out.set(r, c, false);
                }
            }
        }
    }
    out
}

/// Dilates at `scale`× resolution and samples back down, giving fractional dilation
/// widths of `k / scale` at the original resolution.
pub fn scale_space(mask: &BinaryMask, kernels: &[Kernel], scale: usize) -> Result<Vec<BinaryMask>> {
    if scale < 2 {
        return Err(Error::InvalidParameter(format!(
            "scale must be at least 2, got {scale}"
        )));
    }
    let (w, h) = (mask.width(), mask.height());
    if w == 0 || h == 0 {
        return Ok(vec![mask.clone(); kernels.len()]);
    }
    let up = resize(
        &mask.to_gray(),
        (w * scale) as u32,
        (h * scale) as u32,
        Interpolation::Bicubic,
    )?;
    let up = BinaryMask::from_gray(&up, 128);
    kernels
        .iter()
        .map(|&k| {
            let dilated = dilate(&up, k).to_gray();
            let down = resize(&dilated, w as u32, h as u32, Interpolation::Nearest)?;
            Ok(BinaryMask::from_gray(&down, 128))
        })
        .collect()
}

/// Dilations with each of `kernels` followed by one randomly masked copy.
pub fn mix(
    mask: &BinaryMask,
    kernels: &[Kernel],
    thresholds: &MaskingThresholds,
    rng: &mut dyn RandomSource,
) -> Vec<BinaryMask> {
    let mut out = stochastic_width(mask, kernels);
    out.push(random_masking(mask, thresholds, rng));
    out
}
