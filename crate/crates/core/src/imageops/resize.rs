use image::GrayImage;

use crate::data::BinaryMask;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interpolation {
    /// Cubic convolution, `a = -0.5`, clamped borders.
    Bicubic,
    /// Output `(r, c)` samples input `(floor((r + 0.5) * sy), floor((c + 0.5) * sx))`.
    Nearest,
}

const CUBIC_A: f64 = -0.5;

fn cubic_weight(x: f64) -> f64 {
    let x = x.abs();
    if x <= 1.0 {
        ((CUBIC_A + 2.0) * x - (CUBIC_A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((CUBIC_A * x - 5.0 * CUBIC_A) * x + 8.0 * CUBIC_A) * x - 4.0 * CUBIC_A
    } else {
        0.0
    }
}

/// Source taps and weights for each output coordinate along one axis.
fn cubic_taps(in_len: usize, out_len: usize) -> Vec<([usize; 4], [f64; 4])> {
    let scale = in_len as f64 / out_len as f64;
    let last = in_len as isize - 1;
    (0..out_len)
        .map(|o| {
            let src = (o as f64 + 0.5) * scale - 0.5;
            let base = src.floor();
            let t = src - base;
            let base = base as isize;
            let mut idx = [0usize; 4];
            let mut wts = [0f64; 4];
            for k in 0..4 {
                let offset = k as isize - 1;
                idx[k] = (base + offset).clamp(0, last) as usize;
                wts[k] = cubic_weight(t - offset as f64);
            }
            (idx, wts)
        })
        .collect()
}

fn nearest_index(o: usize, in_len: usize, out_len: usize) -> usize {
    let scale = in_len as f64 / out_len as f64;
    (((o as f64 + 0.5) * scale).floor() as usize).min(in_len - 1)
}

/// Resamples an 8-bit raster. Bicubic results are rounded and clamped to `0..=255`.
pub fn resize(
    image: &GrayImage,
    new_width: u32,
    new_height: u32,
    method: Interpolation,
) -> Result<GrayImage> {
    if new_width == 0 || new_height == 0 {
        return Err(Error::InvalidParameter(format!(
            "cannot resize to {new_width}x{new_height}"
        )));
    }
    let (in_w, in_h) = (image.width() as usize, image.height() as usize);
    if in_w == 0 || in_h == 0 {
        return Err(Error::InvalidParameter(
            "cannot resize an empty raster".into(),
        ));
    }
    let (out_w, out_h) = (new_width as usize, new_height as usize);
    let src = image.as_raw();
    let mut out = vec![0u8; out_w * out_h];
    match method {
        Interpolation::Nearest => {
            let cols: Vec<usize> = (0..out_w).map(|c| nearest_index(c, in_w, out_w)).collect();
            for r in 0..out_h {
                let sr = nearest_index(r, in_h, out_h);
                for (c, &sc) in cols.iter().enumerate() {
                    out[r * out_w + c] = src[sr * in_w + sc];
                }
            }
        }
        Interpolation::Bicubic => {
            let xs = cubic_taps(in_w, out_w);
            let ys = cubic_taps(in_h, out_h);
            // horizontal pass on every input row, then vertical
            let mut tmp = vec![0f64; in_h * out_w];
            for r in 0..in_h {
                let row = &src[r * in_w..(r + 1) * in_w];
                for (c, (idx, wts)) in xs.iter().enumerate() {
                    tmp[r * out_w + c] = (0..4).map(|k| wts[k] * row[idx[k]] as f64).sum();
                }
            }
            for (r, (idx, wts)) in ys.iter().enumerate() {
                for c in 0..out_w {
                    let v: f64 = (0..4).map(|k| wts[k] * tmp[idx[k] * out_w + c]).sum();
                    out[r * out_w + c] = v.round().clamp(0.0, 255.0) as u8;
                }
            }
        }
    }
    Ok(GrayImage::from_raw(new_width, new_height, out).expect("buffer matches dimensions"))
}

/// Nearest-neighbour resize of a binary mask; the result stays binary.
pub fn resize_mask_nearest(
    mask: &BinaryMask,
    new_width: usize,
    new_height: usize,
) -> Result<BinaryMask> {
    let gray = resize(
        &mask.to_gray(),
        new_width as u32,
        new_height as u32,
        Interpolation::Nearest,
    )?;
    Ok(BinaryMask::from_gray(&gray, 128))
}
