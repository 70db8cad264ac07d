use std::path::Path;

use image::{DynamicImage, GrayImage};

use crate::error::{Error, Result};

/// Gray levels strictly above this value are foreground.
pub const MASK_THRESHOLD: u8 = 127;

/// Row-major binary raster; every element is 0 or 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryMask {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl BinaryMask {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "mask data has {} values, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if let Some(v) = data.iter().find(|&&v| v > 1) {
            return Err(Error::InvalidParameter(format!(
                "mask value {v} is not 0 or 1"
            )));
        }
        Ok(BinaryMask {
            width,
            height,
            data,
        })
    }

    pub fn zeros(width: usize, height: usize) -> Self {
        BinaryMask {
            width,
            height,
            data: vec![0; width * height],
        }
    }

    pub fn ones(width: usize, height: usize) -> Self {
        BinaryMask {
            width,
            height,
            data: vec![1; width * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for r in 0..height {
            for c in 0..width {
                data.push(f(r, c) as u8);
            }
        }
        BinaryMask {
            width,
            height,
            data,
        }
    }

    /// Builds a mask with the given `(row, col)` pixels set.
    pub fn from_pixels(width: usize, height: usize, pixels: &[(usize, usize)]) -> Self {
        let mut mask = Self::zeros(width, height);
        for &(r, c) in pixels {
            mask.set(r, c, true);
        }
        mask
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> bool {
        self.data[row * self.width + col] != 0
    }

    pub fn set(&mut self, row: usize, col: usize, value: bool) {
        self.data[row * self.width + col] = value as u8;
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().filter(|&&v| v != 0).count()
    }

    pub fn same_size(&self, other: &BinaryMask) -> bool {
        self.width == other.width && self.height == other.height
    }

    /// True when every foreground pixel of `self` is also foreground in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.same_size(other) && self.data.iter().zip(&other.data).all(|(&a, &b)| a <= b)
    }

    /// Swaps foreground and background.
    pub fn inverted(&self) -> BinaryMask {
        BinaryMask {
            width: self.width,
            height: self.height,
            data: self.data.iter().map(|&v| 1 - v).collect(),
        }
    }

    /// Maps 1 to 255 and 0 to 0.
    pub fn to_gray(&self) -> GrayImage {
        let bytes = self.data.iter().map(|&v| v * 255).collect();
        GrayImage::from_raw(self.width as u32, self.height as u32, bytes)
            .expect("buffer length matches dimensions")
    }

    /// Foreground iff gray level is at least `min_level`.
    pub fn from_gray(image: &GrayImage, min_level: u8) -> BinaryMask {
        BinaryMask {
            width: image.width() as usize,
            height: image.height() as usize,
            data: image
                .as_raw()
                .iter()
                .map(|&v| (v >= min_level) as u8)
                .collect(),
        }
    }
}

/// Row-major raster of crack probabilities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbabilityMap {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl ProbabilityMap {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::DimensionMismatch(format!(
                "probability map has {} values, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        if let Some(v) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidParameter(format!(
                "probability {v} outside [0, 1]"
            )));
        }
        Ok(ProbabilityMap {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    /// A {0, 1} probability map reproducing `mask`.
    pub fn from_mask(mask: &BinaryMask) -> ProbabilityMap {
        ProbabilityMap {
            width: mask.width(),
            height: mask.height(),
            data: mask.data().iter().map(|&v| v as f64).collect(),
        }
    }
}

fn luma(r: u8, g: u8, b: u8) -> u8 {
    (0.299 * r as f64 + 0.587 * g as f64 + 0.114 * b as f64)
        .round()
        .min(255.0) as u8
}

/// Decodes an 8-bit grayscale or RGB(A) PNG into gray levels (BT.601 luma for colour).
pub fn read_gray8(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let decoded = image::open(path).map_err(|e| Error::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    if decoded.width() == 0 || decoded.height() == 0 {
        return Err(Error::EmptyImage(path.to_path_buf()));
    }
    let (w, h) = (decoded.width(), decoded.height());
    let gray = match decoded {
        DynamicImage::ImageLuma8(img) => img,
        DynamicImage::ImageLumaA8(img) => {
            GrayImage::from_fn(w, h, |x, y| image::Luma([img.get_pixel(x, y)[0]]))
        }
        DynamicImage::ImageRgb8(img) => GrayImage::from_fn(w, h, |x, y| {
            let p = img.get_pixel(x, y);
            image::Luma([luma(p[0], p[1], p[2])])
        }),
        DynamicImage::ImageRgba8(img) => GrayImage::from_fn(w, h, |x, y| {
            let p = img.get_pixel(x, y);
            image::Luma([luma(p[0], p[1], p[2])])
        }),
        other => {
            return Err(Error::Image {
                path: path.to_path_buf(),
                message: format!("unsupported pixel format {:?}", other.color()),
            })
        }
    };
    Ok(gray)
}

/// Reads a ground-truth mask; gray levels above [`MASK_THRESHOLD`] become 1.
pub fn read_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let gray = read_gray8(path)?;
    Ok(BinaryMask::from_gray(&gray, MASK_THRESHOLD + 1))
}

/// Reads an 8-bit prediction; level `v` maps to `v / 255`.
pub fn read_probability_map(path: impl AsRef<Path>) -> Result<ProbabilityMap> {
    let gray = read_gray8(path)?;
    Ok(ProbabilityMap {
        width: gray.width() as usize,
        height: gray.height() as usize,
        data: gray.as_raw().iter().map(|&v| v as f64 / 255.0).collect(),
    })
}

/// Writes `mask` as an 8-bit grayscale PNG (1 → 255).
pub fn write_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    mask.to_gray()
        .save_with_format(path, image::ImageFormat::Png)
        .map_err(|e| match e {
            image::ImageError::IoError(io) => Error::io(path, io),
            other => Error::Image {
                path: path.to_path_buf(),
                message: other.to_string(),
            },
        })
}
