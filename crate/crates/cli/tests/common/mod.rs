//! Synthetic datasets for the CLI tests.
#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use image::GrayImage;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use trueset_core::data::{write_mask, BinaryMask, DatasetManifest, ManifestEntry, Split};

/// Random-walk strokes plus a few small blobs, roughly what a crack annotation looks like.
pub fn crack_mask(rng: &mut ChaCha8Rng, width: usize, height: usize) -> BinaryMask {
    let mut mask = BinaryMask::zeros(width, height);
    let strokes = rng.gen_range(1..=3);
    for _ in 0..strokes {
        let (mut r, mut c) = (
            rng.gen_range(0..height) as i64,
            rng.gen_range(0..width) as i64,
        );
        let len = rng.gen_range(10..=4 * width.max(height));
        let thick = rng.gen_range(1..=3i64);
        let (mut dr, mut dc) = (rng.gen_range(-1..=1i64), 1i64);
        for _ in 0..len {
            for a in 0..thick {
                for b in 0..thick {
                    let (rr, cc) = (r + a, c + b);
                    if (0..height as i64).contains(&rr) && (0..width as i64).contains(&cc) {
                        mask.set(rr as usize, cc as usize, true);
                    }
                }
            }
            if rng.gen_bool(0.2) {
                dr = rng.gen_range(-1..=1);
                dc = rng.gen_range(-1..=1);
                if dr == 0 && dc == 0 {
                    dc = 1;
                }
            }
            r = (r + dr).clamp(0, height as i64 - 1);
            c = (c + dc).clamp(0, width as i64 - 1);
        }
    }
    for _ in 0..rng.gen_range(0..=3) {
        let (h, w) = (rng.gen_range(1..=6), rng.gen_range(1..=6));
        let (r0, c0) = (rng.gen_range(0..height), rng.gen_range(0..width));
        for r in r0..(r0 + h).min(height) {
            for c in c0..(c0 + w).min(width) {
                mask.set(r, c, true);
            }
        }
    }
    mask
}

/// Grey image loosely correlated with the mask, with a per-image brightness and texture.
pub fn crack_image(rng: &mut ChaCha8Rng, mask: &BinaryMask) -> GrayImage {
    let base: f64 = rng.gen_range(80.0..200.0);
    let slope: f64 = rng.gen_range(-2.0..2.0);
    GrayImage::from_fn(mask.width() as u32, mask.height() as u32, |x, y| {
        let noise: f64 = rng.gen_range(-20.0..20.0);
        let mut v = base + slope * x as f64 + noise;
        if mask.get(y as usize, x as usize) {
            v -= 60.0;
        }
        image::Luma([v.clamp(0.0, 255.0) as u8])
    })
}

/// Writes `n` images and masks under `dir` and returns the manifest path.
/// `splits` assigns a tag per index.
pub fn write_dataset(
    dir: &Path,
    n: usize,
    size: usize,
    seed: u64,
    splits: impl Fn(usize) -> Split,
) -> PathBuf {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    fs::create_dir_all(dir.join("images")).unwrap();
    fs::create_dir_all(dir.join("masks")).unwrap();
    let mut entries = Vec::with_capacity(n);
    for i in 0..n {
        let id = format!("img{i:04}");
        let mask = crack_mask(&mut rng, size, size);
        let img = crack_image(&mut rng, &mask);
        let image_rel = PathBuf::from(format!("images/{id}.png"));
        let mask_rel = PathBuf::from(format!("masks/{id}.png"));
        img.save(dir.join(&image_rel)).unwrap();
        write_mask(&mask, dir.join(&mask_rel)).unwrap();
        entries.push(ManifestEntry::new(id, image_rel, Some(mask_rel), splits(i)));
    }
    let manifest = DatasetManifest::new(dir, entries).unwrap();
    let path = dir.join("manifest.tsv");
    manifest.write(&path).unwrap();
    path
}

/// Bytes of every file directly inside `dir`, sorted by name.
pub fn dir_snapshot(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.is_file())
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}
