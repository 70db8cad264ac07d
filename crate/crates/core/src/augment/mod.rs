//! Ground-truth augmentation.
//!
//! Each generator is an [`Augmenter`] registered under its mode name:
//!
//! | mode  | variants per mask                                   |
//! |-------|-----------------------------------------------------|
//! | `sw`  | one dilation per kernel (default 3, 5, 8)           |
//! | `sl`  | one randomly masked copy                            |
//! | `ss`  | one up-scaled dilation per kernel (default ×4)      |
//! | `mix` | dilations with the mix kernels (3, 5) + one masked  |

mod generators;
mod rng;

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

pub use generators::{
    mix, random_masking, scale_space, side_range, stochastic_width, MaskingThresholds,
    MAX_SAMPLING_TRIALS,
};
pub use rng::{fnv1a64, image_seed, RandomSource, SeededRng};

use crate::data::{read_mask, write_mask, BinaryMask, DatasetManifest, ManifestEntry, Split};
use crate::error::{Error, Result};
use crate::imageops::Kernel;
use crate::registry::Registry;
use crate::select::TrueSplit;

/// Generator parameters shared by every mode.
#[derive(Debug, Clone, PartialEq)]
pub struct AugmentSpec {
    pub kernels: Vec<usize>,
    pub mix_kernels: Vec<usize>,
    pub scale: usize,
    pub thresholds: MaskingThresholds,
    pub seed: u64,
}

impl Default for AugmentSpec {
    fn default() -> Self {
        AugmentSpec {
            kernels: vec![3, 5, 8],
            mix_kernels: vec![3, 5],
            scale: 4,
            thresholds: MaskingThresholds::default(),
            seed: 0,
        }
    }
}

fn to_kernels(sizes: &[usize]) -> Result<Vec<Kernel>> {
    if sizes.is_empty() {
        return Err(Error::InvalidParameter(
            "at least one kernel is required".into(),
        ));
    }
    sizes.iter().map(|&s| Kernel::new(s)).collect()
}

pub trait Augmenter: Send + Sync {
    fn name(&self) -> &'static str;

    /// Number of masks [`augment`](Self::augment) returns per input.
    fn variants(&self) -> usize;

    fn augment(&self, mask: &BinaryMask, rng: &mut dyn RandomSource) -> Vec<BinaryMask>;
}

pub struct StochasticWidth {
    kernels: Vec<Kernel>,
}

impl Augmenter for StochasticWidth {
    fn name(&self) -> &'static str {
        "sw"
    }

    fn variants(&self) -> usize {
        self.kernels.len()
    }

    fn augment(&self, mask: &BinaryMask, _rng: &mut dyn RandomSource) -> Vec<BinaryMask> {
        stochastic_width(mask, &self.kernels)
    }
}

pub struct StochasticLength {
    thresholds: MaskingThresholds,
}

impl Augmenter for StochasticLength {
    fn name(&self) -> &'static str {
        "sl"
    }

    fn variants(&self) -> usize {
        1
    }

    fn augment(&self, mask: &BinaryMask, rng: &mut dyn RandomSource) -> Vec<BinaryMask> {
        vec![random_masking(mask, &self.thresholds, rng)]
    }
}

pub struct ScaleSpace {
    kernels: Vec<Kernel>,
    scale: usize,
}

impl Augmenter for ScaleSpace {
    fn name(&self) -> &'static str {
        "ss"
    }

    fn variants(&self) -> usize {
        self.kernels.len()
    }

    fn augment(&self, mask: &BinaryMask, _rng: &mut dyn RandomSource) -> Vec<BinaryMask> {
        scale_space(mask, &self.kernels, self.scale).expect("scale validated at construction")
    }
}

pub struct Mix {
    kernels: Vec<Kernel>,
    thresholds: MaskingThresholds,
}

impl Augmenter for Mix {
    fn name(&self) -> &'static str {
        "mix"
    }

    fn variants(&self) -> usize {
        self.kernels.len() + 1
    }

    fn augment(&self, mask: &BinaryMask, rng: &mut dyn RandomSource) -> Vec<BinaryMask> {
        mix(mask, &self.kernels, &self.thresholds, rng)
    }
}

pub type AugmenterFactory = Box<dyn Fn(&AugmentSpec) -> Result<Box<dyn Augmenter>> + Send + Sync>;

/// Registry with the `sw`, `sl`, `ss` and `mix` generators.
pub fn augmenter_registry() -> Registry<AugmenterFactory> {
    let mut reg: Registry<AugmenterFactory> = Registry::new("augmentation mode");
    reg.register(
        "sw",
        Box::new(|spec| {
            Ok(Box::new(StochasticWidth {
                kernels: to_kernels(&spec.kernels)?,
            }))
        }),
    );
    reg.register(
        "sl",
        Box::new(|spec| {
            spec.thresholds.validate()?;
            Ok(Box::new(StochasticLength {
                thresholds: spec.thresholds,
            }))
        }),
    );
    reg.register(
        "ss",
        Box::new(|spec| {
            if spec.scale < 2 {
                return Err(Error::InvalidParameter(format!(
                    "scale must be at least 2, got {}",
                    spec.scale
                )));
            }
            Ok(Box::new(ScaleSpace {
                kernels: to_kernels(&spec.kernels)?,
                scale: spec.scale,
            }))
        }),
    );
    reg.register(
        "mix",
        Box::new(|spec| {
            spec.thresholds.validate()?;
            Ok(Box::new(Mix {
                kernels: to_kernels(&spec.mix_kernels)?,
                thresholds: spec.thresholds,
            }))
        }),
    );
    reg
}

/// Looks up `mode` in the default registry and builds it from `spec`.
pub fn augmenter(mode: &str, spec: &AugmentSpec) -> Result<Box<dyn Augmenter>> {
    (augmenter_registry().get(mode)?)(spec)
}

/// File name of variant `index` of image `id`.
pub fn variant_file_name(id: &str, mode: &str, index: usize) -> String {
    format!("{id}__{mode}{index}.png")
}

/// Options for [`build_augmented_manifest`].
#[derive(Debug, Clone, Default)]
pub struct AssemblyOptions {
    /// Masks store background as bright pixels; read and write them inverted.
    pub invert_masks: bool,
}

/// Augments every training mask of `split`, writes the variants into `out_dir`, and returns
/// a manifest of the originals, their variants (paired with the original image) and the
/// untouched validation entries.
///
/// Work is spread over the current rayon pool; outputs do not depend on its size.
pub fn build_augmented_manifest(
    split: &TrueSplit,
    augmenter: &dyn Augmenter,
    seed: u64,
    source: &DatasetManifest,
    out_dir: &Path,
    options: &AssemblyOptions,
) -> Result<DatasetManifest> {
    fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let out_root = std::path::absolute(out_dir).map_err(|e| Error::io(out_dir, e))?;
    let mode = augmenter.name();

    let lookup = |id: &str| {
        source
            .get(id)
            .ok_or_else(|| Error::InvalidParameter(format!("id `{id}` is not in the manifest")))
    };
    let copy_entry = |entry: &ManifestEntry, split: Split| -> Result<ManifestEntry> {
        Ok(ManifestEntry {
            id: entry.id.clone(),
            image_path: source.resolve_absolute(&entry.image_path)?,
            mask_path: entry
                .mask_path
                .as_deref()
                .map(|p| source.resolve_absolute(p))
                .transpose()?,
            split,
        })
    };

    let groups: Vec<Vec<ManifestEntry>> = split
        .train_ids
        .par_iter()
        .map(|id| {
            let entry = lookup(id)?;
            let mask_path = source.mask_path(entry).ok_or_else(|| {
                Error::InvalidParameter(format!("training entry `{id}` has no mask"))
            })?;
            let mut mask = read_mask(&mask_path)?;
            if options.invert_masks {
                mask = mask.inverted();
            }
            let mut rng = SeededRng::for_image(seed, id);
            let variants = augmenter.augment(&mask, &mut rng);
            debug_assert_eq!(variants.len(), augmenter.variants());

            let original = copy_entry(entry, Split::Train)?;
            let mut group = Vec::with_capacity(1 + variants.len());
            for (index, variant) in variants.iter().enumerate() {
                let file = variant_file_name(id, mode, index);
                let stored = if options.invert_masks {
                    variant.inverted()
                } else {
                    variant.clone()
                };
                write_mask(&stored, out_root.join(&file))?;
                group.push(ManifestEntry {
                    id: format!("{id}__{mode}{index}"),
                    image_path: original.image_path.clone(),
                    mask_path: Some(PathBuf::from(file)),
                    split: Split::Train,
                });
            }
            group.insert(0, original);
            Ok(group)
        })
        .collect::<Result<_>>()?;

    let mut entries: Vec<ManifestEntry> = groups.into_iter().flatten().collect();
    for id in &split.val_ids {
        entries.push(copy_entry(lookup(id)?, Split::Val)?);
    }
    DatasetManifest::new(out_root, entries)
}
