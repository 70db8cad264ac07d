use std::collections::HashSet;

use crate::data::{DatasetManifest, ManifestEntry, Split};
use crate::error::{Error, Result};
use crate::round_half_away;

use super::{BinStructure, SelectionQuotas};

/// Fraction of each bin's picks that go to training.
pub const TRAIN_FRACTION: f64 = 0.90;

/// Disjoint training and validation id lists.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TrueSplit {
    pub train_ids: Vec<String>,
    pub val_ids: Vec<String>,
}

impl TrueSplit {
    pub fn len(&self) -> usize {
        self.train_ids.len() + self.val_ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Manifest with the training entries followed by the validation entries of `source`.
    /// Paths are made absolute so the result can be written anywhere.
    pub fn to_manifest(&self, source: &DatasetManifest) -> Result<DatasetManifest> {
        let mut entries = Vec::with_capacity(self.len());
        for (ids, split) in [(&self.train_ids, Split::Train), (&self.val_ids, Split::Val)] {
            for id in ids {
                let entry = source.get(id).ok_or_else(|| {
                    Error::InvalidParameter(format!("id `{id}` is not in the manifest"))
                })?;
                entries.push(ManifestEntry {
                    id: id.clone(),
                    image_path: source.resolve_absolute(&entry.image_path)?,
                    mask_path: entry
                        .mask_path
                        .as_deref()
                        .map(|p| source.resolve_absolute(p))
                        .transpose()?,
                    split,
                });
            }
        }
        let root = std::path::absolute(source.root()).map_err(|e| Error::io(source.root(), e))?;
        DatasetManifest::new(root, entries)
    }
}

/// Picks `count` indices of `0..len` at `round(z * jump + jump / 2)`, clamped to the last
/// index. A taken index advances to the next free one, wrapping around.
fn spaced_picks(len: usize, count: usize, jump: f64, taken: &mut [bool]) -> Vec<usize> {
    debug_assert!(count <= taken.iter().filter(|t| !**t).count());
    let mut picks = Vec::with_capacity(count);
    for z in 0..count {
        let raw = round_half_away(z as f64 * jump + jump / 2.0).max(0) as usize;
        let mut idx = raw.min(len - 1);
        while taken[idx] {
            idx = (idx + 1) % len;
        }
        taken[idx] = true;
        picks.push(idx);
    }
    picks
}

/// Splits each bin's quota 90/10 into training and validation picks spread across the bin.
///
/// Bins are visited in index order. Validation picks come first and are removed from the
/// bin; training picks are spread over what remains. When the training stride rounds to 1
/// the whole remainder is taken.
pub fn select_true_images(bins: &BinStructure, quotas: &SelectionQuotas) -> TrueSplit {
    let mut split = TrueSplit::default();
    for (b, members) in bins.members.iter().enumerate() {
        let quota = quotas.select_mapping.get(b).copied().unwrap_or(0);
        let total = quota.min(members.len());
        if total == 0 {
            continue;
        }
        let n_train = round_half_away(total as f64 * TRAIN_FRACTION) as usize;
        let n_val = total - n_train;

        let mut taken = vec![false; members.len()];
        if n_val > 0 {
            let jump = round_half_away(members.len() as f64 / n_val as f64) as f64;
            let mut picks = spaced_picks(members.len(), n_val, jump, &mut taken);
            picks.sort_unstable();
            split
                .val_ids
                .extend(picks.into_iter().map(|i| members[i].clone()));
        }
        let cleaned: Vec<&String> = members
            .iter()
            .zip(&taken)
            .filter(|(_, &t)| !t)
            .map(|(m, _)| m)
            .collect();
        if n_train == 0 {
            continue;
        }
        let jump = round_half_away(cleaned.len() as f64 / n_train as f64);
        if jump <= 1 {
            split.train_ids.extend(cleaned.into_iter().cloned());
        } else {
            let mut taken = vec![false; cleaned.len()];
            let mut picks = spaced_picks(cleaned.len(), n_train, jump as f64, &mut taken);
            picks.sort_unstable();
            split
                .train_ids
                .extend(picks.into_iter().map(|i| cleaned[i].clone()));
        }
    }
    split
}

/// Sorted-id 90/10 split of every non-test entry, validation ids evenly spaced.
pub fn allset_split(manifest: &DatasetManifest, ratio: f64) -> Result<TrueSplit> {
    if !(ratio > 0.0 && ratio <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "train ratio {ratio} outside (0, 1]"
        )));
    }
    let mut ids: Vec<&str> = manifest
        .entries()
        .iter()
        .filter(|e| e.split != Split::Test)
        .map(|e| e.id.as_str())
        .collect();
    if ids.is_empty() {
        return Err(Error::InvalidParameter(
            "manifest has no train-eligible entries".into(),
        ));
    }
    if ids.len() < 2 {
        return Err(Error::InvalidParameter(
            "a split needs at least 2 entries".into(),
        ));
    }
    ids.sort_unstable();
    let n = ids.len();
    let n_train = (round_half_away(n as f64 * ratio).max(0) as usize).min(n);
    let n_val = n - n_train;
    let mut taken = vec![false; n];
    if n_val > 0 {
        spaced_picks(n, n_val, n as f64 / n_val as f64, &mut taken);
    }
    let mut split = TrueSplit::default();
    for (id, t) in ids.into_iter().zip(taken) {
        if t {
            split.val_ids.push(id.to_owned());
        } else {
            split.train_ids.push(id.to_owned());
        }
    }
    Ok(split)
}

/// Checks the structural invariants every split must satisfy.
pub fn check_split(split: &TrueSplit, universe: &[String]) -> Result<()> {
    let all: HashSet<&str> = universe.iter().map(String::as_str).collect();
    let mut seen = HashSet::new();
    for id in split.train_ids.iter().chain(&split.val_ids) {
        if !all.contains(id.as_str()) {
            return Err(Error::InvalidParameter(format!(
                "`{id}` is not an input id"
            )));
        }
        if !seen.insert(id.as_str()) {
            return Err(Error::DuplicateId(id.clone()));
        }
    }
    Ok(())
}
