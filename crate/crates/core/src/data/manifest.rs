use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Split {
    Train,
    Val,
    Test,
    Unassigned,
}

impl Split {
    pub fn as_str(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Val => "val",
            Split::Test => "test",
            Split::Unassigned => "unassigned",
        }
    }
}

impl fmt::Display for Split {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Split {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "train" => Ok(Split::Train),
            "val" => Ok(Split::Val),
            "test" => Ok(Split::Test),
            "unassigned" => Ok(Split::Unassigned),
            other => Err(format!(
                "unknown split `{other}` (expected train, val, test or unassigned)"
            )),
        }
    }
}

/// One image of a dataset. Paths are relative to the manifest root unless absolute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub id: String,
    pub image_path: PathBuf,
    pub mask_path: Option<PathBuf>,
    pub split: Split,
}

impl ManifestEntry {
    pub fn new(
        id: impl Into<String>,
        image_path: impl Into<PathBuf>,
        mask_path: Option<PathBuf>,
        split: Split,
    ) -> Self {
        ManifestEntry {
            id: id.into(),
            image_path: image_path.into(),
            mask_path,
            split,
        }
    }
}

pub(crate) fn is_valid_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'.' | b'_' | b'-'))
}

/// Ordered list of dataset entries with unique ids.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DatasetManifest {
    root: PathBuf,
    entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    pub fn new(root: impl Into<PathBuf>, entries: Vec<ManifestEntry>) -> Result<Self> {
        let mut seen = HashSet::with_capacity(entries.len());
        for entry in &entries {
            if !is_valid_id(&entry.id) {
                return Err(Error::InvalidId(entry.id.clone()));
            }
            if !seen.insert(entry.id.as_str()) {
                return Err(Error::DuplicateId(entry.id.clone()));
            }
        }
        Ok(DatasetManifest {
            root: root.into(),
            entries,
        })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn entries(&self) -> &[ManifestEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.id == id)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.id.as_str())
    }

    /// Resolves a manifest-relative path against the root.
    pub fn resolve(&self, path: &Path) -> PathBuf {
        if path.is_absolute() {
            path.to_path_buf()
        } else {
            self.root.join(path)
        }
    }

    /// Like [`resolve`](Self::resolve), but always returns an absolute path.
    pub fn resolve_absolute(&self, path: &Path) -> Result<PathBuf> {
        let joined = self.resolve(path);
        std::path::absolute(&joined).map_err(|e| Error::io(joined, e))
    }

    pub fn image_path(&self, entry: &ManifestEntry) -> PathBuf {
        self.resolve(&entry.image_path)
    }

    pub fn mask_path(&self, entry: &ManifestEntry) -> Option<PathBuf> {
        entry.mask_path.as_deref().map(|p| self.resolve(p))
    }

    /// Checks that every mask has the same width and height as its image.
    pub fn validate_dimensions(&self) -> Result<()> {
        for entry in &self.entries {
            let Some(mask) = self.mask_path(entry) else {
                continue;
            };
            let image = self.image_path(entry);
            let image_dims = dimensions(&image)?;
            let mask_dims = dimensions(&mask)?;
            if image_dims != mask_dims {
                return Err(Error::DimensionMismatch(format!(
                    "entry `{}`: image is {}x{}, mask is {}x{}",
                    entry.id, image_dims.0, image_dims.1, mask_dims.0, mask_dims.1
                )));
            }
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let mask = e
                .mask_path
                .as_ref()
                .map(|p| p.display().to_string())
                .unwrap_or_else(|| "-".to_owned());
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\n",
                e.id,
                e.image_path.display(),
                mask,
                e.split
            ));
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        fs::write(path, self.to_text()).map_err(|e| Error::io(path, e))
    }

    /// Parses manifest text. `source` only labels error messages.
    pub fn parse(text: &str, root: impl Into<PathBuf>, source: &Path) -> Result<Self> {
        let mut entries = Vec::new();
        let mut seen = HashSet::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.strip_suffix('\r').unwrap_or(raw);
            if line.trim().is_empty() || line.starts_with('#') {
                continue;
            }
            let parse_err = |message: String| Error::Parse {
                path: source.to_path_buf(),
                line: line_no,
                message,
            };
            let fields: Vec<&str> = line.split('\t').collect();
            if fields.len() != 4 {
                return Err(parse_err(format!(
                    "expected 4 tab-separated fields, found {}",
                    fields.len()
                )));
            }
            let id = fields[0];
            if !is_valid_id(id) {
                return Err(parse_err(format!(
                    "invalid id `{id}`: ids must match [A-Za-z0-9._-]+"
                )));
            }
            if !seen.insert(id.to_owned()) {
                return Err(Error::DuplicateId(id.to_owned()));
            }
            if fields[1].is_empty() {
                return Err(parse_err("empty image path".to_owned()));
            }
            let mask_path = match fields[2] {
                "-" | "" => None,
                p => Some(PathBuf::from(p)),
            };
            let split = fields[3].parse::<Split>().map_err(parse_err)?;
            entries.push(ManifestEntry::new(id, fields[1], mask_path, split));
        }
        Ok(DatasetManifest {
            root: root.into(),
            entries,
        })
    }
}

fn dimensions(path: &Path) -> Result<(u32, u32)> {
    image::image_dimensions(path).map_err(|e| Error::Image {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Reads a manifest file. Relative paths inside it resolve against the file's directory.
pub fn load_manifest(path: impl AsRef<Path>) -> Result<DatasetManifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let root = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    DatasetManifest::parse(&text, root, path)
}
