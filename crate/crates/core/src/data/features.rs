use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const TDF1_MAGIC: &[u8; 4] = b"TDF1";

/// Per-image feature vectors, one row per id.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTable {
    ids: Vec<String>,
    dim: usize,
    values: Vec<f32>,
}

impl FeatureTable {
    pub fn new(ids: Vec<String>, dim: usize, values: Vec<f32>) -> Result<Self> {
        if values.len() != ids.len() * dim {
            return Err(Error::InvalidTable(format!(
                "{} values for {} rows of dimension {}",
                values.len(),
                ids.len(),
                dim
            )));
        }
        let mut seen = HashSet::with_capacity(ids.len());
        for id in &ids {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateId(id.clone()));
            }
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(format!(
                "feature {} of `{}`",
                pos % dim.max(1),
                ids[pos / dim.max(1)]
            )));
        }
        Ok(FeatureTable { ids, dim, values })
    }

    pub fn from_rows(rows: Vec<(String, Vec<f32>)>) -> Result<Self> {
        let dim = rows.first().map_or(0, |(_, v)| v.len());
        let mut ids = Vec::with_capacity(rows.len());
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (id, row) in rows {
            if row.len() != dim {
                return Err(Error::InvalidTable(format!(
                    "row `{id}` has {} values, expected {dim}",
                    row.len()
                )));
            }
            ids.push(id);
            values.extend(row);
        }
        Self::new(ids, dim, values)
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &[f32])> {
        self.ids
            .iter()
            .enumerate()
            .map(move |(i, id)| (id.as_str(), self.row(i)))
    }

    /// Reorders rows to follow `ids`, failing on the first id without a row.
    pub fn select(&self, ids: &[&str]) -> Result<FeatureTable> {
        let index: HashMap<&str, usize> = self
            .ids
            .iter()
            .enumerate()
            .map(|(i, id)| (id.as_str(), i))
            .collect();
        let mut values = Vec::with_capacity(ids.len() * self.dim);
        for id in ids {
            let &i = index
                .get(id)
                .ok_or_else(|| Error::MissingFeatures((*id).to_owned()))?;
            values.extend_from_slice(self.row(i));
        }
        FeatureTable::new(
            ids.iter().map(|s| (*s).to_owned()).collect(),
            self.dim,
            values,
        )
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let n = u32::try_from(self.len())
            .map_err(|_| Error::InvalidTable("more than u32::MAX rows".into()))?;
        let d = u32::try_from(self.dim)
            .map_err(|_| Error::InvalidTable("dimension exceeds u32::MAX".into()))?;
        let mut out = Vec::with_capacity(12 + self.len() * (2 + 4 * self.dim));
        out.extend_from_slice(TDF1_MAGIC);
        out.extend_from_slice(&n.to_le_bytes());
        out.extend_from_slice(&d.to_le_bytes());
        for (id, row) in self.rows() {
            let len = u16::try_from(id.len())
                .map_err(|_| Error::IdTooLong(id.chars().take(32).collect()))?;
            out.extend_from_slice(&len.to_le_bytes());
            out.extend_from_slice(id.as_bytes());
            for v in row {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<FeatureTable> {
        let mut cur = Cursor { bytes, pos: 0 };
        let magic: [u8; 4] = cur.take(4, "magic")?.try_into().unwrap();
        if &magic != TDF1_MAGIC {
            return Err(Error::BadMagic(magic));
        }
        let n = cur.u32("row count")? as usize;
        let dim = cur.u32("dimension")? as usize;
        let mut ids = Vec::with_capacity(n.min(1 << 16));
        let mut values = Vec::with_capacity(n.saturating_mul(dim).min(1 << 24));
        for _ in 0..n {
            let len = u16::from_le_bytes(cur.take(2, "id length")?.try_into().unwrap());
            let raw = cur.take(len as usize, "id bytes")?;
            let id = std::str::from_utf8(raw)
                .map_err(|_| Error::InvalidTable("id is not valid UTF-8".into()))?;
            ids.push(id.to_owned());
            let payload = cur.take(dim * 4, "feature values")?;
            values.extend(
                payload
                    .chunks_exact(4)
                    .map(|c| f32::from_le_bytes(c.try_into().unwrap())),
            );
        }
        if cur.pos != bytes.len() {
            return Err(Error::InvalidTable(format!(
                "{} trailing bytes after {n} records",
                bytes.len() - cur.pos
            )));
        }
        FeatureTable::new(ids, dim, values)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, len: usize, what: &'static str) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(len).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or(Error::Truncated(what))?;
        let out = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(out)
    }

    fn u32(&mut self, what: &'static str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }
}

pub fn read_feature_table(path: impl AsRef<Path>) -> Result<FeatureTable> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    FeatureTable::from_bytes(&bytes)
}

pub fn write_feature_table(table: &FeatureTable, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = table.to_bytes()?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
