use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("invalid id `{0}`: ids must match [A-Za-z0-9._-]+")]
    InvalidId(String),
    #[error("cannot decode image {path}: {message}")]
    Image { path: PathBuf, message: String },
    #[error("image {0} has zero width or height")]
    EmptyImage(PathBuf),
    #[error("feature table: bad magic {0:?}, expected \"TDF1\"")]
    BadMagic([u8; 4]),
    #[error("feature table: truncated file ({0})")]
    Truncated(&'static str),
    #[error("feature table: id `{0}...` is longer than 65535 bytes")]
    IdTooLong(String),
    #[error("feature table: {0}")]
    InvalidTable(String),
    #[error("no features for id `{0}`")]
    MissingFeatures(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("data has zero variance; PCA is undefined")]
    DegenerateVariance,
    #[error("non-finite value in input: {0}")]
    NonFinite(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown {kind} `{name}` (available: {available})")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
