use std::io;
use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied parameter is outside its allowed domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An image or container violates a structural invariant.
    #[error("invalid image: {0}")]
    InvalidImage(String),

    #[error("{path}: missing metadata key `{key}`")]
    MissingKey { path: PathBuf, key: &'static str },

    #[error("{path}:{line}: duplicate metadata key `{key}`")]
    DuplicateKey {
        path: PathBuf,
        line: usize,
        key: String,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("{path}: payload holds {actual} bytes, expected {expected}")]
    PayloadSize {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },

    /// A numeric quantity is undefined for the given data (zero variance, zero percentile, ...).
    #[error("numeric domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

/// Coarse error category, used by front ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Argument,
    Format,
    Numeric,
    Io,
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::InvalidParameter(_) => ErrorKind::Argument,
            Error::InvalidImage(_)
            | Error::MissingKey { .. }
            | Error::DuplicateKey { .. }
            | Error::Parse { .. }
            | Error::PayloadSize { .. }
            | Error::NonFinite { .. }
            | Error::DimensionMismatch { .. } => ErrorKind::Format,
            Error::Domain(_) => ErrorKind::Numeric,
            Error::Io { .. } | Error::Image { .. } => ErrorKind::Io,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn param(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
