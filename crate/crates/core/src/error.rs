use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid hyperparameters or window bounds.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// The sampled sum of sines is (numerically) constant on [0, 1].
    #[error("degenerate transform: raw range {range:e} is below {threshold:e}")]
    DegenerateTransform { range: f64, threshold: f64 },

    /// Input values outside the domain an operation accepts.
    #[error("domain error: {0}")]
    Domain(String),

    /// Zero-width intensity window, e.g. a constant MR volume.
    #[error("degenerate image: {0}")]
    DegenerateImage(String),

    #[error("unsupported format: {key} = {value}")]
    UnsupportedFormat { key: String, value: String },

    #[error("size mismatch: expected {expected} bytes of voxel data, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("malformed header in {path}: {msg}")]
    Header { path: PathBuf, msg: String },

    #[error("invalid transform document field `{field}`: {msg}")]
    Parse { field: String, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("png: {0}")]
    Png(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn unsupported(key: impl Into<String>, value: impl ToString) -> Self {
        Error::UnsupportedFormat {
            key: key.into(),
            value: value.to_string(),
        }
    }

    pub(crate) fn parse(field: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            field: field.into(),
            msg: msg.into(),
        }
    }
}
