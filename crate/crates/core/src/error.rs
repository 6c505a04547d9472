use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the clustering library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller broke an operation's preconditions (dimension mismatch,
    /// out-of-range value, unassigned entry where none is allowed).
    #[error("contract violation: {0}")]
    Contract(String),

    /// Invalid hyperparameter or scan configuration.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// Malformed input data, located by 1-based row and column where known.
    #[error("data error at row {row}, column {column}: {message}")]
    Data {
        row: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn contract(msg: impl Into<String>) -> Error {
    Error::Contract(msg.into())
}
