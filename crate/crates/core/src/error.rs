use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("kernel rejected: sampled max {quantity} = {value:.6e} exceeds 1")]
    KernelBounds { quantity: &'static str, value: f64 },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("extrapolation: x = {x} outside sampled extent [{lo}, {hi}]")]
    Extrapolation { x: f64, lo: f64, hi: f64 },

    #[error("non-finite state at t = {t}")]
    BlowUp { t: f64 },

    #[error("step size: {0}")]
    StepSize(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("validation failed ({constraint}): {detail}")]
    Validation { constraint: String, detail: String },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("geometry mismatch: {0}")]
    Geometry(String),

    #[error("corrupt snapshot: {0}")]
    CorruptSnapshot(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(constraint: &str, detail: impl Into<String>) -> Self {
        Error::Validation {
            constraint: constraint.to_string(),
            detail: detail.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
