//! Error type shared across the toolkit.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("matrix dimension {dim} exceeds the desk-scale maximum {max}")]
    TooLarge { dim: usize, max: usize },
    #[error("matrix not Hermitian: max |m - m^dag| = {dev:.3e}")]
    NotHermitian { dev: f64 },
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("objective returned a non-finite value at evaluation {at}")]
    NonFinite { at: usize },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
