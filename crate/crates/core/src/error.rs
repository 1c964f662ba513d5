use thiserror::Error;

/// Errors produced by graph construction, data ingestion, scoring, and search.
#[derive(Debug, Error)]
pub enum Error {
    #[error("edges form a directed cycle")]
    Cycle,
    #[error("invalid edge {parent} -> {child}: {reason}")]
    InvalidEdge {
        parent: usize,
        child: usize,
        reason: &'static str,
    },
    #[error("{what} of {value} exceeds the supported maximum of {max}")]
    TooLarge {
        what: &'static str,
        value: usize,
        max: usize,
    },
    #[error("size mismatch: {0}")]
    SizeMismatch(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("dataset contains no rows")]
    EmptyData,
    #[error("explosion spec mismatch: {0}")]
    SpecMismatch(String),
    #[error("policy mismatch: {0}")]
    PolicyMismatch(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("variable sets overlap")]
    Overlap,
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
