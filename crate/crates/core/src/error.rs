use thiserror::Error;

/// Errors raised by the library. Certificate failures are not errors; they are
/// reported as `false` verdicts by the verification routines.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("field mismatch: expected GF({expected}), found GF({found})")]
    FieldMismatch { expected: u32, found: u32 },
    #[error("{0} is not a prime characteristic")]
    NotPrime(u32),
    #[error("index {index} out of range for barcode of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("invalid block: {0}")]
    InvalidBlock(String),
    #[error("invalid matching: {0}")]
    InvalidMatching(String),
    #[error("negative parameter: {0}")]
    Negative(String),
    #[error("zigzag orientation: {0}")]
    Orientation(String),
    #[error("non-commuting diagram: {0}")]
    NotCommutative(String),
    #[error("window: {0}")]
    Window(String),
    #[error("invalid graph: {}", .0.join("; "))]
    InvalidGraph(Vec<String>),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, Error>;
