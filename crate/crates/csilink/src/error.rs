use thiserror::Error;

/// Errors produced by the algebraic and numerical layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("target is not contractible: {0}")]
    NotContractible(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("non-finite sample at index {index}: {detail}")]
    NonFiniteSample { index: u64, detail: String },

    #[error("cannot reduce: {0}")]
    Irreducible(String),

    #[error("{0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
