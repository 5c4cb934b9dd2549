use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid polydomain spec: {0}")]
    InvalidSpec(String),
    #[error("index out of range: {0}")]
    Index(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("basis dimension {dim} exceeds cap {cap}")]
    DimensionCap { dim: usize, cap: usize },
    #[error("cross-group commutator {value:.3e} exceeds comm_tol {tol:.3e}")]
    Commutation { value: f64, tol: f64 },
    #[error("tuple is not a member: {0}")]
    NotMember(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no usable truncation tail bound: {0}")]
    NoTailBound(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
