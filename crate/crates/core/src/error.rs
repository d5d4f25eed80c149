use thiserror::Error;

/// Structural errors. Mathematical refutations are never errors; they are
/// reported through [`crate::Verdict::Fails`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("arity mismatch: expected {expected}, found {found}")]
    ArityMismatch { expected: usize, found: usize },
    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: String, right: String },
    #[error("degree {degree} exceeds truncation {truncation}")]
    OutOfRange { degree: String, truncation: String },
    #[error("malformed cell reference: {0}")]
    MalformedCell(String),
    #[error("not a map of presheaves: {0}")]
    NotNatural(String),
    #[error("maps do not share a {0}")]
    Mismatch(&'static str),
    #[error("invalid shape parameters: {0}")]
    InvalidSpec(String),
    #[error("unsupported reindexing: {0}")]
    UnsupportedFunctor(String),
    #[error("unsound truncation request: {0}")]
    UnsoundBound(String),
    #[error("search limit of {0} nodes exceeded")]
    SearchLimit(u64),
    #[error("square does not commute: {0}")]
    NonCommuting(String),
    #[error("invalid category: {0}")]
    InvalidCategory(String),
    #[error("functoriality violated: {0}")]
    NotFunctorial(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("refused: {0}")]
    Refused(String),
}

pub type Result<T> = std::result::Result<T, Error>;
