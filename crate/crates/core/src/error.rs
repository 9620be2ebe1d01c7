use thiserror::Error;

/// Errors raised by the library.
///
/// Variants split into two families. Input errors (malformed meshes, mismatched
/// operands, out-of-range parameters) mean the caller asked for something that
/// does not make sense. [`Error::Budget`], [`Error::Hypothesis`] and
/// [`Error::NotInvertible`] are honest mathematical outcomes: the construction
/// ran and could not certify its result, or the input does not satisfy the
/// reduction's hypothesis.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("unsupported shape `{0}`")]
    UnsupportedShape(String),
    #[error("resolution must be at least {min}, got {got}")]
    InvalidResolution { min: usize, got: usize },
    #[error("expected {expected} vertex values, found {found}")]
    ValueCount { expected: usize, found: usize },
    #[error("operands live on different meshes")]
    MeshMismatch,
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("division by zero at vertex {vertex}")]
    DivisionByZero { vertex: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("tuple is not certified invertible: {0}")]
    NotInvertible(String),
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("budget exhausted: {0}")]
    Budget(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for outcomes that are mathematical failures rather than bad input.
    pub fn is_honest_failure(&self) -> bool {
        matches!(
            self,
            Error::Budget(_) | Error::Hypothesis(_) | Error::NotInvertible(_)
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
