use thiserror::Error;

/// Crate-wide error type. `Constraint` and `SizeCap` map to the CLI exit
/// codes 2 and 3 respectively.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("malformed instance: {0}")]
    Malformed(String),
    #[error("constraint violation: {0}")]
    Constraint(String),
    #[error("size cap exceeded: {0}")]
    SizeCap(String),
    #[error("iteration budget exceeded: best objective {best_objective}")]
    BudgetExceeded {
        best_objective: f64,
        best: Box<crate::model::Transformation>,
    },
    #[error("decode error: {0}")]
    Decode(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit status used by the CLI for this error kind.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Constraint(_) => 2,
            Error::SizeCap(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
