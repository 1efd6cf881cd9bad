use alloc::string::String;
use alloc::vec::Vec;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("degenerate vector: zero or non-finite norm")]
    DegenerateVector,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// The effect size denominator vanished because every target has the
    /// same association difference. Carries the offending scores.
    #[error("degenerate denominator: all {} association scores are equal", .scores.len())]
    DegenerateDenominator { scores: Vec<f64> },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("token not found in embedding space: {0:?}")]
    MissingToken(String),

    #[error("duplicate token: {0:?}")]
    DuplicateToken(String),
}
