//! Error types shared across the crate.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// Parser rejected the input; position is a byte offset.
    Parse { pos: usize, msg: String },
    /// Operation requires a univariate polynomial.
    NotUnivariate,
    /// Operation requires a nonzero polynomial.
    ZeroPolynomial,
    /// Mismatched variable counts between operands.
    DimensionMismatch { left: usize, right: usize },
    /// Branch-and-bound budget exhausted before the requested tolerance.
    BudgetExhausted(String),
    /// A pipeline stage could not establish its contract.
    Stage { stage: String, detail: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse { pos, msg } => write!(f, "parse error at byte {pos}: {msg}"),
            Error::NotUnivariate => write!(f, "polynomial is not univariate"),
            Error::ZeroPolynomial => write!(f, "zero polynomial not allowed here"),
            Error::DimensionMismatch { left, right } => {
                write!(f, "variable count mismatch: {left} vs {right}")
            }
            Error::BudgetExhausted(what) => write!(f, "bound budget exhausted: {what}"),
            Error::Stage { stage, detail } => write!(f, "stage `{stage}` failed: {detail}"),
        }
    }
}

impl std::error::Error for Error {}

impl Error {
    pub fn stage(stage: &str, detail: impl Into<String>) -> Self {
        Error::Stage {
            stage: stage.to_string(),
            detail: detail.into(),
        }
    }
}
