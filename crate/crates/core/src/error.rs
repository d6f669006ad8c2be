use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// `Ker Phi ∩ G_J` is not trivial. `deficiency` is the dimension of the intersection.
    #[error("condition H_J violated: Ker Phi meets the cospace in {deficiency} dimension(s)")]
    HjViolated { deficiency: usize },

    #[error("condition H_0 violated: Ker Phi ∩ Ker D* is not trivial")]
    H0Violated,

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("support size {size} exceeds the enumeration cap {cap}")]
    EnumerationCap { size: usize, cap: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by an unmet mathematical precondition
    /// (as opposed to bad input or I/O).
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::HjViolated { .. }
                | Error::H0Violated
                | Error::RankDeficient(_)
                | Error::NotApplicable(_)
                | Error::EnumerationCap { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
