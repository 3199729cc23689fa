//! Crate-wide error type. Integration failures are errors, never NaN states.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("state diverged (non-finite) at t = {t}")]
    Divergence { t: f64 },

    #[error("step size underflowed at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("step budget of {budget} exhausted at t = {t}")]
    StepBudget { t: f64, budget: u64 },

    #[error("tangent vector collapsed to numerical zero at t = {t}")]
    DegenerateTangent { t: f64 },

    #[error("series too short: {len} samples, need at least {need}")]
    InsufficientData { len: usize, need: usize },

    #[error("malformed csv: {0}")]
    CsvFormat(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code class: 1 for usage/configuration errors, 2 for
    /// numerical or I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParams(_)
            | Error::InvalidConfig(_)
            | Error::InsufficientData { .. }
            | Error::CsvFormat(_) => 1,
            Error::Divergence { .. }
            | Error::StepUnderflow { .. }
            | Error::StepBudget { .. }
            | Error::DegenerateTangent { .. }
            | Error::Io(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
