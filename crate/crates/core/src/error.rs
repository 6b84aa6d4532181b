use thiserror::Error;

use crate::fock::TruncationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("path does not close: net displacement {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    OpenPath { residual: f64, tolerance: f64 },

    #[error("step bound violated: dt*gamma = {dt_gamma:.3e} > {bound:.3e}")]
    StepBound { dt_gamma: f64, bound: f64 },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("Fock truncation inadequate: {0}")]
    Truncation(TruncationReport),

    #[error("Fock dimension {available} too small for amplitude {amplitude:.3}: need at least {required}")]
    FockDimension { amplitude: f64, required: usize, available: usize },

    #[error("numerical invariant violated: {0}")]
    Invariant(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }

    /// Process exit status for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::InvalidParameter { .. } | Error::OpenPath { .. } => 2,
            Error::StepBound { .. } => 2,
            Error::NonFinite(_) | Error::Invariant(_) => 3,
            Error::Truncation(_) | Error::FockDimension { .. } => 4,
            Error::Io(_) => 1,
        }
    }
}

/// Rejects NaN/Inf so that it cannot leak into sweeps or quadrature sums.
pub(crate) fn finite(value: f64, what: &'static str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(what))
    }
}
