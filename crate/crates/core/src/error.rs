use thiserror::Error;

/// Errors produced by the channel, lattice and capacity routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The inputs lie outside the regime the formula is derived for.
    #[error("regime violation: {0}")]
    RegimeViolation(String),

    #[error("spectral support has no inner (propagating) points")]
    EmptyInnerRegion,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// Negative propagation distances would amplify evanescent modes.
    #[error("negative propagation distance {0} m")]
    NegativeDistance(f64),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("lag ({0}, {1}, {2}) m is not representable on the sample grid")]
    LagOffGrid(f64, f64, f64),

    #[error("ensemble of {got} realisations is too small (need at least {need})")]
    EnsembleTooSmall { got: usize, need: usize },

    #[error("eigendecomposition did not converge")]
    EigenFailure,

    #[error("far-field baseline capacity must be positive, got {0}")]
    NonPositiveBaseline(f64),

    #[error("empty input: {0}")]
    Empty(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
