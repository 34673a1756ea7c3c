use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported q = {0}: only 0 < q <= 1 is implemented")]
    UnsupportedQ(f64),

    #[error("series did not converge after {terms} terms (last correction {last:e})")]
    NonConvergence { terms: usize, last: f64 },

    #[error("bilateral sum tail not negligible: boundary term {boundary:e} exceeds {threshold:e}")]
    TailNotNegligible { boundary: f64, threshold: f64 },

    #[error("quadrature did not reach tolerance: estimated error {estimate:e} after {intervals} intervals")]
    Quadrature { estimate: f64, intervals: usize },

    #[error("grid spacing {spacing:e} is coarser than the resolution guard {required:e}")]
    GridTooCoarse { spacing: f64, required: f64 },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("test function `{0}` carries no Lipschitz metadata")]
    MissingLipschitz(String),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
