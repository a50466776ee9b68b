use thiserror::Error;

/// Failures raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("input outside the admissible domain: {0}")]
    InputDomain(String),

    #[error("derivative requested at a nonsmooth point: {0}")]
    NonsmoothPoint(String),

    #[error("accuracy budget exhausted: best estimate {value:e} with error {error:e}")]
    Accuracy { value: f64, error: f64 },

    #[error("degenerate spectral density: {0}")]
    DegenerateDensity(String),

    #[error("degenerate construction: {0}")]
    DegenerateConstruction(String),

    #[error("search failed: {0}")]
    SearchFailure(String),

    #[error("truncation remainder cannot be bounded below tolerance: {0}")]
    TruncationUnattainable(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InputDomain(msg.into()))
}
