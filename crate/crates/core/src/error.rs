use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("singular evaluation: {0}")]
    Singularity(String),
    #[error("point outside admissible region: {0}")]
    Domain(String),
    #[error("symbol vanishes: {0}")]
    NonFredholm(String),
    #[error("phase under-resolved: {0}")]
    Resolution(String),
    #[error("calibration failed: {0}")]
    Calibration(String),
    #[error("aliasing: {0}")]
    Aliasing(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
