use thiserror::Error;

use crate::properties::PropertyReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("arithmetic error: {0}")]
    Arithmetic(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("layout error: {0}")]
    Layout(String),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A construction refused its input because a required property does not hold.
    #[error("precondition failed: {} does not hold", .0.property)]
    PropertyFailed(Box<PropertyReport>),

    #[error("resource limit: {0}")]
    Resource(String),

    /// Two routes that must agree by theorem did not. Always a bug.
    #[error("internal consistency failure: {0}")]
    Inconsistent(String),
}

impl Error {
    pub(crate) fn layout(msg: impl Into<String>) -> Self {
        Error::Layout(msg.into())
    }
}
