use thiserror::Error;

/// Failure modes shared by every operation in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    /// An input lies outside the operation's domain (point not interior, zero vector, ...).
    #[error("domain error: {0}")]
    Domain(String),
    /// A body or parameter specification failed validation.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),
    /// The boundary is not smooth where a smooth frame was required.
    #[error("non-smooth boundary point: {0}")]
    NonSmooth(String),
    /// An iteration or quadrature failed to reach its tolerance.
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// The operation is not available for this kind of body.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

impl GeomError {
    /// True for errors caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            GeomError::Domain(_) | GeomError::InvalidSpec(_) | GeomError::Unsupported(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;

pub(crate) fn domain(msg: impl Into<String>) -> GeomError {
    GeomError::Domain(msg.into())
}

pub(crate) fn invalid(msg: impl Into<String>) -> GeomError {
    GeomError::InvalidSpec(msg.into())
}

pub(crate) fn numerical(msg: impl Into<String>) -> GeomError {
    GeomError::Numerical(msg.into())
}

pub(crate) fn unsupported(msg: impl Into<String>) -> GeomError {
    GeomError::Unsupported(msg.into())
}
