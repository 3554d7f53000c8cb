use std::fmt;

/// Library-wide error type.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A structural hypothesis on the input is violated. The message names
    /// the violated hypothesis (e.g. "level must be squarefree").
    InvalidParameter(String),
    /// A closed form was requested at a parameter where it degenerates
    /// (e.g. the intertwining constant at q^{2s} = χ²(p)).
    Singular(String),
    /// A stabilized sum or adaptive quadrature failed its own convergence
    /// check; the value cannot be trusted.
    NotConverged(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidParameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::Singular(msg) => write!(f, "singular parameter: {msg}"),
            Error::NotConverged(msg) => write!(f, "did not converge: {msg}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}

pub(crate) fn singular(msg: impl Into<String>) -> Error {
    Error::Singular(msg.into())
}
