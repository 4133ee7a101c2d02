use alloc::string::String;

/// Errors raised by the core crate. All of them describe invalid input;
/// numerical routines never fail on valid input.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("group mismatch: {0}")]
    GroupMismatch(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("set `{0}` must be nonempty")]
    EmptySet(&'static str),

    #[error("set V must be symmetric (V = -V)")]
    NotSymmetric,

    #[error("set V must contain the identity")]
    MissingIdentity,

    #[error("evaluation domain does not cover the required window: {0}")]
    DomainTooSmall(String),

    #[error("observable is not compatible with the system: {0}")]
    IncompatibleObservable(String),

    #[error("eigenbasis failed verification: {0}")]
    UnverifiedBasis(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
