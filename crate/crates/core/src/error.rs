use thiserror::Error;

use crate::numeric::ParseRationalError;

#[derive(Debug, Error)]
pub enum Error {
    /// A precondition on an argument does not hold.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// Exhaustive enumeration would exceed the configured cap.
    #[error("instance too large: {profiles} profiles exceed the limit of {limit}")]
    TooLarge { profiles: String, limit: u64 },

    /// The model itself is inconsistent (e.g. no feasible state).
    #[error("model error: {0}")]
    Model(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Input data violates the model; `field` names the offending item.
    #[error("invalid `{field}`: {message}")]
    Invalid { field: String, message: String },

    #[error(transparent)]
    Rational(#[from] ParseRationalError),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}

pub(crate) fn invalid<T>(field: impl Into<String>, message: impl Into<String>) -> Result<T> {
    Err(Error::Invalid {
        field: field.into(),
        message: message.into(),
    })
}
