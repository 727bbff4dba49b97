use thiserror::Error;

/// Errors surfaced by the analysis kit.
#[derive(Debug, Error)]
pub enum KitError {
    #[error("unknown user id {0}")]
    UnknownUser(u32),
    #[error("invalid scenario: {0}")]
    Validation(String),
    #[error("ground set too large: {got} users exceeds the cap of {cap}")]
    TooLarge { got: usize, cap: usize },
    #[error("unsupported for this backend: {0}")]
    Unsupported(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, KitError>;
