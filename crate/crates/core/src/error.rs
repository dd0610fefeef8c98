use thiserror::Error;

/// Failure modes shared by every numerical routine in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A grid, bracket or other numerical setting is unusable.
    #[error("configuration error: {0}")]
    Config(String),
    /// An input does not satisfy a normalization the operation relies on.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The input sits too close to the extremal manifold for a ratio to be meaningful.
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
