use thiserror::Error;

/// Error taxonomy shared by every module.
///
/// `Parameter` covers precondition violations on user-supplied values,
/// `Bracket` a critical-ratio search whose bracket does not straddle the
/// crossing, and `Internal` a broken invariant inside the library itself
/// (for example a covering construction that fails its own validity check).
#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("bracket error: {0}")]
    Bracket(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn parameter(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn bracket(msg: impl Into<String>) -> Self {
        Error::Bracket(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
