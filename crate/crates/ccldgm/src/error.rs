use thiserror::Error;

/// Errors produced by graph construction, encoding and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An ensemble or parameter set fails validation before any work starts.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A precondition on a state-mutating call was violated.
    #[error("usage error: {0}")]
    Usage(String),

    /// An enumeration request exceeds the exhaustive-search cap.
    #[error("instance too large to enumerate: {bits} code-bits exceeds cap of {cap}")]
    Capacity { bits: usize, cap: usize },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the CLI: 1 for validation failures, 2 for runtime errors.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::Config(_) => 1,
            _ => 2,
        }
    }
}
