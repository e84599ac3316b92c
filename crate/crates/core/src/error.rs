use thiserror::Error;

/// Errors surfaced by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Input fails a precondition (bad length, bad range, unparsable text).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    /// A request above a desk-scale cap (enumeration size, qubit count).
    #[error("refused: {0}")]
    Refused(String),

    /// A bounded rejection loop ran out of attempts.
    #[error("sampling did not terminate after {0} attempts")]
    SamplingExhausted(usize),

    #[error("{0}")]
    Runtime(String),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors caused by the caller's input rather than by execution.
    pub fn is_input_error(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::DimensionMismatch { .. }
                | Error::IndexOutOfRange { .. }
                | Error::Refused(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
