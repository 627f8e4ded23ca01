use thiserror::Error;

/// Errors produced by graph construction, simulation and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("could not generate a connected simple {k}-regular graph on {n} nodes in {attempts} attempts")]
    GenerationFailure { n: usize, k: usize, attempts: usize },

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("graph6 parse error: {reason} (byte {offset})")]
    Parse { offset: usize, reason: String },

    #[error("degenerate regression: all x values are identical")]
    DegenerateRegression,

    #[error("validation failed: {0}")]
    Validation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn parse(offset: usize, reason: impl Into<String>) -> Self {
        Error::Parse {
            offset,
            reason: reason.into(),
        }
    }
}
