use std::fmt;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid dimension d={got}: at least {min} required")]
    InvalidDimension { got: usize, min: usize },

    #[error("invalid arguments: {0}")]
    InvalidArguments(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("predictor error: {0}")]
    Predictor(String),

    #[error("game evaluation failed: {0}")]
    GameEvaluation(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl fmt::Display) -> Self {
        Error::InvalidArguments(msg.to_string())
    }

    pub(crate) fn numerical(msg: impl fmt::Display) -> Self {
        Error::NumericalFailure(msg.to_string())
    }

    /// Process exit code used by the command-line harness.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::NumericalFailure(_) => 3,
            Error::Predictor(_) | Error::GameEvaluation(_) => 4,
            Error::InvalidDimension { .. } | Error::InvalidArguments(_) | Error::Config(_) | Error::Io(_) => 2,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Config(e.to_string())
    }
}
