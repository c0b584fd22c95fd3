use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("hypothesis not satisfied: {0}")]
    Precondition(String),
    #[error("resource budget exceeded: {0}")]
    Resource(String),
    #[error("process complete: no open vertices remain")]
    ProcessComplete,
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::Json(_) | Error::Config(_) | Error::ProcessComplete => 2,
            Error::Precondition(_) => 3,
            Error::Resource(_) => 4,
            Error::Io(_) => 2,
        }
    }
}
