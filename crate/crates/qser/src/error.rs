use std::path::PathBuf;

/// Errors of the IO layer. Core errors pass through unchanged.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{}: bad WAV at byte {offset}: {message}", path.display())]
    Wav { path: PathBuf, offset: usize, message: String },
    #[error("{}: {message}", path.display())]
    Format { path: PathBuf, message: String },
    #[error("{}:{line}: {message}", path.display())]
    Manifest { path: PathBuf, line: usize, message: String },
    #[error("config error at `{field}`: {message}")]
    Config { field: String, message: String },
    #[error(transparent)]
    Core(#[from] qser_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format { path: path.into(), message: message.into() }
    }

    /// Process exit code: 2 for configuration problems, 3 for a numeric
    /// abort during training, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config { .. } | Error::Core(qser_core::Error::Config(_)) => 2,
            Error::Core(qser_core::Error::NonFiniteLoss { .. }) => 3,
            _ => 1,
        }
    }
}
