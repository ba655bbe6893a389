use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid array: {0}")]
    InvalidArray(String),

    #[error("invalid scene: {0}")]
    InvalidScene(String),

    #[error("path of zero length between {what} (elements coincide)")]
    CoincidentElements { what: &'static str },

    #[error("channel matrix is identically zero")]
    ZeroChannel,

    #[error("beamspace index {index} out of range (dof = {dof})")]
    IndexOutOfRange { index: usize, dof: usize },

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("at {coordinate}: {source}")]
    SweepPoint {
        coordinate: String,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {message}", path.display())]
    Csv { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by user input rather than numerics.
    pub fn is_usage(&self) -> bool {
        match self {
            Error::Config { .. }
            | Error::InvalidArray(_)
            | Error::InvalidScene(_)
            | Error::CoincidentElements { .. }
            | Error::InvalidArgument(_)
            | Error::Io { .. }
            | Error::Csv { .. } => true,
            Error::SweepPoint { source, .. } => source.is_usage(),
            _ => false,
        }
    }
}
