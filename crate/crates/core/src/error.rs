use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("i/o error: {0}")]
    Stream(#[from] std::io::Error),

    /// Bad parameters or resources: unknown format, empty salt, missing word lists.
    #[error("configuration error: {0}")]
    Config(String),

    /// Corpus-level validation failure (duplicate ids, unlabeled groups).
    #[error("validation error: {0}")]
    Validation(String),

    /// Records that reference entities which do not exist.
    #[error("data error: {0}")]
    Data(String),

    /// Input outside an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structural invariant that upstream stages should already guarantee.
    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error("{locator}: {message}")]
    Parse { locator: String, message: String },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(locator: impl Into<String>, message: impl ToString) -> Self {
        Error::Parse {
            locator: locator.into(),
            message: message.to_string(),
        }
    }
}
