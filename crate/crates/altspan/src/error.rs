//! Error type shared across the toolkit.
//!
//! Every variant maps onto one of the CLI exit codes: configuration problems
//! exit with 2, data problems (parse failures, bad arguments, missing stage
//! artifacts) with 3, and internal faults with 4.

use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("validation error: {0}")]
    Validation(String),

    #[error("argument error: {0}")]
    Argument(String),

    #[error("dependency error: missing upstream artifact {0}")]
    Dependency(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the CLI: 0 ok, 2 config, 3 data, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. }
            | Error::Parse { .. }
            | Error::Schema(_)
            | Error::Validation(_)
            | Error::Argument(_)
            | Error::Dependency(_) => 3,
            Error::Internal(_) => 4,
        }
    }
}
