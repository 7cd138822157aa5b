use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("cannot read config {path}: {source}")]
    ReadConfig {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Convergence(decohere_core::Error),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::ReadConfig { .. } => 2,
            CliError::Io { .. } => 3,
            CliError::Convergence(_) => 4,
            CliError::Numerical(_) => 5,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<decohere_core::Error> for CliError {
    fn from(e: decohere_core::Error) -> Self {
        use decohere_core::Error as E;
        match e {
            E::InvalidParameter { .. }
            | E::InvalidGrid(_)
            | E::InvalidOracleConfig(_)
            | E::DampingTooStrong { .. } => CliError::Config(e.to_string()),
            E::Convergence { .. } => CliError::Convergence(e),
            E::Numerical(_) | E::Profile(_) => CliError::Numerical(e.to_string()),
        }
    }
}
