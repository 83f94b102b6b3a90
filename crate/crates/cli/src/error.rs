use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Numerical(tfmetro_core::Error),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("output: {0}")]
    Output(String),
}

impl CliError {
    /// 0 success, 2 configuration, 3 numerical failure, 4 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } | CliError::Output(_) => 4,
        }
    }
}

impl From<tfmetro_core::Error> for CliError {
    fn from(e: tfmetro_core::Error) -> Self {
        use tfmetro_core::Error as E;
        match e {
            E::InvalidParameter { .. } | E::DesignConstraint(_) | E::SchemaVersion { .. } => {
                CliError::Config(e.to_string())
            }
            E::Serialization(msg) => CliError::Output(msg),
            other => CliError::Numerical(other),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
