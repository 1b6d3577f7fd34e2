//! CLI errors and their exit codes.

use hecke_core::HeckeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{context}: {source}")]
    Engine {
        context: String,
        #[source]
        source: HeckeError,
    },
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn engine(context: impl Into<String>, source: HeckeError) -> Self {
        CliError::Engine {
            context: context.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Engine {
                source: HeckeError::UnsupportedRelation { .. },
                ..
            } => 3,
            // a rank or point degree beyond the configured extension bound
            CliError::Engine {
                source: HeckeError::DegreeBoundExceeded { .. },
                ..
            } => 2,
            CliError::Verification(_) => 4,
            CliError::Engine { .. } | CliError::Io(_) => 1,
        }
    }
}
