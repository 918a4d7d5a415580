use std::path::PathBuf;

use thiserror::Error;

pub type CliResult<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config files or input files.
    #[error("{0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] assoc_core::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for a failed mathematical check, 2 for configuration and input errors.
    pub fn exit_code(&self) -> u8 {
        use assoc_core::Error as E;
        match self {
            Self::Config(_) | Self::Io { .. } => 2,
            Self::Core(e) => match e {
                E::InvalidConfig(_)
                | E::GridFormat(_)
                | E::Io(_)
                | E::InvalidLabel { .. }
                | E::Unconverged { .. } => 2,
                _ => 1,
            },
        }
    }
}
