use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T> = std::result::Result<T, CliError>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Core { path: PathBuf, source: bandish_core::Error },
    #[error(transparent)]
    Analysis(#[from] bandish_core::Error),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Wav { path: PathBuf, source: hound::Error },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Validation(String),
}

/// Process exit status classes, following the sysexits convention.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitClass {
    Validation = 65,
    Io = 74,
    Config = 78,
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub fn format(path: &Path, message: impl Into<String>) -> Self {
        CliError::Format { path: path.to_path_buf(), message: message.into() }
    }

    pub fn at(path: &Path) -> impl FnOnce(bandish_core::Error) -> Self + '_ {
        move |source| CliError::Core { path: path.to_path_buf(), source }
    }

    pub fn class(&self) -> ExitClass {
        use bandish_core::Error as E;
        match self {
            CliError::Core { source, .. } | CliError::Analysis(source) => match source {
                E::Config(_) => ExitClass::Config,
                _ => ExitClass::Validation,
            },
            CliError::Io { .. } => ExitClass::Io,
            CliError::Csv { source, .. } if source.is_io_error() => ExitClass::Io,
            CliError::Wav { source: hound::Error::IoError(e), .. }
                if matches!(e.kind(), std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied) =>
            {
                ExitClass::Io
            }
            CliError::Csv { .. } | CliError::Format { .. } | CliError::Wav { .. } | CliError::Validation(_) => {
                ExitClass::Validation
            }
            CliError::Config(_) => ExitClass::Config,
        }
    }
}
