use std::path::PathBuf;

use thiserror::Error;

/// Every failure the CLI can report, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or flag combinations. Exit code 1.
    #[error("usage: {0}")]
    Usage(String),
    /// Unreadable or inconsistent input data. Exit code 2.
    #[error("{0}")]
    Data(String),
    /// A score is undefined for the given geometry. Exit code 3.
    #[error("numeric degeneracy: {0}")]
    Degenerate(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Data(_) | Self::Io { .. } | Self::Parse { .. } => 2,
            Self::Degenerate(_) => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<embias_core::Error> for CliError {
    fn from(e: embias_core::Error) -> Self {
        use embias_core::Error as E;
        match e {
            E::DegenerateDenominator { .. }
            | E::DegenerateInput(_)
            | E::DegenerateVector
            | E::PreconditionViolation(_) => Self::Degenerate(e.to_string()),
            _ => Self::Data(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
