use shellmodes_core::ShellError;
use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitStatus {
    Success = 0,
    Usage = 2,
    Numerical = 3,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("cannot parse profile file {path}: {source}")]
    ProfileFile { path: String, source: serde_json::Error },
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Shell(#[from] ShellError),
    #[error("{count} {what} failed")]
    Failed { count: usize, what: &'static str },
}

impl CliError {
    pub fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn status(&self) -> ExitStatus {
        match self {
            CliError::Usage(_) | CliError::ProfileFile { .. } | CliError::Io { .. } => ExitStatus::Usage,
            CliError::Csv(_) | CliError::Failed { .. } => ExitStatus::Numerical,
            CliError::Shell(e) => match e {
                ShellError::Domain { .. }
                | ShellError::Geometry(_)
                | ShellError::Profile(_)
                | ShellError::UnknownModel(_)
                | ShellError::NotApplicable(_)
                | ShellError::Unsupported(_) => ExitStatus::Usage,
                _ => ExitStatus::Numerical,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
