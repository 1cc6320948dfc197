use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("invalid config field `{field}`: {reason}")]
    Invalid { field: String, reason: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error(transparent)]
    Numeric(#[from] slit_fringe::Error),
    #[error("numeric checks failed: {}", .0.join("; "))]
    ChecksFailed(Vec<String>),
}

impl CliError {
    pub(crate) fn invalid(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Self::Invalid {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    /// 1 for configuration and input problems, 2 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Parse { .. } | Self::Invalid { .. } | Self::Input { .. } => 1,
            Self::Io { .. } => 1,
            Self::Numeric(_) | Self::ChecksFailed(_) => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
