use std::path::PathBuf;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A value violates a documented invariant.
    #[error("invalid input: {0}")]
    Invalid(String),

    /// A text file (materials library, run config, CSV) could not be parsed.
    #[error("{file}:{line}: {message}")]
    Parse {
        file: String,
        line: usize,
        message: String,
    },

    #[error("mesh: {0}")]
    Mesh(String),

    #[error("load: {0}")]
    Load(String),

    #[error("solver: {0}")]
    Solver(String),

    #[error("sweep case {case}: {source}")]
    Case {
        case: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code: 1 for configuration/validation problems, 2 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invalid(_) | Error::Parse { .. } => 1,
            Error::Case { source, .. } => source.exit_code(),
            _ => 2,
        }
    }

    /// Short machine-readable category used in CLI failure lines.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Invalid(_) => "invalid",
            Error::Parse { .. } => "parse",
            Error::Mesh(_) => "mesh",
            Error::Load(_) => "load",
            Error::Solver(_) => "solver",
            Error::Case { source, .. } => source.kind(),
            Error::Io { .. } => "io",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
