use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error("{0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] edgex_core::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for the CLI: 2 parse error, 3 budget exhausted,
    /// 4 size or configuration error, 1 anything else.
    pub fn exit_code(&self) -> i32 {
        use edgex_core::Error as Core;
        match self {
            Error::Parse { .. } => 2,
            Error::Core(Core::TrialBudgetExhausted { .. } | Core::CandidateBudgetExhausted { .. }) => 3,
            Error::Config(_) | Error::Core(_) => 4,
            Error::Io { .. } | Error::Csv(_) => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
