use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("weight matrix is not square: row {row} has {len} entries, expected {n}")]
    NonSquare { row: usize, len: usize, n: usize },

    #[error("weight matrix is empty")]
    EmptyMatrix,

    #[error("weight matrix entry ({i}, {j}) = {value} is outside [0, 1]")]
    NegativeEntry { i: usize, j: usize, value: f64 },

    #[error("row {row} of the weight matrix sums to {sum}, expected 1")]
    RowSumViolation { row: usize, sum: f64 },

    #[error("weight matrix is reducible; a Perron vector needs a strongly connected network")]
    ReducibleMatrix,

    #[error("power iteration did not converge within {max_iters} iterations")]
    NoConvergence { max_iters: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("corner radius delta = {0} is outside (0, 1/2)")]
    InvalidDelta(f64),

    #[error("trajectory has {available} contiguous final states, window needs {window}")]
    TrajectoryTooShort { available: usize, window: usize },

    #[error("ensemble did not record actions at t = {0}")]
    MissingActions(u64),

    #[error("ensemble did not record a state at t = {0}")]
    MissingSample(u64),

    #[error("{0} runs are not decided as consensus")]
    UndecidedRuns(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{}:{line}: {message}", path.as_ref().map(|p| p.display().to_string()).unwrap_or_else(|| "<input>".into()))]
    Parse {
        path: Option<PathBuf>,
        line: usize,
        message: String,
    },

    #[error("i/o error on {path}: {message}")]
    Io { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: None,
            line,
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, err: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            message: err.to_string(),
        }
    }

    /// Attaches a file path to a parse error that was produced from raw text.
    pub fn with_path(self, p: impl Into<PathBuf>) -> Self {
        match self {
            Error::Parse { line, message, .. } => Error::Parse {
                path: Some(p.into()),
                line,
                message,
            },
            other => other,
        }
    }
}
