use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids ({left} vs {right})")]
    GridMismatch { left: String, right: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("symbol `{label}` is not finite at wavevector {k:?}")]
    NonFiniteSymbol { label: String, k: Vec<i64> },

    #[error("assumption {assumption} violated: {detail}")]
    Assumption { assumption: String, detail: String },

    #[error("{solver} produced a non-finite value at step {step}")]
    NonFinite { solver: &'static str, step: usize },

    #[error("{solver} failed at outer iteration {iteration}: {source}")]
    OuterIteration {
        solver: &'static str,
        iteration: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{0}")]
    Solver(String),

    #[error("checkpoint format: {0}")]
    Format(String),

    #[error("config {path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
