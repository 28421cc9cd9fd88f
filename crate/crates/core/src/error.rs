use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid battery parameters: {0}")]
    InvalidParams(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("negative power at period {period}")]
    NegativePower { period: usize },

    #[error("mode vector required for this feasible set")]
    MissingMode,

    #[error("element {0} already in context")]
    ElementInContext(usize),

    #[error("window too large: {size} periods (max {max})")]
    WindowTooLarge { size: usize, max: usize },

    #[error("window [{start}, {end}] outside horizon 1..={horizon}")]
    WindowOutOfRange { start: usize, end: usize, horizon: usize },

    #[error("horizon too large for enumeration: {horizon} (max {max})")]
    HorizonTooLarge { horizon: usize, max: usize },

    #[error("invalid anchor: {0}")]
    InvalidAnchor(String),

    #[error("model error: {0}")]
    Model(String),

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("series {path}: {msg}")]
    Series { path: PathBuf, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("report has no rows")]
    EmptyReport,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
