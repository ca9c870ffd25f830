//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("matrix is not symmetric: max asymmetry {asym:.3e} exceeds tolerance {tol:.3e}")]
    NotSymmetric { asym: f64, tol: f64 },

    #[error("metric matrix is singular or indefinite (min/max eigenvalue ratio {ratio:.3e})")]
    IllConditionedMetric { ratio: f64 },

    #[error("k = {k} out of range (max {max})")]
    InvalidK { k: usize, max: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("target column {col} has (near-)zero variance")]
    DegenerateTarget { col: usize },

    #[error("invalid synthetic-data config: {0}")]
    InvalidConfig(String),

    #[error("targets must be standardized (column {col}: mean {mean:.3e}, variance {var:.6})")]
    RequiresStandardized { col: usize, mean: f64, var: f64 },

    #[error("design matrix is rank deficient (rank {rank} < {dim})")]
    RankDeficient { rank: usize, dim: usize },

    #[error("top-{k} spectrum is degenerate: relative gap {gap:.3e} below {tol:.3e}")]
    DegenerateSpectrum { k: usize, gap: f64, tol: f64 },

    #[error("sigma drifted outside [0, 1] beyond tolerance: {0}")]
    SigmaOutOfRange(f64),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error in {path}: {msg}")]
    Parse { path: String, msg: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            msg: msg.into(),
        }
    }
}
