use std::path::PathBuf;
use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("graph error: {0}")]
    Graph(String),

    #[error("matrix is not symmetric within tolerance ({0})")]
    NotSymmetric(String),

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("matrix is not positive semidefinite: {0}")]
    NotPositiveSemidefinite(String),

    #[error("voronoi error: {0}")]
    Voronoi(String),

    #[error("solver error: {0}")]
    Solver(String),

    #[error("filter is not polynomial-representable: {0}")]
    Interpolation(String),

    #[error("image error: {0}")]
    Image(String),

    #[error("experiment error: {0}")]
    Experiment(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            msg: msg.into(),
        }
    }
}
