use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("zero mode with negative order {order}")]
    ZeroModeNegativeOrder { order: f64 },

    #[error("point outside the domain of the cone multiplier: {0}")]
    OutsideDomain(String),

    #[error("admissible set is empty: {0}")]
    EmptyAdmissibleSet(String),

    #[error("mismatched shapes: {0}")]
    ShapeMismatch(String),

    #[error("quadrature did not converge: estimated error {error:.3e} after {evaluations} evaluations (partial value {value})")]
    QuadratureFailure {
        value: f64,
        error: f64,
        evaluations: usize,
    },

    #[error("picard iteration diverged after {iterations} iterations (last contraction ratio {ratio:.3})")]
    Divergence { iterations: usize, ratio: f64 },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("bad FSLB file: {0}")]
    Format(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
