use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected:?}, got {actual:?}")]
    DimensionMismatch {
        expected: (usize, usize),
        actual: (usize, usize),
    },

    #[error("mask has no known pixels; the system is singular")]
    NoDirichletData,

    #[error("singular system encountered at elimination step {step}")]
    Singular { step: usize },

    #[error("system with {pixels} pixels exceeds the dense assembly limit of {limit}")]
    TooLarge { pixels: usize, limit: usize },

    #[error("block {rect:?} lies outside a {width}x{height} field")]
    OutOfBounds {
        rect: (usize, usize, usize, usize),
        width: usize,
        height: usize,
    },

    #[error(transparent)]
    Pnm(#[from] crate::imageio::PnmError),

    #[error("{path}: {source}")]
    Decode {
        path: String,
        #[source]
        source: crate::imageio::PnmError,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: String,
        #[source]
        source: csv::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn ensure_dims(expected: (usize, usize), actual: (usize, usize)) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, actual })
    }
}
