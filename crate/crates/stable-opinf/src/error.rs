use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(
        "matrix is not monotonically stable: symmetric part has eigenvalue {max_sym_eig} >= 0"
    )]
    NotMonotonicallyStable { max_sym_eig: f64 },

    #[error("quadratic operator is not energy-preserving: max violation {violation}")]
    NotEnergyPreserving { violation: f64 },

    #[error("stability certificate rejected: {0}")]
    CertificateFailed(String),

    #[error("simulation diverged at t = {time}: state norm {norm} exceeded {threshold}")]
    Diverged { time: f64, norm: f64, threshold: f64 },

    #[error("eigenvalue iteration failed to converge")]
    EigenNoConvergence,

    #[error("non-finite loss at update {step}")]
    NonFiniteLoss { step: usize },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
