use thiserror::Error;

/// Error type shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("capacity guard exceeded: {0}")]
    Capacity(String),

    #[error("non-finite kernel sample at abscissa {0}")]
    NonFiniteSample(String),

    #[error("matrix not symmetric: worst entry pair ({row},{col}) differs by {delta}")]
    NotSymmetric { row: usize, col: usize, delta: f64 },

    #[error("imaginary residue {residue:.3e} exceeds tolerance {tol:.3e}")]
    ImaginaryResidue { residue: f64, tol: f64 },

    #[error("Fourier tail bound violated: {0}")]
    TailBound(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
