use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("inverse transform left imaginary residue {residue:e} above tolerance {tolerance:e}")]
    ResidualImaginary { residue: f64, tolerance: f64 },

    #[error("Jacobi SVD did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("argument {x} lies below the threshold {lambda}")]
    DomainError { x: f64, lambda: f64 },

    #[error("multiplier norm {norm_sq} exceeds bound {bound} at iteration {iter}")]
    MultiplierBoundViolated { norm_sq: f64, bound: f64, iter: usize },

    #[error("rank {rank} exceeds min(n1, n2) = {max}")]
    RankTooLarge { rank: usize, max: usize },

    #[error("sampling rate {0} outside (0, 1]")]
    InvalidRate(f64),

    #[error("invalid stripe pattern: {0}")]
    InvalidPattern(String),

    #[error("reference tensor has zero norm")]
    ZeroReference,

    #[error("malformed tensor file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
