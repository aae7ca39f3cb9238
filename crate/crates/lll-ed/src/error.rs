use thiserror::Error;

/// Errors produced by the diagonalization and analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("empty subspace: no Fock states for N={n}, L={l}, {statistics} with l_max={l_max}")]
    EmptySubspace {
        n: usize,
        l: usize,
        statistics: &'static str,
        l_max: usize,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("orbital index {index} outside basis range 0..={l_max}")]
    OrbitalOutOfRange { index: usize, l_max: usize },

    #[error("eigensolver did not converge after {iterations} iterations (best residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("dense solve refused: dimension {dim} above cap {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("quadrature did not converge: error estimate {estimate:.3e} above tolerance {tolerance:.3e}")]
    QuadratureNotConverged { estimate: f64, tolerance: f64 },

    #[error("element table does not cover orbital {orbital} (table l_max = {l_max})")]
    ElementTableGap { orbital: usize, l_max: usize },

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("orbital solver failed: {0}")]
    OrbitalSolve(String),

    #[error("expansion cap exceeded: {0}")]
    ExpansionCap(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
