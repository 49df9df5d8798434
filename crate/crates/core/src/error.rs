use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("matrix is not Hermitian (max |A - A^dagger| = {0:e})")]
    NotHermitian(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid density matrix: {0}")]
    InvalidState(String),

    #[error("invalid spectrum: {0}")]
    InvalidSpectrum(String),

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    /// Support of the first argument leaks into the null space of the second;
    /// the relative entropy is +infinity.
    #[error("support violation: weight {leak:e} of rho lies in the kernel of sigma")]
    SupportViolation { leak: f64 },

    #[error("parameter out of range: {0}")]
    ParamOutOfRange(String),

    #[error("bad dimension: {0}")]
    BadDimension(String),

    #[error("bad rank {rank} for dimension {dim}")]
    BadRank { rank: usize, dim: usize },

    #[error("spectrum has length {got}, expected {expected}")]
    WrongLength { got: usize, expected: usize },

    #[error("infeasible boundary coordinates: {0}")]
    InfeasibleCoords(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("distance kind {0} is not supported by this operation")]
    UnsupportedKind(String),

    #[error("optimizer did not converge (best value found {best})")]
    ConvergenceFailure { best: f64 },

    #[error("state has positive partial transpose (min eigenvalue {0:e})")]
    NotNpt(f64),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("state is not entangled (min partial-transpose eigenvalue {0:e})")]
    NotEntangled(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
