use thiserror::Error;

/// Errors raised by the geometry, bound and optimization routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(
        "sample set is not poised for linear interpolation (singular values {singular_values:?})"
    )]
    UnpoisedSet { singular_values: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("hyperplane directions are linearly dependent (rank {rank} < {required})")]
    DegenerateDirections { rank: usize, required: usize },

    #[error("step size must be positive, got {0}")]
    NonpositiveStep(f64),

    #[error("Lipschitz constant must be positive")]
    ZeroLipschitz,

    #[error("coordinate {coord} has an empty scaling range")]
    DegenerateRange { coord: usize },

    #[error("Hessian is not symmetric (asymmetry {asymmetry:e})")]
    AsymmetricHessian { asymmetry: f64 },

    #[error("dimension {n_u} exceeds the enumeration cap {cap}")]
    DimensionTooLarge { n_u: usize, cap: usize },

    #[error("index {index} out of range for {len} points")]
    InvalidIndex { index: usize, len: usize },

    #[error("candidate point lies on the anchor hyperplane (distance {distance:e})")]
    DegenerateCandidate { distance: f64, sentinel: f64 },

    #[error("no feasible point found for the half-space subproblem")]
    Infeasible,

    #[error("both half-space subproblems are infeasible at iteration {iter} (budget {budget})")]
    BothSidesInfeasible { iter: usize, budget: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("invalid input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] IoError),
}

/// `std::io::Error` is not `Clone`; keep the kind and message only.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind:?}: {message}")]
pub struct IoError {
    pub kind: std::io::ErrorKind,
    pub message: String,
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(IoError {
            kind: e.kind(),
            message: e.to_string(),
        })
    }
}

/// Value reported alongside [`Error::DegenerateCandidate`] in place of an
/// infinite bound.
pub const BOUND_SENTINEL: f64 = 1e300;

pub type Result<T, E = Error> = std::result::Result<T, E>;
