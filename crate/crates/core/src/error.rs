use thiserror::Error;

use crate::model::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max asymmetry {asymmetry:e})")]
    NotHermitian { asymmetry: f64 },

    #[error("Jacobi eigensolver did not converge in {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("index {index} out of range for {len} qubits")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("matrix has no numerical null space")]
    EmptyNullSpace,

    #[error("matrix is singular to working precision")]
    Singular,

    #[error("invalid system specification: {0}")]
    InvalidSpec(ValidationReport),

    #[error("temperature must be positive, got {0}")]
    NonPositiveTemperature(f64),

    #[error("frequency must be non-negative, got {0}")]
    NegativeFrequency(f64),

    #[error("frequency must be positive, got {0}")]
    NonPositiveFrequency(f64),

    #[error("population 1/2 corresponds to infinite temperature")]
    InfiniteTemperature,

    #[error("qubit energy splitting is zero")]
    DegenerateQubit,

    #[error("population {0} is outside (0, 1)")]
    InvalidPopulation(f64),

    #[error("invalid time step: {0}")]
    InvalidStep(String),

    #[error("physicality lost at t = {time}: {reason}")]
    PhysicalityLost { time: f64, reason: String },

    #[error("time {time} lies outside the trajectory range [{start}, {end}]")]
    OutOfRange { time: f64, start: f64, end: f64 },

    #[error("need at least {needed} samples in the window, found {found}")]
    InsufficientSamples { needed: usize, found: usize },

    #[error("trajectory carries no junction definition")]
    MissingJunctions,

    #[error("unknown sweep parameter `{0}`")]
    UnknownParameter(String),

    #[error("internal invariant violated: {0}")]
    InvariantViolated(String),

    #[error("at least one nonzero dissipation rate is required")]
    NoDissipation,
}
