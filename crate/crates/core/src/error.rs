use thiserror::Error;

/// Errors raised by the numerical routines and the experiment driver.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("operands live on different mode sets")]
    ModeSetMismatch,

    #[error("operator declares degree shift {shift} but has entry of size {magnitude:e} outside that band")]
    BandViolation { shift: i32, magnitude: f64 },

    #[error("quadrature oracle supports at most 3 modes, got {0}")]
    OracleUnsupported(usize),

    #[error("quadrature order {order} too low: self-consistency discrepancy {discrepancy:e}")]
    QuadratureOrderTooLow { order: usize, discrepancy: f64 },

    #[error("invalid generator set: {0}")]
    InvalidGenerators(String),

    #[error("mode layout inconsistent with model: {0}")]
    LayoutInconsistent(String),

    #[error("potential of degree {degree} is not truncation-safe at cutoff {cutoff}")]
    TruncationUnsafe { degree: usize, cutoff: usize },

    #[error("power series not converged after {terms} terms (last term {last_term:e})")]
    SeriesNotConverged { terms: usize, last_term: f64 },

    #[error("quadrature group {quadrature} does not match model group {model}")]
    GroupMismatch { quadrature: String, model: String },

    #[error("null-space rank is ambiguous in degree block {degree}: singular value {singular_value:e} near threshold {threshold:e}")]
    RankAmbiguity {
        degree: usize,
        singular_value: f64,
        threshold: f64,
    },

    #[error("operator is not Hermitian: deviation {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("Hamiltonian does not commute with the projector: deviation {deviation:e}")]
    CommutatorViolation { deviation: f64 },

    #[error("projector kernel {value:e} below zero threshold {threshold:e}")]
    KernelZero { value: f64, threshold: f64 },

    #[error("invalid slice schedule: {0}")]
    InvalidSchedule(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
