use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the model builders, residual systems, solvers and the oracle.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("levels must be distinct: coordinates {i} and {j} collide ({value})")]
    DegenerateLevels { i: usize, j: usize, value: f64 },

    #[error("rapidity {rapidity} coincides with level {level} (coordinate {value})")]
    SingularExtension {
        level: usize,
        rapidity: usize,
        value: Complex64,
    },

    #[error("singular evaluation: {first} and {second} collide")]
    Collision { first: String, second: String },

    #[error("deformation parameter {0} outside [0, 1]")]
    Domain(f64),

    #[error("irrep label s(xi) diverges in the contraction limit xi = 0")]
    ContractionLimit,

    #[error("xi = 0 is the exact contraction limit; evaluate the Dicke equations instead")]
    DelegateToContraction,

    #[error("invalid model: {0}")]
    InvalidSpec(String),

    #[error("rapidity frame mismatch: expected {expected}, got {got}")]
    FrameMismatch { expected: &'static str, got: &'static str },

    #[error("secular equation has {found} real roots, {needed} required")]
    InsufficientModes { found: usize, needed: usize },

    #[error("seed selection: {0}")]
    Selection(String),

    #[error("Newton did not converge in {iterations} iterations (best max residual {best_residual:.3e})")]
    NoConvergence {
        iterations: usize,
        best_residual: f64,
        best: Vec<Complex64>,
    },

    #[error("singular Jacobian (condition estimate {0:.3e})")]
    SingularJacobian(f64),

    #[error("no finite-dimensional representation: {0}")]
    Representation(String),

    #[error("operator does not fit the basis: {0}")]
    BasisMismatch(String),

    #[error("boson cutoff {cutoff} below excitation number {needed}")]
    Cutoff { cutoff: usize, needed: usize },

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("operator is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("zero state vector")]
    ZeroVector,
}

pub type Result<T> = std::result::Result<T, Error>;
