use thiserror::Error;

/// Errors raised by the numerical pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("Slepian parameters differ: basis has (c={expected_c}, T={expected_t}), input has (c={found_c}, T={found_t})")]
    ParamsMismatch {
        expected_c: f64,
        expected_t: f64,
        found_c: f64,
        found_t: f64,
    },

    #[error("requested n_max={requested} but only {available} eigenvalues are distinguishable from zero (largest usable index {})", .available.saturating_sub(1))]
    InsufficientSpectrum { requested: usize, available: usize },

    #[error("index {n} has lambda={lambda:e} below the extension floor {floor:e}")]
    BelowNumericalFloor { n: usize, lambda: f64, floor: f64 },

    #[error("index {n} is out of range (n_max = {n_max})")]
    IndexOutOfRange { n: usize, n_max: usize },

    #[error("eigenvalues {first} and {second} could not be separated (gap {gap:e})")]
    Degenerate { first: usize, second: usize, gap: f64 },

    #[error("whole-line quadrature did not converge: tail contribution {achieved:e} exceeds {requested:e} at half-width {half_width}")]
    QuadratureNonConvergence {
        achieved: f64,
        requested: f64,
        half_width: f64,
    },

    #[error("spectral grid requirements not met within {max_samples} samples (achieved tolerance {achieved:e})")]
    GridCapExceeded { max_samples: usize, achieved: f64 },

    #[error("probability p[{index}] = {value:e} is negative beyond rounding tolerance")]
    NegativeProbability { index: usize, value: f64 },

    #[error("invalid POVM: operator sum has eigenvalue {eigenvalue} > 1 along {direction:?}")]
    PovmNotPositive {
        eigenvalue: f64,
        direction: Vec<f64>,
    },

    #[error("POVM elements are linearly dependent (smallest Gram eigenvalue {min_eigenvalue:e})")]
    PovmDependent { min_eigenvalue: f64 },

    #[error("design constraint violated: {0}")]
    DesignConstraint(String),

    #[error("Gram-Schmidt rank deficiency at index {index} (residual norm {residual:e})")]
    RankDeficient { index: usize, residual: f64 },

    #[error("Fisher matrix is singular (condition {condition:e}); null direction {null_direction:?}")]
    SingularFisher {
        condition: f64,
        null_direction: Vec<f64>,
    },

    #[error("model evaluation failed at theta={theta:?}: {reason}")]
    ModelEvaluation { theta: Vec<f64>, reason: String },

    #[error("finite-difference step for parameter {parameter} leaves the valid domain")]
    StepOutOfDomain { parameter: usize },

    #[error("derivative noise {noise:e} exceeds tolerance {tolerance:e} for derivative order {order}")]
    DerivativeNoise {
        order: usize,
        noise: f64,
        tolerance: f64,
    },

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error("serialization: {0}")]
    Serialization(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
