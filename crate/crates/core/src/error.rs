use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("bit length {0} exceeds the 64-bit word limit")]
    TooWide(usize),

    #[error("value {value} does not fit in {bits} bits")]
    ValueOutOfRange { value: u64, bits: usize },

    #[error("vectors are linearly dependent")]
    LinearlyDependent,

    #[error("subspace does not complement the kernel of the map")]
    NotComplementary,

    #[error("field degree mismatch: {0} vs {1}")]
    FieldMismatch(u32, u32),

    #[error("polynomial modulus must have positive degree")]
    ZeroModulus,

    #[error("seed {seed} out of range for a family of {seeds} seeds")]
    SeedOutOfRange { seed: u64, seeds: u64 },

    #[error("bit index {index} out of range 1..={n}")]
    BitOutOfRange { index: usize, n: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("unsupported parameters: {0}")]
    Unsupported(String),

    #[error("certification failed for n={n} r={r} D={seeds} k={k} eps={eps} after {attempts} attempts (best worst-ratio {best_ratio:.4})")]
    CertificationFailed {
        n: usize,
        r: usize,
        seeds: u64,
        k: usize,
        eps: f64,
        attempts: usize,
        best_ratio: f64,
    },

    #[error("exhaustive enumeration needs {needed} evaluations, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },

    #[error("query at position {0} is outside the armed plan")]
    PlanViolation(u64),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("io: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
