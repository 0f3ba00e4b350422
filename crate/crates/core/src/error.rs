use thiserror::Error;

/// Errors raised while building, analysing or simulating verification protocols.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// `dim` saturates at `usize::MAX` when the true dimension overflows.
    #[error("dimension {} exceeds the configured cap of {cap} (set GHZV_DIM_CAP to raise it)", show_dim(*.dim))]
    CapExceeded { dim: usize, cap: usize },

    #[error("matrix is not Hermitian (max |A - A^dagger| = {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid GHZ-like coefficients: {0}")]
    InvalidSpec(String),

    #[error("local dimension {d} is not an odd prime{hint}")]
    NotOddPrime { d: usize, hint: &'static str },

    #[error("residue condition violated: sum of labels is {sum} mod {modulus}, expected 0")]
    BadResidue { sum: usize, modulus: usize },

    #[error("the Y set has odd cardinality {0}")]
    OddYSet(usize),

    #[error("number of bases m = {m} is below the 2-design threshold {min} for d = {d}")]
    MTooSmall { d: usize, m: usize, min: usize },

    #[error("probability p = {p} outside the admissible range {range}")]
    POutOfRange { p: f64, range: String },

    #[error("beta = {beta} outside the admissible range [{lo}, 1)")]
    BetaOutOfRange { beta: f64, lo: f64 },

    #[error("basis is not unbiased with respect to the standard basis (max deviation {0:e})")]
    NotUnbiased(f64),

    #[error("strategy is not homogeneous")]
    NotHomogeneous,

    #[error("estimate {value} falls outside [0, 1]; the homogeneous model does not fit the data")]
    ResultOutOfRange { value: f64 },

    #[error("degenerate argument: {0}")]
    DegenerateArgument(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

fn show_dim(dim: usize) -> String {
    if dim == usize::MAX {
        "overflowing usize".into()
    } else {
        dim.to_string()
    }
}

pub type Result<T> = std::result::Result<T, Error>;
