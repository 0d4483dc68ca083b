use thiserror::Error;

/// Errors raised by validated constructors and parameterized operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("operator is not Hermitian: max deviation {deviation:e} exceeds {tolerance:e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("trace {trace} is not 1 within {tolerance:e}")]
    NotNormalized { trace: f64, tolerance: f64 },

    #[error("operator is not positive semidefinite: min eigenvalue {min_eigenvalue:e}")]
    NotPositive { min_eigenvalue: f64 },

    #[error("invalid Hilbert structure: {0}")]
    InvalidStructure(String),

    #[error("invalid bipartition: {0}")]
    InvalidCut(String),

    #[error("local vector {index} of member {member} has norm {norm}, expected 1")]
    NotUnitVector { member: usize, index: usize, norm: f64 },

    #[error("product vectors are not orthonormal: Gram deviation {deviation:e}")]
    NotOrthonormal { deviation: f64 },

    #[error("parameter {name} = {value} outside {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },

    #[error("degenerate construction: {0}")]
    Degenerate(String),

    #[error("witness cannot be normalized: lambda {lambda} must lie in (0, n/D = {bound})")]
    WitnessNormalization { lambda: f64, bound: f64 },

    #[error("ball center is rank deficient (min eigenvalue {min_eigenvalue:e}); use a family member with x < 1")]
    RankDeficientCenter { min_eigenvalue: f64 },

    #[error("no branch crossing inside ({lower}, {upper})")]
    NoCrossing { lower: f64, upper: f64 },

    #[error("state outside the operation's domain: {0}")]
    OutOfDomain(String),

    #[error("unknown catalog entry {0:?}")]
    UnknownUpb(String),
}

pub type Result<T> = std::result::Result<T, Error>;
