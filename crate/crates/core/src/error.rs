use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("grid size {0} must be a power of two and at least 16")]
    GridSize(usize),
    #[error("grid size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },
    #[error("series of length {len} does not fit on a grid of size {grid}")]
    Truncation { len: usize, grid: usize },
    #[error("expected a series in powers of {expected}")]
    WrongVariable { expected: &'static str },
    #[error("input is not real-valued (max imaginary part {0:e})")]
    NotReal(f64),
    #[error("input is not tagged analytic")]
    NotAnalytic,
    #[error("negative Fourier coefficients of size {0:e} exceed the analytic tolerance")]
    NegativeFrequencies(f64),
    #[error("p must be positive, got {0}")]
    InvalidExponent(f64),
    #[error("invalid Blaschke zeros: {0}")]
    InvalidZeros(String),
    #[error("index {index} out of range (limit {limit})")]
    IndexOutOfRange { index: usize, limit: usize },
    #[error("truncation budget exceeded: n*(M+1) = {needed} > N/8 = {available}")]
    Budget { needed: usize, available: usize },
    #[error("tuple of size {r} exceeds the degree n = {n}")]
    TupleTooLarge { r: usize, n: usize },
    #[error("input has zero norm")]
    ZeroInput,
    #[error("all vectors are below the rank tolerance")]
    EmptyFrame,
    #[error("indeterminate rank: singular-value gap ratio {gap:e} below {required:e}")]
    IndeterminateRank { gap: f64, required: f64 },
    #[error("wandering dimension r = {r} exceeds n = {n}; truncation artifact or invalid input")]
    TooManyInnerFunctions { r: usize, n: usize },
    #[error("dim(M1 - B^2 M1) = {found}, expected 2r = {expected}; truncation artifact")]
    InconsistentDimension { found: usize, expected: usize },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("operation requires the {0} algebra")]
    WrongAlgebra(&'static str),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
