use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NonSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("index {index} lies outside the operator's coordinate range")]
    OutOfRange { index: i64 },

    #[error("duplicate index {0}")]
    DuplicateIndex(i64),

    #[error("non-finite value encountered ({0})")]
    NonFinite(&'static str),

    #[error("orbit overflowed at step {step}")]
    Overflow { step: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("degenerate pair: x and y coincide")]
    DegeneratePair,

    #[error("requested n = {n} exceeds series length {len}")]
    SeriesTooShort { n: usize, len: usize },

    #[error("probe vector is zero")]
    ZeroProbe,

    #[error("no witness supplied for m = {0}")]
    MissingWitness(usize),

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is ill-conditioned (condition estimate {kappa:e} exceeds {cap:e})")]
    IllConditioned { kappa: f64, cap: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter { name, reason: reason.into() }
}
