use thiserror::Error;

/// Errors raised by the algebraic, numeric and search kernels.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("polynomial is not squarefree")]
    NotSquarefree,
    #[error("interval [{lo}, {hi}] isolates {count} real roots, expected exactly one")]
    RootIsolation { lo: String, hi: String, count: usize },
    #[error("designated root {0} is not in the open interval (0, 1)")]
    RadiusOutOfRange(String),
    #[error("operands belong to different rings")]
    RingMismatch,
    #[error("element is not invertible in this ring")]
    NotInvertible,
    #[error("conductor {conductor} does not contain sqrt({d})")]
    UnsupportedSurd { d: i64, conductor: u64 },
    #[error("block length {0} must be even")]
    OddBlock(usize),
    #[error("index a = {a} out of range for b = {b}")]
    IndexOutOfRange { a: usize, b: usize },
    #[error("base of absolute value <= 1 makes the series diverge")]
    DivergentBase,
    #[error("terms of a relation must share the same (r, b)")]
    MixedFamilies,
    #[error("coefficient vector is not a scalar multiple of a rational vector")]
    NotIntegerizable,
    #[error("approximation radius too large for N: rounding of N*x is ambiguous")]
    AmbiguousRounding,
    #[error("lattice basis rows are linearly dependent")]
    DependentRows,
    #[error("LLL parameter delta must lie in (1/4, 1)")]
    InvalidDelta,
    #[error("spigot requires an integer base >= 2 and an integer coefficient vector")]
    NonIntegerBase,
    #[error("carry ambiguity persists after guard escalation at position {0}")]
    CarryAmbiguity(u64),
    #[error("sign of element is undetermined after precision escalation")]
    InconclusiveSign,
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
