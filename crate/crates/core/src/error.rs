use thiserror::Error;

/// Errors produced anywhere in the design pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("decimation pattern retains no samples")]
    AllZeroPattern,
    #[error("invalid pattern symbol {0:?}, expected 0 or 1")]
    InvalidSymbol(char),
    #[error("decimation pattern must not be empty")]
    EmptyPattern,
    #[error("invalid block decimation ({r1} of {r2}), need 1 <= R1 <= R2")]
    InvalidBlockSpec { r1: usize, r2: usize },
    #[error("sequence length {len} is not a multiple of {block}")]
    LengthNotDivisible { len: usize, block: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("time domains of the operands differ")]
    DomainMismatch,
    #[error("expected a continuous-time model")]
    NonContinuousInput,
    #[error("expected a discrete-time model")]
    NonDiscreteInput,
    #[error("system is not stable (spectral radius {0})")]
    UnstableSystem(f64),
    #[error("could not bracket the H-infinity norm")]
    BracketFailure,
    #[error("synthesis infeasible even at the upper bound gamma = {0}")]
    InfeasibleAtUpperBound(f64),
    #[error("Riccati equation failed at gamma = {gamma}: {reason}")]
    RiccatiFailure { gamma: f64, reason: String },
    #[error("frequency grid point {0} coincides with a pole")]
    SingularAtGridPoint(f64),
    #[error("invalid class counts M = {m}, N = {n}")]
    InvalidCounts { m: usize, n: usize },
    #[error("invalid rectangular-wave parameters: {0}")]
    InvalidPeriod(String),
    #[error("invalid design specification: {0}")]
    InvalidSpec(String),
    #[error("LAPACK routine {routine} returned info = {info}")]
    Lapack { routine: &'static str, info: i32 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
