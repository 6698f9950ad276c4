use thiserror::Error;

/// Precondition and I/O failures raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("argument must be positive, got 0")]
    Zero,

    #[error("{0} is not an odd prime power")]
    NotOddPrimePower(u64),

    #[error("gcd({0},{1}) must be 1")]
    NotCoprime(u64, u64),

    #[error("modulus f={f} must exceed twist c={c}")]
    TwistTooLarge { f: u64, c: u64 },

    #[error("modulus f={0} is too small (need f >= {1})")]
    ModulusTooSmall(u64, u64),

    #[error("twist c=1 is the untwisted moment; enable it explicitly")]
    Untwisted,

    #[error("the trivial character has no finite L(1, chi)")]
    TrivialCharacter,

    #[error("character belongs to modulus {found}, expected {expected}")]
    ModulusMismatch { expected: u64, found: u64 },

    #[error("{0} lies outside the open unit interval")]
    OutsideUnitInterval(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid sweep: {0}")]
    InvalidSweep(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
