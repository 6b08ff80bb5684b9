use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a supported prime (odd primes 3..=97)")]
    InvalidPrime(u32),

    #[error("level {level} outside supported range {min}..={max}")]
    InvalidLevel { level: usize, min: usize, max: usize },

    #[error("mismatched operands: {0}")]
    Mismatch(String),

    #[error("element is not a unit (valuation {0} > 0)")]
    NotUnit(usize),

    #[error("level {level} is not a power of {p}")]
    NotPowerOfPrime { level: usize, p: u32 },

    #[error("generator lies in T*Omega_n^2 and does not span a maximal submodule")]
    NotMaximal,

    #[error("{what} = {value} exceeds limit {limit}")]
    ResourceBound {
        what: &'static str,
        value: u128,
        limit: u128,
    },

    #[error("precondition violated: {0}")]
    Precondition(String),
}

impl Error {
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::ResourceBound { .. })
    }
}
