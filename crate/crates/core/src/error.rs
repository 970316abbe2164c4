use thiserror::Error;

use crate::combinatorics::MAX_VARS;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("n = {0} exceeds the supported maximum of {MAX_VARS} variables")]
    TooManyVariables(usize),

    #[error("index {index} is out of range for n = {n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("the ideal is not proper (it contains 1)")]
    NotProper,

    #[error("the void complex has no Stanley-Reisner ring")]
    VoidComplex,

    #[error("vertex counts differ: {0} vs {1}")]
    MismatchedN(usize, usize),

    #[error("size cap exceeded: {0}")]
    SizeCap(String),

    #[error("the supplied maps do not compose to zero")]
    NotAComplex,

    #[error("the supplied map does not commute with the differentials")]
    NonCommuting,

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("{0} is not a prime below 2^31")]
    BadPrime(u64),
}

impl Error {
    /// True for errors caused by exceeding a documented size cap.
    pub fn is_size_cap(&self) -> bool {
        matches!(self, Error::SizeCap(_))
    }
}
