use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid weight vector: {0}")]
    InvalidWeights(String),

    #[error("invalid field configuration: {0}")]
    InvalidField(String),

    #[error("degree mismatch: {0}")]
    Degree(String),

    #[error("parameter out of range: {0}")]
    Range(String),

    #[error("not a chain map: {0}")]
    ChainMap(String),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("ambient mismatch: {0}")]
    Ambient(String),

    /// A pushforward would need the top cohomology row of a twist `O(c)` with `c <= -w`.
    #[error("twist {twist} is outside the supported range (> {bound}); only H^0 rows are handled")]
    UnsupportedTwistRange { twist: i64, bound: i64 },

    #[error("wrong variant: {0}")]
    WrongVariant(String),

    #[error("sublattice is not invariant: {0}")]
    Invariance(String),

    #[error("invalid hypersurface model: {0}")]
    Model(String),

    #[error("prime {0} divides a denominator")]
    BadPrime(u64),

    #[error("integer overflow in {0}")]
    Overflow(&'static str),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
