use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("cannot parse group descriptor `{0}`")]
    GroupSyntax(String),

    #[error("modulus must be at least 1, got {0}")]
    BadModulus(u64),

    #[error("cannot parse subset literal: {0}")]
    SubsetSyntax(String),

    #[error("element has {got} coordinates, group has {expected} factors")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("coordinate {value} out of range for modulus {modulus}")]
    CoordinateRange { value: u64, modulus: u64 },

    #[error("invalid subset: {0}")]
    InvalidSubset(String),

    #[error("sizes differ: |E| = {e}, |B| = {b}")]
    SizeMismatch { e: usize, b: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix shape error: {0}")]
    Shape(String),

    #[error("map is not a well-defined homomorphism: {0}")]
    IllDefinedMap(String),

    #[error("map is not invertible")]
    NotInvertible,

    #[error("{what} exceeds cap: {size} > {cap}")]
    CapExceeded { what: &'static str, size: u128, cap: u128 },

    #[error("random sampling budget of {0} draws exhausted")]
    BudgetExhausted(u64),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
