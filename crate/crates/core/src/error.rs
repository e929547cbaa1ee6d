use thiserror::Error;

/// Errors raised by the library. Each variant maps onto one failure class of
/// the command line surface (validation vs. resource guard).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("NotPrime: {0} is not prime")]
    NotPrime(u64),

    #[error("TooLarge: {0}")]
    TooLarge(String),

    #[error("OutOfRange: {what} = {value} exceeds {limit}")]
    OutOfRange { what: &'static str, value: u64, limit: u64 },

    #[error("HypothesisViolated: {0}")]
    HypothesisViolated(String),

    #[error("Divergent: {0}")]
    Divergent(String),

    #[error("InfeasibleParams: {0}")]
    InfeasibleParams(String),

    #[error("ClassMismatch: |Re D| = {value} is not in the interval of class {class}")]
    ClassMismatch { value: f64, class: u32 },

    #[error("LengthViolation: polynomial length {length} is not below q = {q}")]
    LengthViolation { length: f64, q: u64 },

    #[error("QuadratureFailure: {0}")]
    QuadratureFailure(String),

    #[error("DomainError: {0}")]
    DomainError(String),

    #[error("Degenerate: {0}")]
    Degenerate(String),

    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// True for errors that come from a resource guard rather than from bad input.
    pub fn is_resource_guard(&self) -> bool {
        matches!(self, Error::TooLarge(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
