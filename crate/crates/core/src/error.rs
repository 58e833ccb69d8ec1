use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroExtensionDegree,
    #[error("field order {p}^{e} does not fit in 64 bits")]
    FieldTooLarge { p: u64, e: u32 },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("operation needs odd characteristic, but q = {0}")]
    EvenCharacteristic(u64),
    #[error("zero input is not allowed: {0}")]
    ZeroInput(&'static str),
    #[error("expected a non-constant polynomial")]
    ConstantPolynomial,
    #[error("{0} is not a monic irreducible polynomial")]
    NotAPrime(String),
    #[error("valuation {valuation} at {place} is negative")]
    NegativeValuation { valuation: i64, place: String },
    #[error("n = {n} must be at least 2 and divide q - 1 = {}", .q - 1)]
    BadExponent { n: u64, q: u64 },
    #[error("inputs are not relatively prime")]
    NotCoprime,
    #[error("ramification set is empty")]
    EmptyRamification,
    #[error("{0} is not a nonsquare in the base field")]
    NotANonsquare(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
