//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("p = {0} is not prime")]
    NonPrime(u64),
    #[error("extension degree must be >= 1, got {0}")]
    BadDegree(u32),
    #[error("q = {q} exceeds the table cap {cap}")]
    FieldTooLarge { q: u128, cap: u64 },
    #[error("discrete log of zero is undefined")]
    DlogOfZero,
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("gcd(h_1,...,h_n) must be 1, got {0}")]
    HNotCoprime(u64),
    #[error("invalid deformation parameters: {0}")]
    BadDeformParams(String),
    #[error("p-adic context requires an odd prime, got p = {0}")]
    EvenCharacteristic(u64),
    #[error("gamma argument denominator {0} is divisible by p = {1}")]
    GammaDenominator(i64, u64),
    #[error("working modulus p^{digits} does not fit in 64 bits (p = {p})")]
    PrecisionTooLarge { p: u64, digits: u32 },
    #[error("value has negative valuation {0}; not a p-adic integer")]
    NegativeValuation(i64),
    #[error("value is not a rational integer: nonzero component off the prime field")]
    NonScalar,
    #[error("cannot reconstruct: residue {residue} mod p^{digits} exceeds bound {bound}")]
    ReconstructOutOfRange {
        residue: u64,
        digits: u32,
        bound: u64,
    },
    #[error("insufficient p-adic precision: {have} digits available, {need} required")]
    InsufficientPrecision { have: i64, need: i64 },
    #[error(
        "complex engine failed to round to an integer: residual {residual:.3e} at {bits} bits"
    )]
    RoundingResidual { residual: f64, bits: u32 },
    #[error("engine precondition violated: {0}")]
    EnginePrecondition(String),
    #[error("t = gcd(n, q-1) = {0} does not divide n = {1}")]
    DworkProfileInvalid(u32, u32),
    #[error("parameter lists have mismatched lengths: {0} vs {1}")]
    ListLengthMismatch(usize, usize),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors caused by calling an engine outside its stated hypotheses.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::EnginePrecondition(_)
                | Error::EvenCharacteristic(_)
                | Error::GammaDenominator(..)
                | Error::DworkProfileInvalid(..)
        )
    }

    /// True for errors caused by exhausting numeric precision.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            Error::RoundingResidual { .. }
                | Error::InsufficientPrecision { .. }
                | Error::PrecisionTooLarge { .. }
                | Error::ReconstructOutOfRange { .. }
        )
    }
}
