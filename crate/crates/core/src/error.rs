use thiserror::Error;

/// Which hypothesis of a coset-table computation was violated.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypothesisViolation {
    /// `M` contains the commutator subgroup `S` of the ambient group.
    MContainsS,
    /// `M` is not a subgroup of the ambient group.
    MNotInAmbient,
    /// `H_g` is not a normal subgroup of `H`.
    NotNormal,
    /// The map `M -> H/H_g` misses at least one coset.
    QuotientNotSurjective,
}

impl std::fmt::Display for HypothesisViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            HypothesisViolation::MContainsS => "M contains S",
            HypothesisViolation::MNotInAmbient => "M is not contained in H",
            HypothesisViolation::NotNormal => "H_g is not normal in H",
            HypothesisViolation::QuotientNotSurjective => "M -> H/H_g is not surjective",
        };
        f.write_str(s)
    }
}

/// Errors shared across the library.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("modulus {0} is not prime")]
    CompositeModulus(u64),

    #[error("modulus {0} is at or above the 2^62 cap")]
    ModulusTooLarge(u64),

    #[error("zero has no inverse mod {0}")]
    ZeroInverse(u64),

    #[error("element is not invertible mod {0}")]
    SingularMatrix(u64),

    #[error("p and ell coincide at {0}")]
    EqualCharacteristic(u64),

    #[error("closure exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },

    #[error("omega for prime {p} lies outside [0, 1)")]
    OmegaOutOfRange { p: u64 },

    #[error("delta {0} lies outside [0, 1)")]
    DeltaOutOfRange(f64),

    #[error("set is not a subgroup of the ambient group")]
    NotASubgroup,

    #[error("class contains an element outside the det = {expected} coset")]
    NotInCoset { expected: u64 },

    #[error("hypothesis failed: {0}")]
    HypothesisFailed(HypothesisViolation),

    #[error("curve is singular: 4a^3 + 27b^2 = 0")]
    SingularCurve,

    #[error("coefficient magnitude {0} exceeds the 2^40 cap")]
    CoefficientTooLarge(i64),

    #[error("trace {a_p} violates the Hasse bound at p = {p}")]
    HasseViolation { p: u64, a_p: i64 },
}

pub type Result<T> = std::result::Result<T, Error>;
