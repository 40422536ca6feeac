use alloc::string::String;

/// Errors shared across the crate.
///
/// Every operation returns `Result<T>`; nothing panics on bad input. The
/// variants separate the failure classes: construction-time validation,
/// dimension mismatches, map domain violations, enumeration resource
/// guards, and certificate failures.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Rejected at construction: degenerate or invalid gauge data.
    #[error("invalid gauge spec: {0}")]
    InvalidSpec(String),

    /// A point lies outside the domain of a map or check.
    #[error("domain error: {0}")]
    Domain(String),

    /// The enumeration box exceeds the configured point cap.
    #[error("enumeration box of {points} lattice points exceeds the resource cap {cap}")]
    ResourceLimit { points: u128, cap: u128 },

    /// Rejection sampling failed too many consecutive times.
    #[error("rejection sampling failed {attempts} consecutive times (degenerate spec)")]
    Sampling { attempts: u64 },

    /// Precondition of unimodular completion: entries must be coprime.
    #[error("entries are not coprime (gcd = {gcd})")]
    NotPrimitive { gcd: i128 },

    /// An integer matrix fails det = +1.
    #[error("matrix is not unimodular with determinant +1 (det = {det})")]
    NotUnimodular { det: i128 },

    /// Checked integer arithmetic overflowed i128.
    #[error("integer overflow in exact arithmetic")]
    Overflow,

    /// Exact linear algebra hit a singular matrix.
    #[error("singular matrix in exact arithmetic")]
    Singular,

    /// A produced certificate violates its own invariants.
    #[error("certificate failure: {0}")]
    Certificate(String),
}

pub type Result<T> = core::result::Result<T, Error>;
