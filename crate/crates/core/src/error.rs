use thiserror::Error;

use crate::dsl::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u128),

    #[error("F_{0}(i) requires p ≡ 3 (mod 4); x^2 + 1 splits over F_{0}")]
    NotThreeModFour(u64),

    #[error("characteristic 2 is excluded")]
    CharacteristicTwo,

    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },

    #[error("zero has no multiplicative inverse")]
    ZeroInverse,

    #[error("zero has no multiplicative order")]
    ZeroOrder,

    #[error("matrix is singular over F_{0}")]
    Singular(u64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("|GL2(F_{p})| = {order} exceeds the enumeration bound {bound}")]
    EnumerationBound { p: u64, order: u128, bound: u128 },

    #[error("subgroup closure exceeded cap {cap} (reached {reached} elements)")]
    CapExceeded { cap: usize, reached: usize },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("subgroup orders differ: {left} vs {right}")]
    OrderMismatch { left: usize, right: usize },

    #[error("subgroups live in different ambient groups: GL2(F_{left}) vs GL2(F_{right})")]
    AmbientMismatch { left: u64, right: u64 },

    #[error("empty sample: {0}")]
    EmptySample(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("{0}")]
    Parse(#[from] ParseError),

    #[error("cannot evaluate at p = {p}: {reason}")]
    Eval { p: u64, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures caused by a computation limit rather than bad input.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::EnumerationBound { .. } | Error::CapExceeded { .. } | Error::BudgetExceeded(_)
        )
    }

    pub fn is_invariant(&self) -> bool {
        matches!(self, Error::InvariantViolation(_))
    }
}
