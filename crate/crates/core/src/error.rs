use crate::perm::Permutation;

/// Errors produced by the permutation primitives and crossover operators.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("size mismatch: {left} vs {right}")]
    SizeMismatch { left: usize, right: usize },

    #[error("permutation must contain at least {min} symbols, got {n}")]
    TooSmall { n: usize, min: usize },

    #[error("symbol {symbol} is out of range for size {n}")]
    SymbolOutOfRange { symbol: usize, n: usize },

    #[error("symbol {symbol} occurs more than once")]
    DuplicateSymbol { symbol: usize },

    /// The successor map closes a cycle before visiting every symbol.
    #[error("successor map has more than one cycle (walk from symbol 1 covered {visited} of {n})")]
    MultipleCycles { visited: usize, n: usize },

    #[error("trial budget exhausted after {trials} trials")]
    TrialBudgetExhausted { fallback: Permutation, trials: u64 },

    #[error("candidate budget exhausted after {candidates} candidates")]
    CandidateBudgetExhausted {
        fallback: Permutation,
        cost: f64,
        candidates: u64,
    },

    #[error("AB-cycle decomposition failed after {restarts} restarts")]
    DecompositionFailed { restarts: usize },

    /// Exhaustive enumeration refused because the search space is too large.
    #[error("enumeration refused: {size} exceeds limit {limit}")]
    TooLarge { size: usize, limit: usize },

    #[error("invalid instance: {0}")]
    InvalidInstance(&'static str),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
