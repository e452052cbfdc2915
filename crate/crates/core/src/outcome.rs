use crate::perm::Permutation;

/// Result of a single crossover.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossoverOutcome {
    /// Offspring in path representation, starting at symbol 1.
    pub offspring: Permutation,
    /// Number of candidate draws, at least 1.
    pub trials: u64,
    /// Offspring describes the same tour as one of the parents.
    pub trivial: bool,
    /// Inheritance units available to the operator: non-singleton cycles for
    /// directed crossover, the smallest AB-cycle count over all traversals for
    /// undirected crossover.
    pub units: usize,
    /// Seed of the random stream that produced this outcome, when known.
    pub seed: Option<u64>,
}

impl CrossoverOutcome {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }
}
