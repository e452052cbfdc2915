//! Edge-transmitting crossover of cyclic permutations.
//!
//! Three operators recombine two parent tours using only edges found in the
//! parents:
//!
//! * [`directed::crossover`] samples uniformly among all offspring that keep
//!   directed edges. It is cycle crossover on the successor maps, repeated
//!   until the result is a single tour.
//! * [`undirected::crossover`] works on undirected edges. It exchanges random
//!   unions of AB-cycles until the result is a Hamiltonian cycle.
//! * [`optimal::optimal_crossover`] returns the cheapest directed offspring
//!   for an edge-additive cost.
//!
//! [`oracle`] enumerates the same offspring sets exhaustively for small
//! sizes.
//!
//! The crate is `no_std` and needs only `alloc`. Symbols are 0-based in memory
//! and printed 1-based.

#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod directed;
mod error;
pub mod fitness;
pub mod optimal;
pub mod oracle;
mod outcome;
pub mod perm;
pub mod undirected;

pub use error::{Error, Result};
pub use outcome::CrossoverOutcome;
pub use perm::{AdjacencyMap, CycleDecomposition, Permutation};
