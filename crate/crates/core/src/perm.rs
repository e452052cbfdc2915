//! Permutation arithmetic, path and adjacency representations, and cycle
//! decomposition.
//!
//! Symbols are stored 0-based. Everything that leaves the crate as text
//! (the `Display` impls, [`Permutation::to_one_based`]) is 1-based.
//!
//! Composition is left to right: `compose(a, b)(i) == b(a(i))`.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};

fn check_bijection(elems: &[usize]) -> Result<()> {
    let n = elems.len();
    let mut seen = vec![false; n];
    for &s in elems {
        if s >= n {
            return Err(Error::SymbolOutOfRange { symbol: s + 1, n });
        }
        if core::mem::replace(&mut seen[s], true) {
            return Err(Error::DuplicateSymbol { symbol: s + 1 });
        }
    }
    Ok(())
}

/// A permutation in path representation: `elems[i]` is the symbol visited at
/// position `i`. Interpreted cyclically, so the last symbol is followed by the
/// first.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Permutation {
    elems: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from 0-based symbols.
    pub fn new(elems: Vec<usize>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::TooSmall { n: 0, min: 1 });
        }
        check_bijection(&elems)?;
        Ok(Self { elems })
    }

    /// Builds a permutation from 1-based symbols.
    pub fn from_one_based(symbols: &[usize]) -> Result<Self> {
        let n = symbols.len();
        let mut elems = Vec::with_capacity(n);
        for &s in symbols {
            if s == 0 || s > n {
                return Err(Error::SymbolOutOfRange { symbol: s, n });
            }
            elems.push(s - 1);
        }
        Self::new(elems)
    }

    pub(crate) fn from_vec_unchecked(elems: Vec<usize>) -> Self {
        debug_assert!(check_bijection(&elems).is_ok());
        Self { elems }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            elems: (0..n).collect(),
        }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.elems.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.elems.is_empty()
    }

    #[inline]
    pub fn as_slice(&self) -> &[usize] {
        &self.elems
    }

    /// The symbol at position `i` (0-based on both sides).
    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.elems[i]
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.elems.iter().map(|&s| s + 1).collect()
    }

    /// Swaps the symbols at positions `i` and `j`.
    pub fn swap_positions(&mut self, i: usize, j: usize) {
        self.elems.swap(i, j);
    }

    /// Rotates the path so that symbol `0` comes first.
    pub fn rotated_to_first(&self) -> Self {
        let start = self.elems.iter().position(|&s| s == 0).unwrap_or(0);
        let mut elems = Vec::with_capacity(self.len());
        elems.extend_from_slice(&self.elems[start..]);
        elems.extend_from_slice(&self.elems[..start]);
        Self { elems }
    }

    /// Canonical key for the undirected tour: starts at symbol `0`, and the
    /// second symbol is the smaller of its two neighbours.
    pub fn canonical_undirected(&self) -> Self {
        let mut p = self.rotated_to_first();
        let n = p.len();
        if n > 2 && p.elems[1] > p.elems[n - 1] {
            p.elems[1..].reverse();
        }
        p
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, s) in self.elems.iter().enumerate() {
            if k > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}", s + 1)?;
        }
        Ok(())
    }
}

/// Successor map of a tour. `succ[i]` is the symbol visited right after `i`.
///
/// Any bijection is accepted; it describes a single tour only when
/// [`AdjacencyMap::is_single_cycle`] holds.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct AdjacencyMap {
    succ: Vec<usize>,
}

impl AdjacencyMap {
    pub fn new(succ: Vec<usize>) -> Result<Self> {
        if succ.is_empty() {
            return Err(Error::TooSmall { n: 0, min: 1 });
        }
        check_bijection(&succ)?;
        Ok(Self { succ })
    }

    pub(crate) fn from_vec_unchecked(succ: Vec<usize>) -> Self {
        debug_assert!(check_bijection(&succ).is_ok());
        Self { succ }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.succ.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.succ.is_empty()
    }

    #[inline]
    pub fn succ(&self, i: usize) -> usize {
        self.succ[i]
    }

    #[inline]
    pub fn as_slice(&self) -> &[usize] {
        &self.succ
    }

    /// Reinterprets the successor map as a permutation-as-function.
    pub fn as_permutation(&self) -> Permutation {
        Permutation {
            elems: self.succ.clone(),
        }
    }

    /// Number of symbols reached by walking from symbol `0` until it returns.
    pub fn orbit_len_from_first(&self) -> usize {
        let mut cur = self.succ[0];
        let mut steps = 1;
        while cur != 0 {
            cur = self.succ[cur];
            steps += 1;
        }
        steps
    }

    pub fn is_single_cycle(&self) -> bool {
        self.orbit_len_from_first() == self.len()
    }
}

impl fmt::Display for AdjacencyMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, s) in self.succ.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{}->{}", i + 1, s + 1)?;
        }
        Ok(())
    }
}

/// Non-singleton cycles of a bijection.
///
/// Each cycle is listed in orbit order starting at its smallest symbol, and
/// cycles are sorted by their smallest symbol.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    cycles: Vec<Vec<usize>>,
    singleton_count: usize,
    n: usize,
}

impl CycleDecomposition {
    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    /// Number of listed (non-singleton) cycles.
    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    pub fn singleton_count(&self) -> usize {
        self.singleton_count
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Cycle index of every symbol, `None` for fixed points.
    pub fn membership(&self) -> Vec<Option<usize>> {
        let mut owner = vec![None; self.n];
        for (k, cycle) in self.cycles.iter().enumerate() {
            for &s in cycle {
                owner[s] = Some(k);
            }
        }
        owner
    }
}

pub fn compose(a: &Permutation, b: &Permutation) -> Result<Permutation> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(Permutation {
        elems: a.elems.iter().map(|&x| b.elems[x]).collect(),
    })
}

pub fn inverse(a: &Permutation) -> Permutation {
    let mut inv = vec![0; a.len()];
    for (i, &x) in a.elems.iter().enumerate() {
        inv[x] = i;
    }
    Permutation { elems: inv }
}

/// Successor map of the tour `sigma`: `succ(sigma(i)) = sigma(i + 1)` with
/// wraparound.
pub fn to_adjacency(sigma: &Permutation) -> AdjacencyMap {
    let n = sigma.len();
    let mut succ = vec![0; n];
    for i in 0..n {
        succ[sigma.elems[i]] = sigma.elems[(i + 1) % n];
    }
    AdjacencyMap { succ }
}

/// Path that starts at symbol `0` and follows `e`.
pub fn from_adjacency(e: &AdjacencyMap) -> Result<Permutation> {
    let n = e.len();
    let mut path = Vec::with_capacity(n);
    let mut cur = 0;
    loop {
        path.push(cur);
        cur = e.succ[cur];
        if cur == 0 {
            break;
        }
        if path.len() == n {
            // only reachable for non-bijective input
            return Err(Error::MultipleCycles {
                visited: path.len(),
                n,
            });
        }
    }
    if path.len() != n {
        return Err(Error::MultipleCycles {
            visited: path.len(),
            n,
        });
    }
    Ok(Permutation { elems: path })
}

/// Cycle decomposition of a bijection given as a function table.
pub fn cycles(f: &[usize]) -> CycleDecomposition {
    let n = f.len();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    let mut singleton_count = 0;
    for start in 0..n {
        if seen[start] {
            continue;
        }
        let mut cycle = Vec::new();
        let mut cur = start;
        while !seen[cur] {
            seen[cur] = true;
            cycle.push(cur);
            cur = f[cur];
        }
        if cycle.len() == 1 {
            singleton_count += 1;
        } else {
            out.push(cycle);
        }
    }
    CycleDecomposition {
        cycles: out,
        singleton_count,
        n,
    }
}

/// Uniformly random ordering of `n` symbols.
pub fn random_permutation<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<Permutation> {
    if n == 0 {
        return Err(Error::TooSmall { n, min: 1 });
    }
    let mut elems: Vec<usize> = (0..n).collect();
    elems.shuffle(rng);
    Ok(Permutation { elems })
}

/// Applies `k` independent transpositions, each between two distinct uniformly
/// chosen positions of the path. Successive swaps may overlap or cancel.
pub fn mutate_swaps<R: Rng + ?Sized>(p: &Permutation, k: usize, rng: &mut R) -> Permutation {
    let n = p.len();
    let mut out = p.clone();
    if k == 0 || n < 2 {
        return out;
    }
    for _ in 0..k {
        let i = rng.gen_range(0..n);
        let mut j = rng.gen_range(0..n - 1);
        if j >= i {
            j += 1;
        }
        out.elems.swap(i, j);
    }
    out
}
