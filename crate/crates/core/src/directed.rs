//! Perfect crossover for directed edges.
//!
//! Cycle crossover is applied to the adjacency representations of the two
//! parents. The cycles of `pi = E_b . E_a^-1` are the units of linked
//! inheritance; a candidate takes the successor from parent A on a chosen
//! union of cycles and from parent B elsewhere. Candidates are redrawn until
//! the successor map forms a single tour.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::outcome::CrossoverOutcome;
use crate::perm::{self, AdjacencyMap, CycleDecomposition, Permutation};

/// Failed trials per cycle tolerated before boundary choices are re-admitted
/// under `avoid_trivial`.
pub const TRIVIAL_FALLBACK_FACTOR: u64 = 64;

/// Adjacency maps of both parents together with the cycles of
/// `pi = E_b . E_a^-1`.
#[derive(Debug, Clone)]
pub struct Inheritance {
    pub ea: AdjacencyMap,
    pub eb: AdjacencyMap,
    pub decomposition: CycleDecomposition,
    owner: Vec<Option<usize>>,
}

impl Inheritance {
    /// Number of non-singleton cycles.
    pub fn cycle_count(&self) -> usize {
        self.decomposition.len()
    }

    /// Cycle that owns symbol `i`, `None` when both parents agree on its
    /// successor.
    pub fn owner(&self, i: usize) -> Option<usize> {
        self.owner[i]
    }

    fn fill_candidate(&self, chosen: &[bool], buf: &mut Vec<usize>) {
        buf.clear();
        buf.extend((0..self.ea.len()).map(|i| match self.owner[i] {
            Some(k) if chosen[k] => self.ea.succ(i),
            _ => self.eb.succ(i),
        }));
    }
}

/// A union of inheritance cycles: cycle `k` takes its successors from parent A
/// iff `chosen[k]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChiSelection {
    chosen: Vec<bool>,
}

impl ChiSelection {
    pub fn new(chosen: Vec<bool>) -> Self {
        Self { chosen }
    }

    pub fn none(m: usize) -> Self {
        Self {
            chosen: vec![false; m],
        }
    }

    pub fn all(m: usize) -> Self {
        Self {
            chosen: vec![true; m],
        }
    }

    pub fn from_indices(m: usize, indices: &[usize]) -> Self {
        let mut chosen = vec![false; m];
        for &k in indices {
            chosen[k] = true;
        }
        Self { chosen }
    }

    /// The `mask`-th subset: bit `k` selects cycle `k`.
    pub fn from_mask(m: usize, mask: u64) -> Self {
        Self {
            chosen: (0..m).map(|k| mask >> k & 1 == 1).collect(),
        }
    }

    pub fn complement(&self) -> Self {
        Self {
            chosen: self.chosen.iter().map(|c| !c).collect(),
        }
    }

    pub fn contains(&self, k: usize) -> bool {
        self.chosen[k]
    }

    pub fn as_flags(&self) -> &[bool] {
        &self.chosen
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.chosen.len()).filter(|&k| self.chosen[k]).collect()
    }

    /// Empty or full selection, which reproduces a parent.
    pub fn is_boundary(&self) -> bool {
        self.chosen.iter().all(|&c| c) || self.chosen.iter().all(|&c| !c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DirectedOptions {
    /// Exclude the empty and the full selection from the draws.
    pub avoid_trivial: bool,
    pub max_trials: Option<u64>,
}

impl Default for DirectedOptions {
    fn default() -> Self {
        Self {
            avoid_trivial: true,
            max_trials: None,
        }
    }
}

pub fn derive_inheritance_cycles(a: &Permutation, b: &Permutation) -> Result<Inheritance> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::TooSmall { n: a.len(), min: 2 });
    }
    let ea = perm::to_adjacency(a);
    let eb = perm::to_adjacency(b);
    let ea_inv = perm::inverse(&ea.as_permutation());
    // pi(i) = E_a^-1(E_b(i))
    let pi = perm::compose(&eb.as_permutation(), &ea_inv)?;
    let decomposition = perm::cycles(pi.as_slice());
    let owner = decomposition.membership();
    Ok(Inheritance {
        ea,
        eb,
        decomposition,
        owner,
    })
}

/// Successor map that follows parent A on the selected cycles and parent B
/// everywhere else. Always a bijection; not necessarily a single tour.
pub fn build_candidate(inh: &Inheritance, chi: &ChiSelection) -> AdjacencyMap {
    assert_eq!(chi.chosen.len(), inh.cycle_count(), "selection size");
    let mut buf = Vec::new();
    inh.fill_candidate(&chi.chosen, &mut buf);
    AdjacencyMap::from_vec_unchecked(buf)
}

fn is_single_cycle(succ: &[usize]) -> bool {
    let mut cur = succ[0];
    let mut steps = 1;
    while cur != 0 {
        cur = succ[cur];
        steps += 1;
    }
    steps == succ.len()
}

fn walk_path(succ: &[usize]) -> Permutation {
    let mut path = Vec::with_capacity(succ.len());
    let mut cur = 0;
    loop {
        path.push(cur);
        cur = succ[cur];
        if cur == 0 {
            break;
        }
    }
    Permutation::from_vec_unchecked(path)
}

pub(crate) fn draw_selection<R: Rng + ?Sized>(rng: &mut R, out: &mut [bool], allow_boundary: bool) {
    loop {
        let mut bits = 0u64;
        for (k, slot) in out.iter_mut().enumerate() {
            if k % 64 == 0 {
                bits = rng.gen();
            }
            *slot = bits & 1 == 1;
            bits >>= 1;
        }
        let ones = out.iter().filter(|&&c| c).count();
        if allow_boundary || (ones != 0 && ones != out.len()) {
            return;
        }
    }
}

/// Draws state shared by [`crossover`] and [`crossover_pair`].
struct Sampler {
    m: usize,
    boundaries_admitted: bool,
    failures: u64,
    trials: u64,
    max_trials: Option<u64>,
}

impl Sampler {
    fn new(m: usize, opts: &DirectedOptions) -> Self {
        Self {
            m,
            boundaries_admitted: !opts.avoid_trivial || m < 2,
            failures: 0,
            trials: 0,
            max_trials: opts.max_trials,
        }
    }

    fn next<R: Rng + ?Sized>(&mut self, rng: &mut R, chosen: &mut [bool]) -> Result<(), u64> {
        if self.max_trials.is_some_and(|max| self.trials >= max) {
            return Err(self.trials);
        }
        self.trials += 1;
        draw_selection(rng, chosen, self.boundaries_admitted);
        Ok(())
    }

    fn reject(&mut self) {
        self.failures += 1;
        if !self.boundaries_admitted && self.failures >= TRIVIAL_FALLBACK_FACTOR * self.m as u64 {
            self.boundaries_admitted = true;
        }
    }
}

fn identical_outcome(a: &Permutation) -> CrossoverOutcome {
    CrossoverOutcome {
        offspring: a.rotated_to_first(),
        trials: 1,
        trivial: true,
        units: 0,
        seed: None,
    }
}

/// Samples one offspring uniformly from all single-tour cycle unions
/// admitted by `opts`.
pub fn crossover<R: Rng + ?Sized>(
    a: &Permutation,
    b: &Permutation,
    rng: &mut R,
    opts: &DirectedOptions,
) -> Result<CrossoverOutcome> {
    let inh = derive_inheritance_cycles(a, b)?;
    crossover_with(&inh, a, rng, opts)
}

/// As [`crossover`], reusing an already derived decomposition.
pub fn crossover_with<R: Rng + ?Sized>(
    inh: &Inheritance,
    a: &Permutation,
    rng: &mut R,
    opts: &DirectedOptions,
) -> Result<CrossoverOutcome> {
    let m = inh.cycle_count();
    if m == 0 {
        return Ok(identical_outcome(a));
    }
    let mut sampler = Sampler::new(m, opts);
    let mut chosen = vec![false; m];
    let mut buf = Vec::with_capacity(a.len());
    loop {
        sampler
            .next(rng, &mut chosen)
            .map_err(|trials| Error::TrialBudgetExhausted {
                fallback: a.rotated_to_first(),
                trials,
            })?;
        inh.fill_candidate(&chosen, &mut buf);
        if is_single_cycle(&buf) {
            break;
        }
        sampler.reject();
    }
    let trivial = buf == inh.ea.as_slice() || buf == inh.eb.as_slice();
    Ok(CrossoverOutcome {
        offspring: walk_path(&buf),
        trials: sampler.trials,
        trivial,
        units: m,
        seed: None,
    })
}

/// Two complementary offspring from one selection and its complement; both
/// must form single tours.
pub fn crossover_pair<R: Rng + ?Sized>(
    a: &Permutation,
    b: &Permutation,
    rng: &mut R,
    opts: &DirectedOptions,
) -> Result<(CrossoverOutcome, CrossoverOutcome)> {
    let inh = derive_inheritance_cycles(a, b)?;
    let m = inh.cycle_count();
    if m == 0 {
        return Ok((identical_outcome(a), identical_outcome(a)));
    }
    let mut sampler = Sampler::new(m, opts);
    let mut chosen = vec![false; m];
    let mut flipped = vec![false; m];
    let mut first = Vec::with_capacity(a.len());
    let mut second = Vec::with_capacity(a.len());
    loop {
        sampler
            .next(rng, &mut chosen)
            .map_err(|trials| Error::TrialBudgetExhausted {
                fallback: a.rotated_to_first(),
                trials,
            })?;
        inh.fill_candidate(&chosen, &mut first);
        if is_single_cycle(&first) {
            for (f, c) in flipped.iter_mut().zip(&chosen) {
                *f = !c;
            }
            inh.fill_candidate(&flipped, &mut second);
            if is_single_cycle(&second) {
                break;
            }
        }
        sampler.reject();
    }
    let make = |succ: &[usize]| CrossoverOutcome {
        offspring: walk_path(succ),
        trials: sampler.trials,
        trivial: succ == inh.ea.as_slice() || succ == inh.eb.as_slice(),
        units: m,
        seed: None,
    };
    Ok((make(&first), make(&second)))
}
