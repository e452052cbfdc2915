//! Optimal directed crossover for edge-additive costs.
//!
//! The cost of a candidate splits into one term per inheritance cycle, taken
//! from parent A or parent B depending on the selection. Starting from the
//! selection where every cycle takes its cheaper side, flipping cycle `k`
//! costs `penalty(k) = |cost_a(k) - cost_b(k)|`. Flip sets are enumerated in
//! nondecreasing total penalty with a lazy best-first expansion, and the
//! first candidate forming a single tour is the cheapest transmissive
//! offspring.

use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::directed::{self, ChiSelection, Inheritance};
use crate::error::{Error, Result};
use crate::fitness::TspInstance;
use crate::outcome::CrossoverOutcome;
use crate::perm::Permutation;

/// Default candidate budget.
pub const DEFAULT_MAX_CANDIDATES: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleCost {
    pub cycle_index: usize,
    pub cost_a: f64,
    pub cost_b: f64,
    pub penalty: f64,
    pub cheaper_side: Side,
}

/// Per-cycle costs of both sides. Shared edges are left out; see
/// [`shared_cost`].
pub fn cycle_costs<D: Fn(usize, usize) -> f64>(inh: &Inheritance, delta: D) -> Vec<CycleCost> {
    inh.decomposition
        .cycles()
        .iter()
        .enumerate()
        .map(|(k, cycle)| {
            let cost_a: f64 = cycle.iter().map(|&i| delta(i, inh.ea.succ(i))).sum();
            let cost_b: f64 = cycle.iter().map(|&i| delta(i, inh.eb.succ(i))).sum();
            CycleCost {
                cycle_index: k,
                cost_a,
                cost_b,
                penalty: (cost_a - cost_b).abs(),
                cheaper_side: if cost_a <= cost_b { Side::A } else { Side::B },
            }
        })
        .collect()
}

/// Cost of the edges both parents share, paid by every candidate.
pub fn shared_cost<D: Fn(usize, usize) -> f64>(inh: &Inheritance, delta: D) -> f64 {
    (0..inh.ea.len())
        .filter(|&i| inh.owner(i).is_none())
        .map(|i| delta(i, inh.ea.succ(i)))
        .sum()
}

const NO_PARENT: usize = usize::MAX;

#[derive(Debug, Clone, Copy)]
struct Node {
    parent: usize,
    /// Position (in sorted-penalty order) of the largest flipped cycle.
    last: usize,
    sum: f64,
}

/// One emitted selection with its putative cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub selection: ChiSelection,
    /// Flipped cycles, as cycle indices in ascending penalty order.
    pub flipped: Vec<usize>,
    pub cost: f64,
}

/// Lazily enumerates cycle selections in nondecreasing cost.
///
/// Ties are broken by lexicographic order of the flipped positions in the
/// sorted penalty list.
#[derive(Debug, Clone)]
pub struct CandidateStream {
    costs: Vec<CycleCost>,
    base_cost: f64,
    /// Cycle indices sorted by penalty, ascending.
    order: Vec<usize>,
    penalties: Vec<f64>,
    nodes: Vec<Node>,
    heap: Vec<usize>,
    started: bool,
    emitted: u64,
}

impl CandidateStream {
    /// `base_cost` is the cost of the selection in which every cycle takes
    /// its cheaper side, including any shared edges.
    pub fn new(costs: Vec<CycleCost>, shared: f64) -> Self {
        let base_cost = shared
            + costs
                .iter()
                .map(|c| c.cost_a.min(c.cost_b))
                .sum::<f64>();
        let mut order: Vec<usize> = (0..costs.len()).collect();
        order.sort_by(|&x, &y| costs[x].penalty.total_cmp(&costs[y].penalty));
        let penalties = order.iter().map(|&k| costs[k].penalty).collect();
        Self {
            costs,
            base_cost,
            order,
            penalties,
            nodes: Vec::new(),
            heap: Vec::new(),
            started: false,
            emitted: 0,
        }
    }

    pub fn base_cost(&self) -> f64 {
        self.base_cost
    }

    pub fn emitted(&self) -> u64 {
        self.emitted
    }

    pub fn frontier_len(&self) -> usize {
        self.heap.len()
    }

    fn positions(&self, mut id: usize) -> Vec<usize> {
        let mut out = Vec::new();
        while id != NO_PARENT {
            out.push(self.nodes[id].last);
            id = self.nodes[id].parent;
        }
        out.reverse();
        out
    }

    fn less(&self, x: usize, y: usize) -> bool {
        match self.nodes[x].sum.total_cmp(&self.nodes[y].sum) {
            Ordering::Less => true,
            Ordering::Greater => false,
            Ordering::Equal => self.positions(x) < self.positions(y),
        }
    }

    fn push(&mut self, node: Node) {
        let id = self.nodes.len();
        self.nodes.push(node);
        self.heap.push(id);
        let mut i = self.heap.len() - 1;
        while i > 0 {
            let up = (i - 1) / 2;
            if !self.less(self.heap[i], self.heap[up]) {
                break;
            }
            self.heap.swap(i, up);
            i = up;
        }
    }

    fn pop(&mut self) -> Option<usize> {
        if self.heap.is_empty() {
            return None;
        }
        let top = self.heap.swap_remove(0);
        let len = self.heap.len();
        let mut i = 0;
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut best = i;
            if l < len && self.less(self.heap[l], self.heap[best]) {
                best = l;
            }
            if r < len && self.less(self.heap[r], self.heap[best]) {
                best = r;
            }
            if best == i {
                break;
            }
            self.heap.swap(i, best);
            i = best;
        }
        Some(top)
    }

    fn candidate(&self, positions: &[usize], sum: f64) -> Candidate {
        let mut chosen: Vec<bool> = self.costs.iter().map(|c| c.cheaper_side == Side::A).collect();
        let flipped: Vec<usize> = positions.iter().map(|&p| self.order[p]).collect();
        for &k in &flipped {
            chosen[k] = !chosen[k];
        }
        Candidate {
            selection: ChiSelection::new(chosen),
            flipped,
            cost: self.base_cost + sum,
        }
    }

    /// Next selection, or `None` once all `2^m` selections were emitted.
    pub fn next_candidate(&mut self) -> Option<Candidate> {
        let m = self.penalties.len();
        if !self.started {
            self.started = true;
            self.emitted = 1;
            if m > 0 {
                self.push(Node {
                    parent: NO_PARENT,
                    last: 0,
                    sum: self.penalties[0],
                });
            }
            return Some(self.candidate(&[], 0.0));
        }
        let id = self.pop()?;
        self.emitted += 1;
        let node = self.nodes[id];
        let next = node.last + 1;
        if next < m {
            let p = self.penalties[next];
            self.push(Node {
                parent: id,
                last: next,
                sum: node.sum + p,
            });
            let parent_sum = match node.parent {
                NO_PARENT => 0.0,
                q => self.nodes[q].sum,
            };
            self.push(Node {
                parent: node.parent,
                last: next,
                sum: parent_sum + p,
            });
        }
        Some(self.candidate(&self.positions(id), node.sum))
    }
}

impl Iterator for CandidateStream {
    type Item = Candidate;

    fn next(&mut self) -> Option<Candidate> {
        self.next_candidate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OptimalOptions {
    pub max_candidates: u64,
    /// Maximise the summed edge values instead of minimising them.
    pub maximize: bool,
}

impl Default for OptimalOptions {
    fn default() -> Self {
        Self {
            max_candidates: DEFAULT_MAX_CANDIDATES,
            maximize: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalOutcome {
    /// `trials` counts the candidates examined.
    pub outcome: CrossoverOutcome,
    /// Summed edge values of the offspring, in the caller's units.
    pub cost: f64,
}

fn path_cost<D: Fn(usize, usize) -> f64>(p: &Permutation, delta: &D) -> f64 {
    let n = p.len();
    (0..n).map(|i| delta(p.apply(i), p.apply((i + 1) % n))).sum()
}

/// Cheapest offspring made only of parent edges.
pub fn optimal_crossover<D: Fn(usize, usize) -> f64>(
    a: &Permutation,
    b: &Permutation,
    delta: D,
    opts: &OptimalOptions,
) -> Result<OptimalOutcome> {
    let inh = directed::derive_inheritance_cycles(a, b)?;
    let sign = if opts.maximize { -1.0 } else { 1.0 };
    let signed = |i: usize, j: usize| sign * delta(i, j);
    let m = inh.cycle_count();
    let mut stream = CandidateStream::new(cycle_costs(&inh, signed), shared_cost(&inh, signed));
    let mut examined = 0u64;
    while examined < opts.max_candidates {
        let Some(cand) = stream.next_candidate() else {
            break;
        };
        examined += 1;
        debug_assert!(stream.frontier_len() as u64 <= 2 * opts.max_candidates);
        let e = directed::build_candidate(&inh, &cand.selection);
        if e.is_single_cycle() {
            let offspring = crate::perm::from_adjacency(&e)?;
            let trivial = e == inh.ea || e == inh.eb;
            let cost = path_cost(&offspring, &delta);
            return Ok(OptimalOutcome {
                outcome: CrossoverOutcome {
                    offspring,
                    trials: examined,
                    trivial,
                    units: m,
                    seed: None,
                },
                cost,
            });
        }
    }
    let (ca, cb) = (path_cost(a, &delta), path_cost(b, &delta));
    let a_better = if opts.maximize { ca >= cb } else { ca <= cb };
    let (fallback, cost) = if a_better { (a, ca) } else { (b, cb) };
    Err(Error::CandidateBudgetExhausted {
        fallback: fallback.rotated_to_first(),
        cost,
        candidates: examined,
    })
}

/// [`optimal_crossover`] with costs from a [`TspInstance`].
pub fn optimal_crossover_on(
    a: &Permutation,
    b: &Permutation,
    inst: &TspInstance,
    opts: &OptimalOptions,
) -> Result<OptimalOutcome> {
    if inst.n() != a.len() {
        return Err(Error::SizeMismatch {
            left: a.len(),
            right: inst.n(),
        });
    }
    optimal_crossover(a, b, |i, j| inst.cost(i, j), opts)
}
