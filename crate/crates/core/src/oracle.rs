//! Exhaustive ground truth for small instances.
//!
//! Everything here is exponential and size-guarded; it exists to check the
//! crossover operators, not to be fast.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use crate::directed::{self, ChiSelection};
use crate::error::{Error, Result};
use crate::fitness::{tour_cost, TspInstance};
use crate::perm::{self, Permutation};
use crate::undirected;

/// Largest number of inheritance cycles enumerated exhaustively.
pub const MAX_DIRECTED_CYCLES: usize = 24;
/// Largest tour size for Hamiltonian-cycle enumeration.
pub const MAX_UNDIRECTED_N: usize = 10;

/// Distinct offspring keyed by canonical path, each with the number of
/// selections that generate it.
///
/// Directed offspring are keyed by the path starting at symbol 1 (one key per
/// successor map); undirected offspring by
/// [`Permutation::canonical_undirected`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OffspringSet {
    pub counts: BTreeMap<Permutation, u64>,
}

impl OffspringSet {
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn contains(&self, p: &Permutation) -> bool {
        self.counts.contains_key(p)
    }

    pub fn iter(&self) -> impl Iterator<Item = &Permutation> {
        self.counts.keys()
    }

    pub fn is_subset(&self, other: &OffspringSet) -> bool {
        self.iter().all(|p| other.contains(p))
    }

    /// The same offspring keyed by their undirected canonical form.
    pub fn to_undirected(&self) -> OffspringSet {
        let mut out = OffspringSet::default();
        for (p, &c) in &self.counts {
            *out.counts.entry(p.canonical_undirected()).or_insert(0) += c;
        }
        out
    }
}

/// Every single-tour successor map obtained from some union of inheritance
/// cycles.
pub fn enumerate_directed(a: &Permutation, b: &Permutation) -> Result<OffspringSet> {
    let inh = directed::derive_inheritance_cycles(a, b)?;
    let m = inh.cycle_count();
    if m > MAX_DIRECTED_CYCLES {
        return Err(Error::TooLarge {
            size: m,
            limit: MAX_DIRECTED_CYCLES,
        });
    }
    let mut out = OffspringSet::default();
    for mask in 0..1u64 << m {
        let e = directed::build_candidate(&inh, &ChiSelection::from_mask(m, mask));
        if let Ok(path) = perm::from_adjacency(&e) {
            *out.counts.entry(path).or_insert(0) += 1;
        }
    }
    Ok(out)
}

/// Every Hamiltonian cycle of the simple graph formed by both parents'
/// undirected edges. With `respectful`, only cycles that keep every edge the
/// parents share.
pub fn enumerate_undirected(a: &Permutation, b: &Permutation, respectful: bool) -> Result<OffspringSet> {
    let n = a.len();
    if n != b.len() {
        return Err(Error::SizeMismatch {
            left: n,
            right: b.len(),
        });
    }
    if n < 3 {
        return Err(Error::TooSmall { n, min: 3 });
    }
    if n > MAX_UNDIRECTED_N {
        return Err(Error::TooLarge {
            size: n,
            limit: MAX_UNDIRECTED_N,
        });
    }
    let (ea, eb) = (undirected::edge_set(a), undirected::edge_set(b));
    let mut adj = vec![Vec::new(); n];
    for &(u, v) in ea.iter().chain(&eb) {
        if !adj[u].contains(&v) {
            adj[u].push(v);
            adj[v].push(u);
        }
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let shared: Vec<(usize, usize)> = ea
        .iter()
        .copied()
        .filter(|e| eb.binary_search(e).is_ok())
        .collect();

    let mut out = OffspringSet::default();
    let mut path = vec![0];
    let mut on_path = vec![false; n];
    on_path[0] = true;
    hamiltonian_dfs(&adj, &mut path, &mut on_path, &mut |cycle| {
        // each undirected cycle is found in both directions; keep one
        if cycle[1] > cycle[n - 1] {
            return;
        }
        let p = Permutation::from_vec_unchecked(cycle.to_vec());
        if respectful {
            let es = undirected::edge_set(&p);
            if !shared.iter().all(|e| es.binary_search(e).is_ok()) {
                return;
            }
        }
        out.counts.insert(p, 1);
    });
    Ok(out)
}

fn hamiltonian_dfs(
    adj: &[Vec<usize>],
    path: &mut Vec<usize>,
    on_path: &mut [bool],
    emit: &mut dyn FnMut(&[usize]),
) {
    let n = adj.len();
    let cur = *path.last().unwrap();
    if path.len() == n {
        if adj[cur].contains(&0) {
            emit(path);
        }
        return;
    }
    for &next in &adj[cur] {
        if !on_path[next] {
            on_path[next] = true;
            path.push(next);
            hamiltonian_dfs(adj, path, on_path, emit);
            path.pop();
            on_path[next] = false;
        }
    }
}

/// Cheapest directed offspring, ties going to the smallest canonical path.
pub fn optimal_offspring(a: &Permutation, b: &Permutation, inst: &TspInstance) -> Result<(Permutation, f64)> {
    let set = enumerate_directed(a, b)?;
    let mut best: Option<(Permutation, f64)> = None;
    for p in set.iter() {
        let c = tour_cost(p, inst)?;
        if best.as_ref().is_none_or(|(_, bc)| c < *bc) {
            best = Some((p.clone(), c));
        }
    }
    Ok(best.expect("parents are always valid offspring"))
}

/// AB-cycles of the directed union graph, found by walking it directly: out
/// along a B-edge, back along an A-edge in reverse, until a loop of even
/// length closes. Returns the node sets (tails of the B-edges) of all
/// loops longer than two edges, each sorted, in order of smallest node.
pub fn directed_ab_cycles(a: &Permutation, b: &Permutation) -> Result<Vec<Vec<usize>>> {
    let n = a.len();
    if n != b.len() {
        return Err(Error::SizeMismatch {
            left: n,
            right: b.len(),
        });
    }
    // out-going B-edge and in-coming A-edge per node
    let mut b_out = vec![0; n];
    let mut a_in = vec![0; n];
    for i in 0..n {
        b_out[b.apply(i)] = b.apply((i + 1) % n);
        a_in[a.apply((i + 1) % n)] = a.apply(i);
    }
    let mut b_used = vec![false; n];
    let mut loops = Vec::new();
    for start in 0..n {
        if b_used[start] {
            continue;
        }
        // walk positions: nodes where a B-edge leaves
        let mut walk: Vec<usize> = vec![start];
        let mut cur = start;
        loop {
            b_used[cur] = true;
            let head = b_out[cur];
            let back = a_in[head];
            if let Some(j) = walk.iter().position(|&x| x == back) {
                let mut nodes = walk.split_off(j);
                if nodes.len() > 1 {
                    nodes.sort_unstable();
                    loops.push(nodes);
                }
                if walk.is_empty() {
                    break;
                }
                cur = *walk.last().unwrap();
                continue;
            }
            walk.push(back);
            cur = back;
        }
    }
    loops.sort();
    Ok(loops)
}
