//! Transmissive crossover for undirected edges.
//!
//! Both parents are merged into an undirected multigraph with every edge
//! labelled by its parent. The graph is partitioned into AB-cycles (closed
//! walks alternating between A- and B-edges) by a randomized greedy
//! traversal. Exchanging a union of AB-cycles (an E-set) in parent A keeps
//! every node at degree two; the trial is accepted when the result is a
//! single Hamiltonian cycle.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::directed::{draw_selection, TRIVIAL_FALLBACK_FACTOR};
use crate::error::{Error, Result};
use crate::outcome::CrossoverOutcome;
use crate::perm::Permutation;

/// Full traversal restarts tolerated before giving up on a decomposition.
pub const MAX_TRAVERSAL_RESTARTS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Parent {
    A,
    B,
}

impl Parent {
    fn index(self) -> usize {
        match self {
            Parent::A => 0,
            Parent::B => 1,
        }
    }

    fn other(self) -> Self {
        match self {
            Parent::A => Parent::B,
            Parent::B => Parent::A,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LabeledEdge {
    pub u: usize,
    pub v: usize,
    pub parent: Parent,
}

impl LabeledEdge {
    fn opposite(&self, x: usize) -> usize {
        if x == self.u {
            self.v
        } else {
            self.u
        }
    }

    pub fn key(&self) -> (usize, usize) {
        (self.u.min(self.v), self.u.max(self.v))
    }
}

/// Union of both parents' undirected edges.
#[derive(Debug, Clone)]
pub struct UnionGraph {
    n: usize,
    edges: Vec<LabeledEdge>,
    pruned_shared: Vec<(usize, usize)>,
    /// Per node, per parent label: incident edge ids.
    incidence: Vec<[Vec<usize>; 2]>,
}

impl UnionGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[LabeledEdge] {
        &self.edges
    }

    /// Undirected edges present in both parents and removed before traversal,
    /// normalised as `(min, max)`.
    pub fn pruned_shared(&self) -> &[(usize, usize)] {
        &self.pruned_shared
    }

    pub fn degree(&self, node: usize, parent: Parent) -> usize {
        self.incidence[node][parent.index()].len()
    }
}

/// Closed walk alternating between A- and B-edges. Holds edge ids of the
/// [`UnionGraph`] it was found in, in walk order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ABCycle {
    edges: Vec<usize>,
}

impl ABCycle {
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

/// A union of AB-cycles: cycle `k` is exchanged iff `chosen[k]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ESet {
    chosen: Vec<bool>,
}

impl ESet {
    pub fn new(chosen: Vec<bool>) -> Self {
        Self { chosen }
    }

    pub fn none(m: usize) -> Self {
        Self::new(vec![false; m])
    }

    pub fn all(m: usize) -> Self {
        Self::new(vec![true; m])
    }

    pub fn from_mask(m: usize, mask: u64) -> Self {
        Self::new((0..m).map(|k| mask >> k & 1 == 1).collect())
    }

    pub fn as_flags(&self) -> &[bool] {
        &self.chosen
    }
}

/// Undirected graph in which every node has exactly two incident edges.
#[derive(Debug, Clone)]
pub struct TwoRegularGraph {
    /// `(neighbour, edge id)` pairs per node.
    nbrs: Vec<[(usize, usize); 2]>,
    edges: Vec<(usize, usize)>,
}

impl TwoRegularGraph {
    /// Undirected edges, normalised as `(min, max)`, sorted.
    pub fn edge_set(&self) -> Vec<(usize, usize)> {
        let mut out: Vec<_> = self.edges.iter().map(|&(u, v)| (u.min(v), u.max(v))).collect();
        out.sort_unstable();
        out
    }

    fn walk_from_first(&self, slot: usize) -> Option<Vec<usize>> {
        let n = self.nbrs.len();
        let mut path = Vec::with_capacity(n);
        path.push(0);
        let (mut cur, mut via) = self.nbrs[0][slot];
        while cur != 0 {
            if path.len() == n {
                return None;
            }
            path.push(cur);
            let [x, y] = self.nbrs[cur];
            let next = if x.1 == via { y } else { x };
            cur = next.0;
            via = next.1;
        }
        (path.len() == n).then_some(path)
    }

    pub fn is_hamiltonian(&self) -> bool {
        self.walk_from_first(0).is_some()
    }

    /// The tour starting at symbol 1, heading to the neighbour in
    /// `slot` (0 or 1) first. `None` when the graph is disconnected.
    pub fn hamiltonian_path(&self, slot: usize) -> Option<Permutation> {
        self.walk_from_first(slot).map(Permutation::from_vec_unchecked)
    }
}

/// Sorted undirected edge set of a tour, normalised as `(min, max)`.
pub fn edge_set(p: &Permutation) -> Vec<(usize, usize)> {
    let n = p.len();
    let mut out: Vec<_> = (0..n)
        .map(|i| {
            let (u, v) = (p.apply(i), p.apply((i + 1) % n));
            (u.min(v), u.max(v))
        })
        .collect();
    out.sort_unstable();
    out
}

pub fn build_union_graph(a: &Permutation, b: &Permutation, respectful: bool) -> Result<UnionGraph> {
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
    let neighbours = |p: &Permutation| {
        let mut nb = vec![[0usize; 2]; n];
        for i in 0..n {
            let (u, v) = (p.apply(i), p.apply((i + 1) % n));
            nb[u][1] = v;
            nb[v][0] = u;
        }
        nb
    };
    let (a_nbrs, b_nbrs) = (neighbours(a), neighbours(b));
    let mut edges = Vec::with_capacity(2 * n);
    let mut pruned_shared = Vec::new();
    for (p, parent, other) in [(a, Parent::A, &b_nbrs), (b, Parent::B, &a_nbrs)] {
        for i in 0..n {
            let (u, v) = (p.apply(i), p.apply((i + 1) % n));
            if respectful && other[u].contains(&v) {
                if parent == Parent::A {
                    pruned_shared.push((u.min(v), u.max(v)));
                }
                continue;
            }
            edges.push(LabeledEdge { u, v, parent });
        }
    }
    let mut incidence = vec![[Vec::new(), Vec::new()]; n];
    for (id, e) in edges.iter().enumerate() {
        incidence[e.u][e.parent.index()].push(id);
        incidence[e.v][e.parent.index()].push(id);
    }
    Ok(UnionGraph {
        n,
        edges,
        pruned_shared,
        incidence,
    })
}

/// Nodes that still have unvisited edges, with O(1) removal.
struct NodePool {
    nodes: Vec<usize>,
    pos: Vec<usize>,
    left: Vec<usize>,
}

impl NodePool {
    fn new(g: &UnionGraph) -> Self {
        let left: Vec<usize> = (0..g.n)
            .map(|u| g.incidence[u][0].len() + g.incidence[u][1].len())
            .collect();
        let mut nodes = Vec::new();
        let mut pos = vec![usize::MAX; g.n];
        for u in 0..g.n {
            if left[u] > 0 {
                pos[u] = nodes.len();
                nodes.push(u);
            }
        }
        Self { nodes, pos, left }
    }

    fn consume(&mut self, u: usize) {
        self.left[u] -= 1;
        if self.left[u] == 0 {
            let p = self.pos[u];
            let last = *self.nodes.last().unwrap();
            self.nodes.swap_remove(p);
            if last != u {
                self.pos[last] = p;
            }
            self.pos[u] = usize::MAX;
        }
    }
}

fn traverse_once<R: Rng + ?Sized>(g: &UnionGraph, rng: &mut R) -> Option<Vec<ABCycle>> {
    let mut used = vec![false; g.edges.len()];
    let mut pool = NodePool::new(g);
    let mut path_nodes: Vec<usize> = Vec::new();
    let mut path_edges: Vec<usize> = Vec::new();
    // positions of each node in path_nodes, increasing
    let mut occ: Vec<Vec<usize>> = vec![Vec::new(); g.n];
    let mut out = Vec::new();
    let mut candidates = Vec::with_capacity(2);

    loop {
        let label = if let Some(&last) = path_edges.last() {
            g.edges[last].parent.other()
        } else {
            // empty walk: continue at the current node if possible, otherwise
            // jump to a random node that still has edges
            if let Some(&v) = path_nodes.last() {
                if pool.left[v] == 0 {
                    occ[v].pop();
                    path_nodes.clear();
                }
            }
            if path_nodes.is_empty() {
                if pool.nodes.is_empty() {
                    return Some(out);
                }
                let start = pool.nodes[rng.gen_range(0..pool.nodes.len())];
                path_nodes.push(start);
                occ[start].push(0);
            }
            Parent::A
        };
        let cur = *path_nodes.last().unwrap();
        candidates.clear();
        candidates.extend(
            g.incidence[cur][label.index()]
                .iter()
                .copied()
                .filter(|&e| !used[e]),
        );
        let e = match candidates.len() {
            0 => return None,
            1 => candidates[0],
            k => candidates[rng.gen_range(0..k)],
        };
        used[e] = true;
        let edge = &g.edges[e];
        pool.consume(edge.u);
        pool.consume(edge.v);
        let next = edge.opposite(cur);
        path_edges.push(e);
        let k = path_edges.len();
        path_nodes.push(next);

        let closing = occ[next].iter().rev().copied().find(|&j| (k - j).is_multiple_of(2));
        match closing {
            Some(j) => {
                let cycle = path_edges.split_off(j);
                for idx in (j + 1..k).rev() {
                    occ[path_nodes[idx]].pop();
                }
                path_nodes.truncate(j + 1);
                out.push(ABCycle { edges: cycle });
            }
            None => occ[next].push(k),
        }
    }
}

/// Partitions every edge of `g` into AB-cycles with a randomized greedy
/// traversal.
pub fn find_ab_cycles<R: Rng + ?Sized>(g: &UnionGraph, rng: &mut R) -> Result<Vec<ABCycle>> {
    for _ in 0..=MAX_TRAVERSAL_RESTARTS {
        if let Some(cycles) = traverse_once(g, rng) {
            return Ok(cycles);
        }
    }
    Err(Error::DecompositionFailed {
        restarts: MAX_TRAVERSAL_RESTARTS,
    })
}

/// Parent A with the A-edges of the chosen AB-cycles replaced by their
/// B-edges. Pruned shared edges are always kept.
pub fn apply_eset(g: &UnionGraph, cycles: &[ABCycle], eset: &ESet) -> TwoRegularGraph {
    assert_eq!(cycles.len(), eset.chosen.len(), "E-set size");
    let mut exchanged = vec![false; g.edges.len()];
    for (cycle, &pick) in cycles.iter().zip(&eset.chosen) {
        if pick {
            for &e in &cycle.edges {
                exchanged[e] = true;
            }
        }
    }
    let mut edges = Vec::with_capacity(g.n);
    for (id, e) in g.edges.iter().enumerate() {
        if (e.parent == Parent::A) != exchanged[id] {
            edges.push((e.u, e.v));
        }
    }
    edges.extend_from_slice(&g.pruned_shared);

    let mut nbrs = vec![[(usize::MAX, usize::MAX); 2]; g.n];
    let mut deg = vec![0u8; g.n];
    for (id, &(u, v)) in edges.iter().enumerate() {
        for (x, y) in [(u, v), (v, u)] {
            assert!(deg[x] < 2, "node {} exceeds degree 2", x + 1);
            nbrs[x][deg[x] as usize] = (y, id);
            deg[x] += 1;
        }
    }
    assert!(deg.iter().all(|&d| d == 2), "result is not 2-regular");
    TwoRegularGraph { nbrs, edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UndirectedOptions {
    /// Prune edges shared by both parents before traversal.
    pub respectful: bool,
    /// Exclude the empty and the full E-set from the draws.
    pub avoid_trivial_esets: bool,
    pub max_trials: Option<u64>,
}

impl Default for UndirectedOptions {
    fn default() -> Self {
        Self {
            respectful: true,
            avoid_trivial_esets: true,
            max_trials: None,
        }
    }
}

pub fn crossover<R: Rng + ?Sized>(
    a: &Permutation,
    b: &Permutation,
    rng: &mut R,
    opts: &UndirectedOptions,
) -> Result<CrossoverOutcome> {
    let g = build_union_graph(a, b, opts.respectful)?;
    if g.edges.is_empty() {
        return Ok(CrossoverOutcome {
            offspring: a.rotated_to_first(),
            trials: 1,
            trivial: true,
            units: 0,
            seed: None,
        });
    }
    let mut boundaries_admitted = !opts.avoid_trivial_esets;
    let mut failures = 0u64;
    let mut trials = 0u64;
    let mut min_units = usize::MAX;
    let mut chosen = Vec::new();
    let accepted = loop {
        if opts.max_trials.is_some_and(|max| trials >= max) {
            return Err(Error::TrialBudgetExhausted {
                fallback: a.rotated_to_first(),
                trials,
            });
        }
        trials += 1;
        let cycles = find_ab_cycles(&g, rng)?;
        let m = cycles.len();
        min_units = min_units.min(m);
        if !boundaries_admitted && m < 2 {
            // a lone AB-cycle admits only trivial E-sets: count the trial as failed
            failures += 1;
            if failures >= TRIVIAL_FALLBACK_FACTOR {
                boundaries_admitted = true;
            }
            continue;
        }
        chosen.clear();
        chosen.resize(m, false);
        draw_selection(rng, &mut chosen, boundaries_admitted);
        let graph = apply_eset(&g, &cycles, &ESet::new(core::mem::take(&mut chosen)));
        if graph.is_hamiltonian() {
            break graph;
        }
        failures += 1;
        if !boundaries_admitted && failures >= TRIVIAL_FALLBACK_FACTOR * m as u64 {
            boundaries_admitted = true;
        }
    };
    let slot = rng.gen_range(0..2);
    let offspring = accepted.hamiltonian_path(slot).expect("accepted graph is a tour");
    let canon = offspring.canonical_undirected();
    let trivial = canon == a.canonical_undirected() || canon == b.canonical_undirected();
    Ok(CrossoverOutcome {
        offspring,
        trials,
        trivial,
        units: min_units,
        seed: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(v: &[usize]) -> Permutation {
        Permutation::from_one_based(v).unwrap()
    }

    fn check_partition(g: &UnionGraph, cycles: &[ABCycle]) {
        let mut seen = vec![0u32; g.edges().len()];
        for c in cycles {
            assert!(c.len() >= 2 && c.len() % 2 == 0);
            let es = c.edges();
            for k in 0..es.len() {
                seen[es[k]] += 1;
                let (e, f) = (&g.edges()[es[k]], &g.edges()[es[(k + 1) % es.len()]]);
                assert_ne!(e.parent, f.parent, "alternation");
                // consecutive edges share a node
                assert!(e.u == f.u || e.u == f.v || e.v == f.u || e.v == f.v);
            }
            // A- and B-edges touch the same node multiset
            let mut ends = [Vec::new(), Vec::new()];
            for &id in es {
                let e = &g.edges()[id];
                ends[e.parent.index()].extend([e.u, e.v]);
            }
            ends[0].sort_unstable();
            ends[1].sort_unstable();
            assert_eq!(ends[0], ends[1]);
        }
        assert!(seen.iter().all(|&s| s == 1), "not a partition");
    }

    #[test]
    fn union_graph_prunes_shared_edges() {
        let g = build_union_graph(&p(&[1, 2, 3, 4]), &p(&[1, 3, 2, 4]), true).unwrap();
        let mut pruned = g.pruned_shared().to_vec();
        pruned.sort_unstable();
        assert_eq!(pruned, [(0, 3), (1, 2)]);
        for u in 0..4 {
            assert_eq!(g.degree(u, Parent::A), 1);
            assert_eq!(g.degree(u, Parent::B), 1);
        }

        let a = p(&[1, 2, 3, 4, 5]);
        let g = build_union_graph(&a, &a, true).unwrap();
        assert!(g.edges().is_empty());
        assert_eq!(g.pruned_shared().len(), 5);

        let g = build_union_graph(&a, &a, false).unwrap();
        assert_eq!(g.edges().len(), 10);
    }

    #[test]
    fn union_graph_degree_invariant() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..1000 {
            let a = perm::random_permutation(50, &mut rng).unwrap();
            let s = rng.gen_range(0..30);
            let b = perm::mutate_swaps(&a, s, &mut rng);
            let g = build_union_graph(&a, &b, true).unwrap();
            for u in 0..50 {
                let (da, db) = (g.degree(u, Parent::A), g.degree(u, Parent::B));
                assert_eq!(da, db);
                assert!(da <= 2);
            }
        }
    }

    #[test]
    fn ab_cycles_partition_example() {
        let (a, b) = (p(&[1, 2, 3, 4, 5, 6]), p(&[1, 3, 2, 4, 6, 5]));
        let g = build_union_graph(&a, &b, true).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        for _ in 0..200 {
            let cycles = find_ab_cycles(&g, &mut rng).unwrap();
            check_partition(&g, &cycles);
        }
        let g = build_union_graph(&a, &a, true).unwrap();
        assert!(find_ab_cycles(&g, &mut rng).unwrap().is_empty());
    }

    #[test]
    fn ab_cycles_partition_random_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for k in 0..1000 {
            let a = perm::random_permutation(50, &mut rng).unwrap();
            let b = if k % 5 == 0 {
                perm::random_permutation(50, &mut rng).unwrap()
            } else {
                let s = rng.gen_range(1..40);
                perm::mutate_swaps(&a, s, &mut rng)
            };
            let g = build_union_graph(&a, &b, k % 2 == 0).unwrap();
            let cycles = find_ab_cycles(&g, &mut rng).unwrap();
            let total: usize = cycles.iter().map(ABCycle::len).sum();
            assert_eq!(total, g.edges().len());
            check_partition(&g, &cycles);
        }
    }

    #[test]
    fn boundary_esets_reproduce_parents() {
        let mut rng = ChaCha8Rng::seed_from_u64(24);
        for _ in 0..100 {
            let a = perm::random_permutation(20, &mut rng).unwrap();
            let b = perm::mutate_swaps(&a, 5, &mut rng);
            let g = build_union_graph(&a, &b, true).unwrap();
            let cycles = find_ab_cycles(&g, &mut rng).unwrap();
            let m = cycles.len();
            assert_eq!(apply_eset(&g, &cycles, &ESet::none(m)).edge_set(), edge_set(&a));
            assert_eq!(apply_eset(&g, &cycles, &ESet::all(m)).edge_set(), edge_set(&b));
        }
    }

    #[test]
    fn random_esets_stay_two_regular() {
        let mut rng = ChaCha8Rng::seed_from_u64(25);
        for _ in 0..1000 {
            let a = perm::random_permutation(50, &mut rng).unwrap();
            let b = perm::mutate_swaps(&a, 10, &mut rng);
            let g = build_union_graph(&a, &b, false).unwrap();
            let cycles = find_ab_cycles(&g, &mut rng).unwrap();
            let chosen = (0..cycles.len()).map(|_| rng.gen()).collect();
            // apply_eset asserts 2-regularity internally
            let r = apply_eset(&g, &cycles, &ESet::new(chosen));
            assert_eq!(r.edge_set().len(), 50);
        }
    }

    #[test]
    fn hamiltonian_check_matches_connectivity() {
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        let (mut accepted, mut rejected) = (0, 0);
        for k in 0..2000 {
            let n = rng.gen_range(3..60);
            let a = perm::random_permutation(n, &mut rng).unwrap();
            let b = if k % 2 == 0 {
                perm::random_permutation(n, &mut rng).unwrap()
            } else {
                let s = rng.gen_range(1..=n);
                perm::mutate_swaps(&a, s, &mut rng)
            };
            let g = build_union_graph(&a, &b, k % 3 != 0).unwrap();
            let cycles = find_ab_cycles(&g, &mut rng).unwrap();
            let chosen = (0..cycles.len()).map(|_| rng.gen()).collect();
            let r = apply_eset(&g, &cycles, &ESet::new(chosen));
            // a 2-regular multigraph is one cycle exactly when it is connected
            let mut parent: Vec<usize> = (0..n).collect();
            let mut components = n;
            for (u, v) in r.edge_set() {
                let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
                if ru != rv {
                    parent[ru] = rv;
                    components -= 1;
                }
            }
            let parallel = r.edge_set().windows(2).any(|w| w[0] == w[1]);
            let expect = components == 1 && !parallel;
            assert_eq!(r.is_hamiltonian(), expect, "a={a} b={b}");
            if expect {
                accepted += 1;
            } else {
                rejected += 1;
            }
        }
        assert!(accepted > 100 && rejected > 100);
    }

    #[test]
    fn identical_parents_are_trivial() {
        let a = p(&[3, 1, 4, 2, 5, 6]);
        let mut rng = ChaCha8Rng::seed_from_u64(26);
        for respectful in [true, false] {
            let opts = UndirectedOptions {
                respectful,
                ..Default::default()
            };
            let out = crossover(&a, &a, &mut rng, &opts).unwrap();
            assert!(out.trivial);
            assert_eq!(out.offspring.canonical_undirected(), a.canonical_undirected());
        }
    }

    #[test]
    fn transmission_and_respect() {
        let mut rng = ChaCha8Rng::seed_from_u64(27);
        for _ in 0..1000 {
            let a = perm::random_permutation(50, &mut rng).unwrap();
            let s = rng.gen_range(1..30);
            let b = perm::mutate_swaps(&a, s, &mut rng);
            let out = crossover(&a, &b, &mut rng, &UndirectedOptions::default()).unwrap();
            let (ea, eb) = (edge_set(&a), edge_set(&b));
            for e in edge_set(&out.offspring) {
                assert!(ea.binary_search(&e).is_ok() || eb.binary_search(&e).is_ok());
            }
            let oc = edge_set(&out.offspring);
            for e in ea.iter().filter(|e| eb.binary_search(e).is_ok()) {
                assert!(oc.binary_search(e).is_ok(), "shared edge lost");
            }
        }
    }

    #[test]
    fn size_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(28);
        assert!(matches!(
            crossover(&p(&[1, 2]), &p(&[2, 1]), &mut rng, &UndirectedOptions::default()),
            Err(Error::TooSmall { .. })
        ));
        assert!(matches!(
            build_union_graph(&p(&[1, 2, 3]), &p(&[1, 2, 3, 4]), true),
            Err(Error::SizeMismatch { .. })
        ));
    }
}
