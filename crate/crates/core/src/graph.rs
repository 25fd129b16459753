//! Immutable directed graph in compressed sparse row form.
//!
//! Both the out-edge and in-edge views are materialized at build time. Every
//! adjacency list is sorted and free of duplicates, so traversal order (and
//! therefore every floating-point reduction built on it) is deterministic.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    n: usize,
    out_offsets: Vec<usize>,
    out_targets: Vec<usize>,
    in_offsets: Vec<usize>,
    in_sources: Vec<usize>,
}

/// Sorted, duplicate-free subset of `[0, n)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexSet {
    n: usize,
    indices: Vec<usize>,
}

impl VertexSet {
    /// Builds a set from arbitrary indices; the input is sorted and deduplicated.
    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, indices: I) -> Result<Self> {
        let mut indices: Vec<usize> = indices.into_iter().collect();
        indices.sort_unstable();
        indices.dedup();
        if let Some(&last) = indices.last() {
            if last >= n {
                return Err(Error::InvalidVertexSet { index: last, n });
            }
        }
        Ok(Self { n, indices })
    }

    pub fn from_mask(mask: &[bool]) -> Self {
        let indices = mask
            .iter()
            .enumerate()
            .filter_map(|(i, &m)| m.then_some(i))
            .collect();
        Self {
            n: mask.len(),
            indices,
        }
    }

    pub fn full(n: usize) -> Self {
        Self {
            n,
            indices: (0..n).collect(),
        }
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            indices: Vec::new(),
        }
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn contains(&self, v: usize) -> bool {
        self.indices.binary_search(&v).is_ok()
    }

    pub fn to_mask(&self) -> Vec<bool> {
        let mut mask = vec![false; self.n];
        for &i in &self.indices {
            mask[i] = true;
        }
        mask
    }

    /// The complement within `[0, n)`.
    pub fn complement(&self) -> Self {
        let mask = self.to_mask();
        Self {
            n: self.n,
            indices: (0..self.n).filter(|&i| !mask[i]).collect(),
        }
    }
}

fn build_csr(n: usize, edges: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
    // `edges` must already be sorted by (key, value) and deduplicated.
    let mut offsets = vec![0usize; n + 1];
    for &(key, _) in edges {
        offsets[key + 1] += 1;
    }
    for i in 0..n {
        offsets[i + 1] += offsets[i];
    }
    let targets = edges.iter().map(|&(_, value)| value).collect();
    (offsets, targets)
}

impl DirectedGraph {
    /// Builds a graph from `(src, dst)` pairs. Duplicate edges are collapsed.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        for &(src, dst) in edges {
            if src >= n || dst >= n {
                return Err(Error::VertexOutOfRange { src, dst, n });
            }
            if src == dst {
                return Err(Error::SelfLoop(src));
            }
        }
        let mut forward = edges.to_vec();
        forward.sort_unstable();
        forward.dedup();
        let mut backward: Vec<(usize, usize)> = forward.iter().map(|&(s, d)| (d, s)).collect();
        backward.sort_unstable();
        let (out_offsets, out_targets) = build_csr(n, &forward);
        let (in_offsets, in_sources) = build_csr(n, &backward);
        Ok(Self {
            n,
            out_offsets,
            out_targets,
            in_offsets,
            in_sources,
        })
    }

    /// Builds a graph from per-vertex out-neighbor lists (used by the generators
    /// and the k-NN embedding, whose lists are already self-loop free).
    pub fn from_out_lists(lists: Vec<Vec<usize>>) -> Result<Self> {
        let n = lists.len();
        let edges: Vec<(usize, usize)> = lists
            .into_iter()
            .enumerate()
            .flat_map(|(src, targets)| targets.into_iter().map(move |dst| (src, dst)))
            .collect();
        Self::from_edges(n, &edges)
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.out_targets.len()
    }

    pub fn out_neighbors(&self, v: usize) -> &[usize] {
        &self.out_targets[self.out_offsets[v]..self.out_offsets[v + 1]]
    }

    pub fn in_neighbors(&self, v: usize) -> &[usize] {
        &self.in_sources[self.in_offsets[v]..self.in_offsets[v + 1]]
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.out_offsets[v + 1] - self.out_offsets[v]
    }

    pub fn in_degree(&self, v: usize) -> usize {
        self.in_offsets[v + 1] - self.in_offsets[v]
    }

    pub fn has_edge(&self, src: usize, dst: usize) -> bool {
        self.out_neighbors(src).binary_search(&dst).is_ok()
    }

    /// All edges in ascending `(src, dst)` order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| self.out_neighbors(u).iter().map(move |&v| (u, v)))
    }

    /// Number of edges starting in `from` and ending in `to`.
    pub fn edge_count_between(&self, from: &VertexSet, to: &VertexSet) -> usize {
        if from.is_empty() || to.is_empty() {
            return 0;
        }
        let to_mask = to.to_mask();
        from.indices()
            .iter()
            .map(|&u| self.out_neighbors(u).iter().filter(|&&v| to_mask[v]).count())
            .sum()
    }

    /// Vertices reachable from `v` by a directed path of length 1..=p, excluding `v`.
    pub fn p_hop_out_neighborhood(&self, v: usize, p: usize) -> VertexSet {
        let mut seen = vec![false; self.n];
        seen[v] = true;
        let mut frontier = vec![v];
        let mut found = Vec::new();
        for _ in 0..p {
            let mut next = Vec::new();
            for &u in &frontier {
                for &w in self.out_neighbors(u) {
                    if !seen[w] {
                        seen[w] = true;
                        next.push(w);
                    }
                }
            }
            if next.is_empty() {
                break;
            }
            found.extend_from_slice(&next);
            frontier = next;
        }
        found.sort_unstable();
        VertexSet {
            n: self.n,
            indices: found,
        }
    }

    /// Undirected view: `u -> v` and `v -> u` both present iff either was present.
    pub fn symmetrize(&self) -> DirectedGraph {
        let mut edges: Vec<(usize, usize)> = Vec::with_capacity(2 * self.num_edges());
        for (u, v) in self.edges() {
            edges.push((u, v));
            edges.push((v, u));
        }
        Self::from_edges(self.n, &edges).expect("symmetrized edges stay valid")
    }

    /// True when every edge has its reverse.
    pub fn is_symmetric(&self) -> bool {
        self.edges().all(|(u, v)| self.has_edge(v, u))
    }

    /// Subgraph induced by `set`, relabeled `0..|set|` in ascending original
    /// order, together with the old-to-new index map.
    pub fn induced_subgraph(&self, set: &VertexSet) -> Result<(DirectedGraph, Vec<Option<usize>>)> {
        if set.is_empty() {
            return Err(Error::EmptyVertexSet);
        }
        let mut map = vec![None; self.n];
        for (new, &old) in set.indices().iter().enumerate() {
            map[old] = Some(new);
        }
        let mut edges = Vec::new();
        for &u in set.indices() {
            let nu = map[u].expect("member");
            for &v in self.out_neighbors(u) {
                if let Some(nv) = map[v] {
                    edges.push((nu, nv));
                }
            }
        }
        let sub = Self::from_edges(set.len(), &edges)?;
        Ok((sub, map))
    }
}
