//! Baseline centralities and the t-step initial score.
//!
//! Matrix-vector products pull over in-neighbors, one output entry per task,
//! with sums taken in adjacency order; results do not depend on thread count.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

/// Per-vertex score.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreVector(Vec<f64>);

impl ScoreVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, v: usize) -> f64 {
        self.0[v]
    }
}

impl From<Vec<f64>> for ScoreVector {
    fn from(values: Vec<f64>) -> Self {
        Self(values)
    }
}

/// Vertices ordered by descending score, ties by ascending index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ranking(Vec<usize>);

impl Ranking {
    pub fn order(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The first `size` vertices of the ranking.
    pub fn top(&self, size: usize) -> &[usize] {
        &self.0[..size.min(self.0.len())]
    }

    /// Position of each vertex in the ranking (0 = first).
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.0.len()];
        for (rank, &v) in self.0.iter().enumerate() {
            pos[v] = rank;
        }
        pos
    }
}

pub fn rank_descending(scores: &ScoreVector) -> Result<Ranking> {
    let s = scores.as_slice();
    if let Some(v) = s.iter().position(|x| x.is_nan()) {
        return Err(Error::NanScore(v));
    }
    let mut order: Vec<usize> = (0..s.len()).collect();
    order.sort_by(|&a, &b| s[b].total_cmp(&s[a]).then(a.cmp(&b)));
    Ok(Ranking(order))
}

/// `s <- A^T s`, i.e. each vertex sums the entries of its in-neighbors.
fn pull(graph: &DirectedGraph, s: &[f64]) -> Vec<f64> {
    (0..graph.num_vertices())
        .into_par_iter()
        .map(|v| graph.in_neighbors(v).iter().map(|&u| s[u]).sum())
        .collect()
}

/// Column sums of `A^t`, rescaled to unit total after every product.
pub fn t_step_score(graph: &DirectedGraph, t: usize) -> Result<ScoreVector> {
    if t == 0 {
        return Err(Error::InvalidParameter("t must be >= 1".into()));
    }
    let mut s = vec![1.0; graph.num_vertices()];
    for _ in 0..t {
        s = pull(graph, &s);
        let total: f64 = s.iter().sum();
        if total > 0.0 {
            s.iter_mut().for_each(|x| *x /= total);
        }
    }
    Ok(ScoreVector(s))
}

/// Total degree, in plus out.
pub fn degree_centrality(graph: &DirectedGraph) -> ScoreVector {
    ScoreVector(
        (0..graph.num_vertices())
            .map(|v| (graph.in_degree(v) + graph.out_degree(v)) as f64)
            .collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PageRankParams {
    pub damping: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl PageRankParams {
    pub fn with_damping(damping: f64) -> Self {
        Self {
            damping,
            ..Self::default()
        }
    }
}

impl Default for PageRankParams {
    fn default() -> Self {
        Self {
            damping: 0.85,
            tol: 1e-10,
            // the residual shrinks by `damping` per sweep; 0.99 needs ~2300
            max_iter: 10_000,
        }
    }
}

/// Uniform-teleport PageRank; dangling mass is spread uniformly.
pub fn pagerank(graph: &DirectedGraph, params: &PageRankParams) -> Result<ScoreVector> {
    let d = params.damping;
    if !(d > 0.0 && d < 1.0) {
        return Err(Error::InvalidParameter(format!("damping = {d} outside (0, 1)")));
    }
    let n = graph.num_vertices();
    if n == 0 {
        return Ok(ScoreVector(Vec::new()));
    }
    let nf = n as f64;
    let inv_out: Vec<f64> = (0..n)
        .map(|v| match graph.out_degree(v) {
            0 => 0.0,
            deg => 1.0 / deg as f64,
        })
        .collect();
    let mut x = vec![1.0 / nf; n];
    let mut residual = f64::INFINITY;
    for _ in 0..params.max_iter {
        let dangling: f64 = (0..n)
            .filter(|&v| graph.out_degree(v) == 0)
            .map(|v| x[v])
            .sum();
        let base = (1.0 - d) / nf + d * dangling / nf;
        let share: Vec<f64> = x.iter().zip(&inv_out).map(|(a, b)| a * b).collect();
        let next: Vec<f64> = (0..n)
            .into_par_iter()
            .map(|v| base + d * graph.in_neighbors(v).iter().map(|&u| share[u]).sum::<f64>())
            .collect();
        residual = next.iter().zip(&x).map(|(a, b)| (a - b).abs()).sum();
        x = next;
        if residual < params.tol {
            let total: f64 = x.iter().sum();
            x.iter_mut().for_each(|v| *v /= total);
            return Ok(ScoreVector(x));
        }
    }
    Err(Error::NotConverged {
        iterations: params.max_iter,
        residual,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KatzParams {
    /// Attenuation; `None` means `0.5 / max out-degree`.
    pub alpha: Option<f64>,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for KatzParams {
    fn default() -> Self {
        Self {
            alpha: None,
            tol: 1e-10,
            max_iter: 1000,
        }
    }
}

/// `sum_{t >= 1} alpha^t * (column sums of A^t)`.
pub fn katz(graph: &DirectedGraph, params: &KatzParams) -> Result<ScoreVector> {
    let n = graph.num_vertices();
    let max_out = (0..n).map(|v| graph.out_degree(v)).max().unwrap_or(0);
    if max_out == 0 {
        return Ok(ScoreVector(vec![0.0; n]));
    }
    let alpha = params.alpha.unwrap_or(0.5 / max_out as f64);
    if !(alpha > 0.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
    }
    let mut term = vec![1.0; n];
    let mut total = vec![0.0; n];
    let mut last_norm = f64::INFINITY;
    let mut growth = 0usize;
    for _ in 0..params.max_iter {
        term = pull(graph, &term);
        term.iter_mut().for_each(|x| *x *= alpha);
        total.iter_mut().zip(&term).for_each(|(t, x)| *t += x);
        let norm: f64 = term.iter().sum();
        if norm < params.tol {
            return Ok(ScoreVector(total));
        }
        if norm > last_norm {
            growth += 1;
            if growth >= 10 || !norm.is_finite() {
                return Err(Error::Diverged { alpha });
            }
        } else {
            growth = 0;
        }
        last_norm = norm;
    }
    Err(Error::NotConverged {
        iterations: params.max_iter,
        residual: last_norm,
    })
}

/// Onion layers of the symmetrized graph, numbered from 1 (outermost).
///
/// Peeling keeps a running core number `k`: each layer removes every
/// remaining vertex whose degree is at most `k`, and `k` rises to the
/// minimum remaining degree when no such vertex is left.
pub fn onion_layers(graph: &DirectedGraph) -> Vec<usize> {
    let sym = graph.symmetrize();
    let n = sym.num_vertices();
    let mut degree: Vec<usize> = (0..n).map(|v| sym.out_degree(v)).collect();
    let max_degree = degree.iter().copied().max().unwrap_or(0);
    // lazy buckets: an entry is live only while `degree[v]` still matches
    let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); max_degree + 1];
    for v in 0..n {
        buckets[degree[v]].push(v);
    }
    let mut layer = vec![0usize; n];
    let mut removed = vec![false; n];
    let mut queued = vec![false; n];
    let mut remaining = n;
    let mut core = 0usize;
    let mut current_layer = 0usize;
    let mut frontier: Vec<usize> = Vec::new();

    while remaining > 0 {
        if frontier.is_empty() {
            let mut d = core;
            loop {
                let bucket = &mut buckets[d];
                bucket.retain(|&v| !removed[v] && degree[v] == d);
                if !bucket.is_empty() {
                    break;
                }
                d += 1;
            }
            core = d;
            for &v in &buckets[d] {
                if !queued[v] {
                    queued[v] = true;
                    frontier.push(v);
                }
            }
        }
        current_layer += 1;
        for &v in &frontier {
            removed[v] = true;
            layer[v] = current_layer;
        }
        remaining -= frontier.len();
        let mut next = Vec::new();
        for &v in &frontier {
            for &w in sym.out_neighbors(v) {
                if removed[w] {
                    continue;
                }
                degree[w] -= 1;
                buckets[degree[w]].push(w);
                if degree[w] <= core && !queued[w] {
                    queued[w] = true;
                    next.push(w);
                }
            }
        }
        frontier = next;
    }
    layer
}

/// Onion layer index as a score.
pub fn onion_decomposition(graph: &DirectedGraph) -> ScoreVector {
    ScoreVector(onion_layers(graph).into_iter().map(|l| l as f64).collect())
}

/// Onion layer with ties inside a layer broken by undirected degree; the
/// score is `layer * (max_degree + 1) + degree`, which orders vertices
/// lexicographically by (layer, degree).
pub fn onion_score(graph: &DirectedGraph) -> ScoreVector {
    let layers = onion_layers(graph);
    let sym = graph.symmetrize();
    let degrees: Vec<usize> = (0..sym.num_vertices()).map(|v| sym.out_degree(v)).collect();
    let width = degrees.iter().copied().max().unwrap_or(0) as f64 + 1.0;
    ScoreVector(
        layers
            .iter()
            .zip(&degrees)
            .map(|(&l, &d)| l as f64 * width + d as f64)
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> DirectedGraph {
        DirectedGraph::from_edges(n, edges).unwrap()
    }

    fn cycle(n: usize) -> DirectedGraph {
        g(n, &(0..n).map(|i| (i, (i + 1) % n)).collect::<Vec<_>>())
    }

    fn complete(n: usize) -> DirectedGraph {
        let edges: Vec<_> = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .collect();
        g(n, &edges)
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn t_step_one_is_in_degree_order() {
        let graph = g(4, &[(0, 1), (2, 1), (3, 1), (1, 0), (3, 0), (0, 2)]);
        let s = t_step_score(&graph, 1).unwrap();
        let indeg = ScoreVector((0..4).map(|v| graph.in_degree(v) as f64).collect());
        assert_eq!(rank_descending(&s).unwrap(), rank_descending(&indeg).unwrap());
    }

    #[test]
    fn t_step_uniform_on_cycle() {
        for t in 1..5 {
            let s = t_step_score(&cycle(3), t).unwrap();
            assert_close(s.as_slice(), &[1.0 / 3.0; 3], 1e-15);
        }
    }

    #[test]
    fn t_step_two_matches_dense_square() {
        // A^2 for 0->2, 1->2, 2->0 has paths 0->2->0, 1->2->0, 2->0->2:
        // column sums (2, 0, 1)
        let graph = g(3, &[(0, 2), (1, 2), (2, 0)]);
        let s = t_step_score(&graph, 2).unwrap();
        assert_close(s.as_slice(), &[2.0 / 3.0, 0.0, 1.0 / 3.0], 1e-15);
        assert_eq!(rank_descending(&s).unwrap().order(), &[0, 2, 1]);
    }

    #[test]
    fn degree_examples() {
        let reg = cycle(5);
        assert!(degree_centrality(&reg).as_slice().iter().all(|&x| x == 2.0));
        assert_eq!(degree_centrality(&g(3, &[(0, 1), (2, 1)])).as_slice(), &[1.0, 2.0, 1.0]);
        assert_eq!(degree_centrality(&g(3, &[])).as_slice(), &[0.0; 3]);
    }

    #[test]
    fn pagerank_two_cycle() {
        let s = pagerank(&g(2, &[(0, 1), (1, 0)]), &PageRankParams::default()).unwrap();
        assert_close(s.as_slice(), &[0.5, 0.5], 1e-12);
    }

    #[test]
    fn pagerank_star_against_dense_fixed_point() {
        let graph = g(3, &[(1, 0), (2, 0)]);
        let s = pagerank(&graph, &PageRankParams::with_damping(0.5)).unwrap();
        // dense Google matrix, iterated independently
        let d = 0.5;
        let mut x = [1.0 / 3.0; 3];
        for _ in 0..200 {
            let dangling = x[0];
            let mut y = [(1.0 - d) / 3.0 + d * dangling / 3.0; 3];
            y[0] += d * (x[1] + x[2]);
            x = y;
        }
        assert_close(s.as_slice(), &x, 1e-9);
        assert!(s.get(0) > s.get(1) && s.get(0) > s.get(2));
    }

    #[test]
    fn pagerank_uniform_on_vertex_transitive() {
        let s = pagerank(&complete(5), &PageRankParams::default()).unwrap();
        assert_close(s.as_slice(), &[0.2; 5], 1e-12);
        let s = pagerank(&cycle(7), &PageRankParams::with_damping(0.99)).unwrap();
        assert_close(s.as_slice(), &[1.0 / 7.0; 7], 1e-12);
    }

    #[test]
    fn pagerank_reports_non_convergence() {
        let graph = g(3, &[(0, 1), (1, 2)]);
        let params = PageRankParams {
            damping: 0.85,
            tol: 0.0,
            max_iter: 3,
        };
        assert!(matches!(
            pagerank(&graph, &params),
            Err(Error::NotConverged { iterations: 3, .. })
        ));
    }

    #[test]
    fn katz_examples() {
        assert_eq!(katz(&g(3, &[]), &KatzParams::default()).unwrap().as_slice(), &[0.0; 3]);
        let p = |a| KatzParams {
            alpha: Some(a),
            ..KatzParams::default()
        };
        let s = katz(&g(2, &[(0, 1)]), &p(0.5)).unwrap();
        assert_close(s.as_slice(), &[0.0, 0.5], 1e-15);
        let s = katz(&g(2, &[(0, 1), (1, 0)]), &p(0.25)).unwrap();
        assert_close(s.as_slice(), &[1.0 / 3.0, 1.0 / 3.0], 1e-10);
    }

    #[test]
    fn katz_detects_divergence() {
        let s = katz(
            &complete(4),
            &KatzParams {
                alpha: Some(1.0),
                ..KatzParams::default()
            },
        );
        assert!(matches!(s, Err(Error::Diverged { .. })));
    }

    #[test]
    fn onion_examples() {
        assert_eq!(onion_layers(&complete(5)), vec![1; 5]);
        let star = g(5, &[(1, 0), (2, 0), (3, 0), (4, 0)]);
        assert_eq!(onion_layers(&star), vec![2, 1, 1, 1, 1]);
        assert_eq!(onion_layers(&g(3, &[])), vec![1, 1, 1]);
    }

    #[test]
    fn onion_path_peels_from_both_ends() {
        let path = g(5, &[(0, 1), (1, 2), (2, 3), (3, 4)]);
        assert_eq!(onion_layers(&path), vec![1, 2, 3, 2, 1]);
    }

    #[test]
    fn onion_layer_then_degree() {
        // triangle 0-1-2 with pendant 3 on 0 and pendant 4 on 3
        let graph = g(5, &[(0, 1), (1, 2), (2, 0), (0, 3), (3, 4)]);
        let layers = onion_layers(&graph);
        assert_eq!(layers, vec![3, 3, 3, 2, 1]);
        let ranking = rank_descending(&onion_score(&graph)).unwrap();
        assert_eq!(ranking.order(), &[0, 1, 2, 3, 4]);
    }

    #[test]
    fn rank_examples() {
        let r = |v: Vec<f64>| rank_descending(&ScoreVector(v)).unwrap().order().to_vec();
        assert_eq!(r(vec![0.2, 0.9, 0.5]), vec![1, 2, 0]);
        assert_eq!(r(vec![0.7; 4]), vec![0, 1, 2, 3]);
        assert_eq!(r(vec![1.0, 1.0, 2.0]), vec![2, 0, 1]);
        assert_eq!(
            rank_descending(&ScoreVector(vec![1.0, f64::NAN])),
            Err(Error::NanScore(1))
        );
    }
}
