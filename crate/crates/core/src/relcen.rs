//! Relative centrality.
//!
//! A vertex's relative score is its score divided by the mean score over
//! itself and those of its p-hop out-neighbors that score strictly higher.
//! Local maxima therefore get exactly 1, and a vertex in a dense core whose
//! neighbors mostly share its core gets close to 1 whatever the core's
//! global centrality. [`meta_rank`] seeds this with [`t_step_score`] and can
//! feed the result back through the same step `q` more times.

use rayon::prelude::*;

use crate::centrality::{t_step_score, ScoreVector};
use crate::error::{Error, Result};
use crate::graph::DirectedGraph;

/// Per-thread scratch for bounded breadth-first expansion.
struct HopScratch {
    stamp: Vec<u32>,
    epoch: u32,
    frontier: Vec<usize>,
    next: Vec<usize>,
}

impl HopScratch {
    fn new(n: usize) -> Self {
        Self {
            stamp: vec![0; n],
            epoch: 0,
            frontier: Vec::new(),
            next: Vec::new(),
        }
    }

    /// Calls `visit` once for every vertex at distance 1..=p from `v`.
    fn for_each_within<F: FnMut(usize)>(&mut self, graph: &DirectedGraph, v: usize, p: usize, mut visit: F) {
        if p == 1 {
            graph.out_neighbors(v).iter().for_each(|&u| visit(u));
            return;
        }
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.iter_mut().for_each(|s| *s = 0);
            self.epoch = 1;
        }
        let epoch = self.epoch;
        self.stamp[v] = epoch;
        self.frontier.clear();
        self.frontier.push(v);
        for _ in 0..p {
            self.next.clear();
            for &u in &self.frontier {
                for &w in graph.out_neighbors(u) {
                    if self.stamp[w] != epoch {
                        self.stamp[w] = epoch;
                        self.next.push(w);
                        visit(w);
                    }
                }
            }
            if self.next.is_empty() {
                break;
            }
            std::mem::swap(&mut self.frontier, &mut self.next);
        }
    }
}

/// One relative-centrality pass over every vertex.
pub fn relative_step(graph: &DirectedGraph, scores: &ScoreVector, p: usize) -> Result<ScoreVector> {
    let n = graph.num_vertices();
    if scores.len() != n {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: n,
        });
    }
    if p == 0 {
        return Err(Error::InvalidParameter("p must be >= 1".into()));
    }
    let s = scores.as_slice();
    if let Some(v) = s.iter().position(|x| !x.is_finite() || *x < 0.0) {
        return Err(Error::InvalidParameter(format!(
            "score {} at vertex {v} is not a finite non-negative number",
            s[v]
        )));
    }
    let out = (0..n)
        .into_par_iter()
        .map_init(
            || HopScratch::new(if p == 1 { 0 } else { n }),
            |scratch, v| {
                let own = s[v];
                let mut sum = own;
                let mut count = 1usize;
                scratch.for_each_within(graph, v, p, |u| {
                    if s[u] > own {
                        sum += s[u];
                        count += 1;
                    }
                });
                let mean = sum / count as f64;
                if mean > 0.0 {
                    own / mean
                } else {
                    0.0
                }
            },
        )
        .collect();
    Ok(ScoreVector::new(out))
}

/// `t`-step initial score, one `p`-hop relative step, then `q` more.
pub fn meta_rank(graph: &DirectedGraph, t: usize, p: usize, q: usize) -> Result<ScoreVector> {
    let mut scores = relative_step(graph, &t_step_score(graph, t)?, p)?;
    for _ in 0..q {
        scores = relative_step(graph, &scores, p)?;
    }
    Ok(scores)
}

pub fn n_rank(graph: &DirectedGraph, t: usize) -> Result<ScoreVector> {
    meta_rank(graph, t, 1, 0)
}

pub fn n2_rank(graph: &DirectedGraph, t: usize) -> Result<ScoreVector> {
    meta_rank(graph, t, 2, 0)
}

pub fn rn_rank(graph: &DirectedGraph, t: usize) -> Result<ScoreVector> {
    meta_rank(graph, t, 1, 1)
}

/// `ceil(ln n)`, at least 1; the initial-step length used on embedded data.
pub fn default_t(n: usize) -> usize {
    ((n.max(1) as f64).ln().ceil() as usize).max(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(n: usize, edges: &[(usize, usize)]) -> DirectedGraph {
        DirectedGraph::from_edges(n, edges).unwrap()
    }

    #[test]
    fn local_maximum_scores_one() {
        let graph = g(3, &[(0, 1), (0, 2)]);
        let out = relative_step(&graph, &ScoreVector::new(vec![5.0, 1.0, 2.0]), 1).unwrap();
        assert_eq!(out.get(0), 1.0);
    }

    #[test]
    fn single_edge_hand_arithmetic() {
        let graph = g(2, &[(0, 1)]);
        let out = relative_step(&graph, &ScoreVector::new(vec![1.0, 3.0]), 1).unwrap();
        assert_eq!(out.as_slice(), &[0.5, 1.0]);
    }

    #[test]
    fn equal_scores_give_ones() {
        let graph = g(4, &[(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]);
        let out = relative_step(&graph, &ScoreVector::new(vec![0.3; 4]), 2).unwrap();
        assert_eq!(out.as_slice(), &[1.0; 4]);
    }

    #[test]
    fn zero_scores_stay_zero() {
        let graph = g(2, &[(0, 1)]);
        let out = relative_step(&graph, &ScoreVector::new(vec![0.0, 0.0]), 1).unwrap();
        assert_eq!(out.as_slice(), &[0.0, 0.0]);
    }

    #[test]
    fn two_hop_sees_further_maxima() {
        // 0 -> 1 -> 2 with scores 2, 1, 4: at p=1 vertex 0 is a local max,
        // at p=2 it sees vertex 2
        let graph = g(3, &[(0, 1), (1, 2)]);
        let s = ScoreVector::new(vec![2.0, 1.0, 4.0]);
        assert_eq!(relative_step(&graph, &s, 1).unwrap().get(0), 1.0);
        assert_eq!(relative_step(&graph, &s, 2).unwrap().get(0), 2.0 / 3.0);
    }

    #[test]
    fn aliases_match_meta_rank() {
        let graph = g(5, &[(0, 1), (1, 2), (2, 0), (3, 0), (4, 3), (4, 1), (2, 4)]);
        assert_eq!(n_rank(&graph, 1).unwrap(), meta_rank(&graph, 1, 1, 0).unwrap());
        assert_eq!(n2_rank(&graph, 3).unwrap(), meta_rank(&graph, 3, 2, 0).unwrap());
        assert_eq!(rn_rank(&graph, 2).unwrap(), meta_rank(&graph, 2, 1, 1).unwrap());
        let manual = relative_step(
            &graph,
            &relative_step(&graph, &t_step_score(&graph, 2).unwrap(), 1).unwrap(),
            1,
        )
        .unwrap();
        assert_eq!(rn_rank(&graph, 2).unwrap(), manual);
    }

    #[test]
    fn rejects_bad_input() {
        let graph = g(2, &[(0, 1)]);
        assert!(relative_step(&graph, &ScoreVector::new(vec![1.0]), 1).is_err());
        assert!(relative_step(&graph, &ScoreVector::new(vec![1.0, -1.0]), 1).is_err());
        assert!(relative_step(&graph, &ScoreVector::new(vec![1.0, 1.0]), 0).is_err());
    }

    #[test]
    fn default_t_is_ceil_ln() {
        assert_eq!(default_t(1), 1);
        assert_eq!(default_t(8000), 9);
        assert_eq!(default_t(50_000), 11);
    }
}
