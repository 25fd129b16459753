//! Louvain modularity clustering and clustering-quality scores.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::DirectedGraph;
use crate::rng::stream_rng;

/// Weighted undirected multigraph used between Louvain levels. Self-loop
/// weight counts twice towards a node's degree.
struct WeightedGraph {
    adjacency: Vec<Vec<(usize, f64)>>,
    self_loops: Vec<f64>,
    degree: Vec<f64>,
    /// Total edge weight `m` (each undirected edge once).
    total: f64,
}

impl WeightedGraph {
    fn from_symmetric(graph: &DirectedGraph) -> Self {
        let n = graph.num_vertices();
        let adjacency: Vec<Vec<(usize, f64)>> = (0..n)
            .map(|v| graph.out_neighbors(v).iter().map(|&u| (u, 1.0)).collect())
            .collect();
        let degree: Vec<f64> = adjacency.iter().map(|a| a.len() as f64).collect();
        let total = degree.iter().sum::<f64>() / 2.0;
        Self {
            adjacency,
            self_loops: vec![0.0; n],
            degree,
            total,
        }
    }

    fn len(&self) -> usize {
        self.adjacency.len()
    }

    fn modularity(&self, community: &[usize], resolution: f64) -> f64 {
        let k = community.iter().max().map_or(0, |&c| c + 1);
        let mut internal = vec![0.0; k];
        let mut tot = vec![0.0; k];
        for v in 0..self.len() {
            let c = community[v];
            tot[c] += self.degree[v];
            internal[c] += 2.0 * self.self_loops[v];
            for &(u, w) in &self.adjacency[v] {
                if community[u] == c {
                    internal[c] += w;
                }
            }
        }
        let two_m = 2.0 * self.total;
        (0..k)
            .map(|c| internal[c] / two_m - resolution * (tot[c] / two_m).powi(2))
            .sum()
    }

    /// Collapses each community into one node.
    fn aggregate(&self, community: &[usize], k: usize) -> Self {
        let mut self_loops = vec![0.0; k];
        let mut links: Vec<HashMap<usize, f64>> = vec![HashMap::new(); k];
        let mut degree = vec![0.0; k];
        for v in 0..self.len() {
            let c = community[v];
            degree[c] += self.degree[v];
            self_loops[c] += self.self_loops[v];
            for &(u, w) in &self.adjacency[v] {
                let d = community[u];
                if d == c {
                    // each internal edge is seen from both ends
                    self_loops[c] += w / 2.0;
                } else {
                    *links[c].entry(d).or_insert(0.0) += w;
                }
            }
        }
        let adjacency = links
            .into_iter()
            .map(|m| {
                let mut row: Vec<(usize, f64)> = m.into_iter().collect();
                row.sort_by_key(|&(u, _)| u);
                row
            })
            .collect();
        Self {
            adjacency,
            self_loops,
            degree,
            total: self.total,
        }
    }
}

/// One round of local moves; returns whether any node changed community.
fn local_moves(
    graph: &WeightedGraph,
    community: &mut [usize],
    resolution: f64,
    rng: &mut impl rand::Rng,
) -> bool {
    let n = graph.len();
    let two_m = 2.0 * graph.total;
    let mut tot = vec![0.0; n];
    for v in 0..n {
        tot[community[v]] += graph.degree[v];
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);

    let mut link_weight = vec![0.0; n];
    let mut touched: Vec<usize> = Vec::new();
    let mut moved_any = false;
    loop {
        let mut moved = false;
        for &v in &order {
            let own = community[v];
            let kv = graph.degree[v];
            for &(u, w) in &graph.adjacency[v] {
                let c = community[u];
                if link_weight[c] == 0.0 {
                    touched.push(c);
                }
                link_weight[c] += w;
            }
            tot[own] -= kv;
            let gain = |c: usize, links: f64| links - resolution * tot[c] * kv / two_m;
            let mut best = own;
            let mut best_gain = gain(own, link_weight[own]);
            for &c in &touched {
                let g = gain(c, link_weight[c]);
                if g > best_gain {
                    best_gain = g;
                    best = c;
                }
            }
            tot[best] += kv;
            if best != own {
                community[v] = best;
                moved = true;
                moved_any = true;
            }
            for &c in &touched {
                link_weight[c] = 0.0;
            }
            touched.clear();
        }
        if !moved {
            break;
        }
    }
    moved_any
}

fn renumber(labels: &mut [usize]) -> usize {
    let mut ids = HashMap::new();
    for l in labels.iter_mut() {
        let next = ids.len();
        *l = *ids.entry(*l).or_insert(next);
    }
    ids.len()
}

/// Louvain on a symmetric graph. Labels are contiguous from 0 in order of
/// first appearance; node visit order is shuffled from `seed`.
pub fn louvain(graph: &DirectedGraph, seed: u64, resolution: f64) -> Result<Vec<usize>> {
    if graph.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    if !graph.is_symmetric() {
        return Err(Error::InvalidParameter(
            "louvain expects a symmetrized graph".into(),
        ));
    }
    let mut rng = stream_rng(seed, 0);
    let mut level = WeightedGraph::from_symmetric(graph);
    let mut assignment: Vec<usize> = (0..graph.num_vertices()).collect();
    let mut quality = level.modularity(&(0..level.len()).collect::<Vec<_>>(), resolution);
    loop {
        let mut community: Vec<usize> = (0..level.len()).collect();
        if !local_moves(&level, &mut community, resolution, &mut rng) {
            break;
        }
        let k = renumber(&mut community);
        let next_quality = level.modularity(&community, resolution);
        debug_assert!(
            next_quality >= quality - 1e-9,
            "modularity decreased from {quality} to {next_quality}"
        );
        if next_quality <= quality + 1e-12 && k == level.len() {
            break;
        }
        quality = next_quality;
        for a in assignment.iter_mut() {
            *a = community[*a];
        }
        level = level.aggregate(&community, k);
        if k == 1 {
            break;
        }
    }
    renumber(&mut assignment);
    Ok(assignment)
}

/// Newman modularity of a labeling of a symmetric graph.
pub fn modularity(graph: &DirectedGraph, labels: &[usize], resolution: f64) -> Result<f64> {
    if labels.len() != graph.num_vertices() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: graph.num_vertices(),
        });
    }
    if graph.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let mut dense = labels.to_vec();
    renumber(&mut dense);
    Ok(WeightedGraph::from_symmetric(graph).modularity(&dense, resolution))
}

struct Contingency {
    n: f64,
    cells: HashMap<(usize, usize), usize>,
    rows: HashMap<usize, usize>,
    cols: HashMap<usize, usize>,
}

impl Contingency {
    fn new(pred: &[usize], truth: &[usize]) -> Result<Self> {
        if pred.len() != truth.len() {
            return Err(Error::LengthMismatch {
                left: pred.len(),
                right: truth.len(),
            });
        }
        if pred.is_empty() {
            return Err(Error::InvalidParameter("empty labelings".into()));
        }
        let mut cells = HashMap::new();
        let mut rows = HashMap::new();
        let mut cols = HashMap::new();
        for (&p, &t) in pred.iter().zip(truth) {
            *cells.entry((p, t)).or_insert(0) += 1;
            *rows.entry(p).or_insert(0) += 1;
            *cols.entry(t).or_insert(0) += 1;
        }
        Ok(Self {
            n: pred.len() as f64,
            cells,
            rows,
            cols,
        })
    }

    fn entropy(counts: &HashMap<usize, usize>, n: f64) -> f64 {
        let mut keys: Vec<_> = counts.keys().copied().collect();
        keys.sort_unstable();
        keys.iter()
            .map(|k| {
                let p = counts[k] as f64 / n;
                -p * p.ln()
            })
            .sum()
    }

    fn mutual_information(&self) -> f64 {
        let mut keys: Vec<_> = self.cells.keys().copied().collect();
        keys.sort_unstable();
        keys.iter()
            .map(|&(p, t)| {
                let nij = self.cells[&(p, t)] as f64;
                let a = self.rows[&p] as f64;
                let b = self.cols[&t] as f64;
                nij / self.n * (self.n * nij / (a * b)).ln()
            })
            .sum()
    }
}

/// Fraction of points whose predicted cluster's majority true label matches.
pub fn purity(pred: &[usize], truth: &[usize]) -> Result<f64> {
    let table = Contingency::new(pred, truth)?;
    let mut best: HashMap<usize, usize> = HashMap::new();
    for (&(p, _), &count) in &table.cells {
        let entry = best.entry(p).or_insert(0);
        *entry = (*entry).max(count);
    }
    Ok(best.values().sum::<usize>() as f64 / table.n)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NmiNormalization {
    Min,
    Geometric,
    #[default]
    Arithmetic,
    Max,
}

impl std::str::FromStr for NmiNormalization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "min" => Ok(Self::Min),
            "geometric" => Ok(Self::Geometric),
            "arithmetic" => Ok(Self::Arithmetic),
            "max" => Ok(Self::Max),
            other => Err(Error::InvalidParameter(format!("unknown NMI normalization {other:?}"))),
        }
    }
}

pub fn nmi(pred: &[usize], truth: &[usize], normalization: NmiNormalization) -> Result<f64> {
    let table = Contingency::new(pred, truth)?;
    let hp = Contingency::entropy(&table.rows, table.n);
    let ht = Contingency::entropy(&table.cols, table.n);
    if table.rows.len() == 1 && table.cols.len() == 1 {
        return Ok(1.0);
    }
    if table.rows.len() == 1 || table.cols.len() == 1 {
        return Ok(0.0);
    }
    let denominator = match normalization {
        NmiNormalization::Min => hp.min(ht),
        NmiNormalization::Geometric => (hp * ht).sqrt(),
        NmiNormalization::Arithmetic => (hp + ht) / 2.0,
        NmiNormalization::Max => hp.max(ht),
    };
    Ok((table.mutual_information() / denominator).clamp(0.0, 1.0))
}
