//! Evaluation metrics: core concentration, MCPC verification, core
//! prioritization (AUROC), balancedness, preservation ratio and ICEF.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::centrality::{Ranking, ScoreVector};
use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, VertexSet};
use crate::synth::GroundTruth;

/// Size of the top `c` fraction of `n` items, rounding half up.
pub fn top_set_size(c: f64, n: usize) -> usize {
    (c * n as f64 + 0.5).floor() as usize
}

/// Edge counts behind core concentration of a set `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ConcentrationCounts {
    /// `E(V \ S, S)`
    pub entering: usize,
    /// `E(S, V \ S)`
    pub leaving: usize,
    /// `E(S, V)`
    pub outgoing: usize,
}

impl ConcentrationCounts {
    pub fn of(graph: &DirectedGraph, set: &VertexSet) -> Self {
        let mask = set.to_mask();
        let mut leaving = 0;
        let mut outgoing = 0;
        for &u in set.indices() {
            let out = graph.out_neighbors(u);
            outgoing += out.len();
            leaving += out.iter().filter(|&&v| !mask[v]).count();
        }
        let entering = set
            .indices()
            .iter()
            .map(|&v| graph.in_neighbors(v).iter().filter(|&&u| !mask[u]).count())
            .sum();
        Self {
            entering,
            leaving,
            outgoing,
        }
    }

    pub fn concentration(&self) -> Result<f64> {
        if self.outgoing == 0 {
            return Err(Error::NoOutgoingEdges);
        }
        Ok((self.entering as f64 - self.leaving as f64) / self.outgoing as f64)
    }
}

/// `(E(V\S, S) - E(S, V\S)) / E(S, V)`.
pub fn core_concentration(graph: &DirectedGraph, set: &VertexSet) -> Result<f64> {
    ConcentrationCounts::of(graph, set).concentration()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockConcentration {
    pub community: usize,
    pub core: bool,
    pub size: usize,
    pub concentration: f64,
}

/// How well a graph fits the multi-core-periphery-with-communities pattern.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McpcReport {
    /// Per community: at least as many internal edges as edges leaving it.
    pub community_structure_ok: Vec<bool>,
    /// Min over all ordered community pairs of `CC(core_l) - CC(periphery_l')`.
    pub alpha: f64,
    /// Same minimum restricted to `l == l'`.
    pub alpha_within: f64,
    /// Max over `l != l'` of the core-to-core edge share relative to the
    /// community-to-community edge share; 0 for a single community.
    pub beta: f64,
    pub blocks: Vec<BlockConcentration>,
}

pub fn verify_mcpc(graph: &DirectedGraph, truth: &GroundTruth) -> Result<McpcReport> {
    let z = truth.num_communities();
    let mut core_cc = vec![f64::NAN; z];
    let mut periphery_cc = vec![f64::NAN; z];
    let mut blocks = Vec::new();
    let mut cores = Vec::with_capacity(z);
    for l in 0..z {
        for core in [true, false] {
            let set = truth.block(l, core)?;
            if set.is_empty() {
                if core {
                    cores.push(set);
                }
                continue;
            }
            let cc = core_concentration(graph, &set).map_err(|_| Error::BlockWithoutOutEdges {
                community: l,
                core,
            })?;
            if core {
                core_cc[l] = cc;
            } else {
                periphery_cc[l] = cc;
            }
            blocks.push(BlockConcentration {
                community: l,
                core,
                size: set.len(),
                concentration: cc,
            });
            if core {
                cores.push(set);
            }
        }
    }

    let mut alpha = f64::INFINITY;
    let mut alpha_within = f64::INFINITY;
    for a in 0..z {
        for b in 0..z {
            let gap = core_cc[a] - periphery_cc[b];
            if gap.is_nan() {
                continue;
            }
            alpha = alpha.min(gap);
            if a == b {
                alpha_within = alpha_within.min(gap);
            }
        }
    }

    let communities: Vec<VertexSet> = (0..z).map(|l| truth.community_set(l)).collect();
    let everything = VertexSet::full(graph.num_vertices());
    let community_out: Vec<usize> = communities
        .iter()
        .map(|c| graph.edge_count_between(c, &everything))
        .collect();
    let core_out: Vec<usize> = cores
        .iter()
        .map(|c| graph.edge_count_between(c, &everything))
        .collect();
    let community_structure_ok = (0..z)
        .map(|l| {
            let inside = graph.edge_count_between(&communities[l], &communities[l]);
            inside >= community_out[l] - inside
        })
        .collect();

    let mut beta: f64 = 0.0;
    for a in 0..z {
        for b in 0..z {
            if a == b || core_out[a] == 0 || community_out[a] == 0 {
                continue;
            }
            let core_share =
                graph.edge_count_between(&cores[a], &cores[b]) as f64 / core_out[a] as f64;
            let community_share = graph.edge_count_between(&communities[a], &communities[b]) as f64
                / community_out[a] as f64;
            // core-to-core edges are a subset of community-to-community edges,
            // so a zero denominator forces a zero numerator
            if community_share > 0.0 {
                beta = beta.max(core_share / community_share);
            }
        }
    }

    Ok(McpcReport {
        community_structure_ok,
        alpha,
        alpha_within,
        beta,
        blocks,
    })
}

/// Mann-Whitney AUROC of `scores` against the core flags, ties at midrank.
pub fn auroc_core_prioritization(scores: &ScoreVector, truth: &GroundTruth) -> Result<f64> {
    let flags = truth.core_flags().ok_or(Error::MissingCoreFlags)?;
    auroc(scores.as_slice(), flags)
}

pub fn auroc(scores: &[f64], positive: &[bool]) -> Result<f64> {
    if scores.len() != positive.len() {
        return Err(Error::LengthMismatch {
            left: scores.len(),
            right: positive.len(),
        });
    }
    if let Some(v) = scores.iter().position(|x| x.is_nan()) {
        return Err(Error::NanScore(v));
    }
    let pos = positive.iter().filter(|&&p| p).count();
    let neg = positive.len() - pos;
    if pos == 0 || neg == 0 {
        return Err(Error::SingleClass);
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[a].total_cmp(&scores[b]));
    // sum of (1-based, mid) ranks of positives
    let mut rank_sum = 0.0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && scores[order[j + 1]] == scores[order[i]] {
            j += 1;
        }
        let mid = (i + j) as f64 / 2.0 + 1.0;
        let tied_pos = order[i..=j].iter().filter(|&&v| positive[v]).count();
        rank_sum += mid * tied_pos as f64;
        i = j + 1;
    }
    let (p, q) = (pos as f64, neg as f64);
    Ok((rank_sum - p * (p + 1.0) / 2.0) / (p * q))
}

/// Core blocks (by community) that are nonempty, with their sizes.
fn core_sizes(truth: &GroundTruth) -> Result<Vec<(usize, usize)>> {
    let flags = truth.core_flags().ok_or(Error::MissingCoreFlags)?;
    let mut sizes = vec![0usize; truth.num_communities()];
    for (v, &core) in flags.iter().enumerate() {
        if core {
            sizes[truth.community(v)] += 1;
        }
    }
    let cores: Vec<(usize, usize)> = sizes
        .into_iter()
        .enumerate()
        .filter(|&(_, s)| s > 0)
        .collect();
    if cores.is_empty() {
        return Err(Error::NoCores);
    }
    Ok(cores)
}

fn min_over_max(selected: &[usize], cores: &[(usize, usize)]) -> f64 {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    for &(l, size) in cores {
        let frac = selected[l] as f64 / size as f64;
        lo = lo.min(frac);
        hi = hi.max(frac);
    }
    if hi == 0.0 {
        1.0
    } else {
        lo / hi
    }
}

/// Min-over-max of per-core selected fractions in the top `c` of the ranking;
/// 1 when no core vertex is selected yet.
pub fn balancedness_at(ranking: &Ranking, truth: &GroundTruth, c: f64) -> Result<f64> {
    let cores = core_sizes(truth)?;
    let flags = truth.core_flags().expect("checked by core_sizes");
    let n = ranking.len();
    let size = top_set_size(c, n);
    if !(c > 0.0 && c <= 1.0) || size == 0 {
        return Err(Error::InvalidParameter(format!(
            "c = {c} selects no vertices out of {n}"
        )));
    }
    let mut selected = vec![0usize; truth.num_communities()];
    for &v in ranking.top(size) {
        if flags[v] {
            selected[truth.community(v)] += 1;
        }
    }
    Ok(min_over_max(&selected, &cores))
}

/// Mean of [`balancedness_at`] over `c = 1/n, 2/n, ..., 1`.
pub fn total_balancedness(ranking: &Ranking, truth: &GroundTruth) -> Result<f64> {
    let cores = core_sizes(truth)?;
    let flags = truth.core_flags().expect("checked by core_sizes");
    let n = ranking.len();
    if n == 0 {
        return Err(Error::InvalidParameter("empty ranking".into()));
    }
    let mut selected = vec![0usize; truth.num_communities()];
    let mut total = 0.0;
    for &v in ranking.order() {
        if flags[v] {
            selected[truth.community(v)] += 1;
        }
        total += min_over_max(&selected, &cores);
    }
    Ok(total / n as f64)
}

/// `|V| / (z |S|) * sum_l min(|S & V_l| / |V_l|, |S| / |V|)`.
pub fn preservation_ratio(set: &VertexSet, truth: &GroundTruth) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    if set.universe() != truth.len() {
        return Err(Error::LengthMismatch {
            left: set.universe(),
            right: truth.len(),
        });
    }
    let z = truth.num_communities();
    let sizes = truth.community_sizes();
    let mut picked = vec![0usize; z];
    for &v in set.indices() {
        picked[truth.community(v)] += 1;
    }
    let n = truth.len() as f64;
    let s = set.len() as f64;
    let cap = s / n;
    let sum: f64 = (0..z)
        .map(|l| (picked[l] as f64 / sizes[l] as f64).min(cap))
        .sum();
    Ok(n / (z as f64 * s) * sum)
}

/// Fraction of edges whose endpoints share a community label.
pub fn icef(graph: &DirectedGraph, labels: &[usize]) -> Result<f64> {
    if labels.len() != graph.num_vertices() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: graph.num_vertices(),
        });
    }
    if graph.num_edges() == 0 {
        return Err(Error::EmptyGraph);
    }
    let intra = graph.edges().filter(|&(u, v)| labels[u] == labels[v]).count();
    Ok(intra as f64 / graph.num_edges() as f64)
}

/// ICEF of the subgraph induced by the top `c` of the ranking, per grid
/// point; `None` where the prefix is empty or induces no edges.
pub fn icef_curve(
    graph: &DirectedGraph,
    ranking: &Ranking,
    labels: &[usize],
    grid: &[f64],
) -> Result<Vec<(f64, Option<f64>)>> {
    if labels.len() != graph.num_vertices() {
        return Err(Error::LengthMismatch {
            left: labels.len(),
            right: graph.num_vertices(),
        });
    }
    let n = graph.num_vertices();
    Ok(grid
        .par_iter()
        .map(|&c| {
            let size = top_set_size(c, n);
            if size == 0 {
                return (c, None);
            }
            let set = VertexSet::from_indices(n, ranking.top(size).iter().copied())
                .expect("ranking indices are in range");
            let (sub, _) = graph.induced_subgraph(&set).expect("nonempty prefix");
            let sub_labels: Vec<usize> = set.indices().iter().map(|&v| labels[v]).collect();
            (c, icef(&sub, &sub_labels).ok())
        })
        .collect())
}

/// `n` evenly spaced selection fractions `1/n, 2/n, ..., 1`.
pub fn default_grid(points: usize) -> Vec<f64> {
    (1..=points).map(|i| i as f64 / points as f64).collect()
}
