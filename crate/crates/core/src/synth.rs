//! Synthetic data: the core-periphery block model and the concentric GMM.

use rand::seq::index;
use rand::Rng;
use rand_distr::{Binomial, Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{DirectedGraph, VertexSet};
use crate::rng::stream_rng;

/// Per-vertex community label and (optionally) core/periphery flag.
///
/// Real datasets only carry community labels; `is_core` is `None` for them
/// and every core-dependent metric refuses to run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    community: Vec<usize>,
    is_core: Option<Vec<bool>>,
    num_communities: usize,
}

impl GroundTruth {
    /// Labels must cover `0..z` without gaps.
    pub fn new(community: Vec<usize>, is_core: Option<Vec<bool>>) -> Result<Self> {
        if let Some(flags) = &is_core {
            if flags.len() != community.len() {
                return Err(Error::LengthMismatch {
                    left: community.len(),
                    right: flags.len(),
                });
            }
        }
        let z = community.iter().max().map_or(0, |&m| m + 1);
        let mut seen = vec![false; z];
        for &c in &community {
            seen[c] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidParameter(format!(
                "community label {missing} does not occur (labels must be 0..{z})"
            )));
        }
        Ok(Self {
            community,
            is_core,
            num_communities: z,
        })
    }

    /// Relabels arbitrary labels to `0..z` in order of first appearance.
    pub fn from_raw_labels<T: Eq + std::hash::Hash + Clone>(
        labels: &[T],
        is_core: Option<Vec<bool>>,
    ) -> Result<Self> {
        let mut ids = std::collections::HashMap::new();
        let community = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        Self::new(community, is_core)
    }

    pub fn len(&self) -> usize {
        self.community.len()
    }

    pub fn is_empty(&self) -> bool {
        self.community.is_empty()
    }

    pub fn communities(&self) -> &[usize] {
        &self.community
    }

    pub fn community(&self, v: usize) -> usize {
        self.community[v]
    }

    pub fn core_flags(&self) -> Option<&[bool]> {
        self.is_core.as_deref()
    }

    pub fn num_communities(&self) -> usize {
        self.num_communities
    }

    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.num_communities];
        for &c in &self.community {
            sizes[c] += 1;
        }
        sizes
    }

    pub fn community_set(&self, community: usize) -> VertexSet {
        let mask: Vec<bool> = self.community.iter().map(|&c| c == community).collect();
        VertexSet::from_mask(&mask)
    }

    /// Vertices of block `(community, core)`.
    pub fn block(&self, community: usize, core: bool) -> Result<VertexSet> {
        let flags = self.is_core.as_ref().ok_or(Error::MissingCoreFlags)?;
        let mask: Vec<bool> = self
            .community
            .iter()
            .zip(flags)
            .map(|(&c, &f)| c == community && f == core)
            .collect();
        Ok(VertexSet::from_mask(&mask))
    }

    /// Restriction to the (ascending) vertices of `set`.
    pub fn restrict(&self, set: &VertexSet) -> Self {
        let community: Vec<usize> = set.indices().iter().map(|&v| self.community[v]).collect();
        let is_core = self
            .is_core
            .as_ref()
            .map(|f| set.indices().iter().map(|&v| f[v]).collect());
        // keep the original label space so community ids stay comparable
        Self {
            community,
            is_core,
            num_communities: self.num_communities,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSpec {
    pub community: usize,
    pub is_core: bool,
    pub size: usize,
}

/// Parameters of the core-periphery block model.
///
/// Vertex `i` of block `a` sends an edge to vertex `j != i` of block `b`
/// independently with probability `k / |b| * probabilities[a][b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockModelSpec {
    pub blocks: Vec<BlockSpec>,
    pub probabilities: Vec<Vec<f64>>,
    pub k: f64,
    pub seed: u64,
}

impl BlockModelSpec {
    pub fn num_vertices(&self) -> usize {
        self.blocks.iter().map(|b| b.size).sum()
    }

    /// Rescales every row whose sum is off from 1 by more than 1e-9.
    pub fn normalize_rows(&mut self) {
        normalize_rows(&mut self.probabilities);
    }

    fn validate(&self) -> Result<()> {
        let nb = self.blocks.len();
        if nb == 0 {
            return Err(Error::InvalidParameter("block model needs at least one block".into()));
        }
        if !(self.k >= 1.0) {
            return Err(Error::InvalidParameter(format!("k = {} must be >= 1", self.k)));
        }
        if self.probabilities.len() != nb || self.probabilities.iter().any(|r| r.len() != nb) {
            return Err(Error::InvalidParameter(format!(
                "probability matrix must be {nb}x{nb}"
            )));
        }
        for (a, block) in self.blocks.iter().enumerate() {
            if block.size == 0 {
                return Err(Error::InvalidParameter(format!("block {a} is empty")));
            }
            for (b, target) in self.blocks.iter().enumerate() {
                let entry = self.probabilities[a][b];
                if !(0.0..=1.0).contains(&entry) {
                    return Err(Error::InvalidParameter(format!(
                        "probability entry [{a}][{b}] = {entry} outside [0, 1]"
                    )));
                }
                let probability = self.k / target.size as f64 * entry;
                if probability > 1.0 {
                    return Err(Error::ProbabilityTooLarge {
                        from: a,
                        to: b,
                        probability,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn ground_truth(&self) -> Result<GroundTruth> {
        let mut community = Vec::with_capacity(self.num_vertices());
        let mut core = Vec::with_capacity(self.num_vertices());
        for b in &self.blocks {
            community.extend(std::iter::repeat_n(b.community, b.size));
            core.extend(std::iter::repeat_n(b.is_core, b.size));
        }
        GroundTruth::new(community, Some(core))
    }
}

fn normalize_rows(matrix: &mut [Vec<f64>]) {
    for row in matrix.iter_mut() {
        let sum: f64 = row.iter().sum();
        if sum > 0.0 && (sum - 1.0).abs() > 1e-9 {
            row.iter_mut().for_each(|x| *x /= sum);
        }
    }
}

/// Block order of the two-community table: core 0, periphery 0, periphery 1, core 1.
pub const TABLE1_BLOCKS: [(usize, bool); 4] = [(0, true), (0, false), (1, false), (1, true)];

/// The gamma-parameterized 4x4 block-probability matrix, in [`TABLE1_BLOCKS`]
/// order. With `normalize` every row is rescaled to sum to 1; without it the
/// entries are returned as printed (two rows then do not sum to 1).
pub fn table1_probabilities(gamma: f64, normalize: bool) -> Result<Vec<Vec<f64>>> {
    if !(0.0..=0.2).contains(&gamma) {
        return Err(Error::InvalidParameter(format!(
            "gamma = {gamma} outside [0, 0.2]"
        )));
    }
    let g = gamma;
    let mut p = vec![
        vec![
            0.8 + g,
            3.0 * (0.2 - g) / 8.0,
            3.0 * (0.2 - g) / 8.0,
            (0.2 - g) / 4.0,
        ],
        vec![0.4 + g, (0.6 - g) / 3.0, (0.6 - g) / 3.0, (0.6 - g) / 3.0],
        vec![0.2, 0.2, 0.2, 0.6],
        vec![
            (0.2 + g) / 4.0,
            (0.2 + g) / 4.0,
            3.0 * (0.2 + g) / 8.0,
            0.8 - g,
        ],
    ];
    if normalize {
        normalize_rows(&mut p);
    }
    Ok(p)
}

/// Table-driven spec with four equal blocks of `n / 4` vertices.
pub fn table1_spec(gamma: f64, n: usize, k: f64, seed: u64, normalize: bool) -> Result<BlockModelSpec> {
    let size = n / 4;
    if size == 0 {
        return Err(Error::InvalidParameter(format!("n = {n} too small for 4 blocks")));
    }
    Ok(BlockModelSpec {
        blocks: TABLE1_BLOCKS
            .iter()
            .map(|&(community, is_core)| BlockSpec {
                community,
                is_core,
                size,
            })
            .collect(),
        probabilities: table1_probabilities(gamma, normalize)?,
        k,
        seed,
    })
}

/// Samples a graph from the block model. Each source vertex draws, per target
/// block, a binomial number of distinct targets; this is distributionally the
/// same as independent per-pair coin flips but costs O(n k) instead of O(n^2).
pub fn sample_block_model(spec: &BlockModelSpec) -> Result<(DirectedGraph, GroundTruth)> {
    spec.validate()?;
    let truth = spec.ground_truth()?;
    let mut offsets = Vec::with_capacity(spec.blocks.len());
    let mut block_of = Vec::with_capacity(spec.num_vertices());
    let mut acc = 0usize;
    for (b, block) in spec.blocks.iter().enumerate() {
        offsets.push(acc);
        acc += block.size;
        block_of.extend(std::iter::repeat_n(b, block.size));
    }
    let n = acc;

    let lists: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut rng = stream_rng(spec.seed, v as u64);
            let source_block = block_of[v];
            let mut targets = Vec::new();
            for (b, block) in spec.blocks.iter().enumerate() {
                let p = spec.k / block.size as f64 * spec.probabilities[source_block][b];
                let same = b == source_block;
                let candidates = block.size - usize::from(same);
                if p <= 0.0 || candidates == 0 {
                    continue;
                }
                let count = Binomial::new(candidates as u64, p)
                    .expect("validated probability")
                    .sample(&mut rng) as usize;
                // local index of v inside its own block; skipped over so no self-loop is drawn
                let local_self = if same { v - offsets[b] } else { usize::MAX };
                for idx in index::sample(&mut rng, candidates, count) {
                    let local = if idx >= local_self { idx + 1 } else { idx };
                    targets.push(offsets[b] + local);
                }
            }
            targets
        })
        .collect();
    Ok((DirectedGraph::from_out_lists(lists)?, truth))
}

/// Every vertex picks exactly `k` distinct out-neighbors uniformly at random.
pub fn random_out_regular(n: usize, k: usize, seed: u64) -> Result<DirectedGraph> {
    if k >= n {
        return Err(Error::InvalidNeighborCount { k, n });
    }
    let lists: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|v| {
            let mut rng = stream_rng(seed, v as u64);
            index::sample(&mut rng, n - 1, k)
                .into_iter()
                .map(|i| if i >= v { i + 1 } else { i })
                .collect()
        })
        .collect();
    DirectedGraph::from_out_lists(lists)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmCommunity {
    pub center: Vec<f64>,
    pub core_sigma: f64,
    pub periphery_sigma: f64,
    pub core_count: usize,
    pub periphery_count: usize,
}

/// Concentric Gaussian mixture: each community is a tight core Gaussian and
/// a wider periphery Gaussian sharing one center.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GmmSpec {
    pub dimension: usize,
    pub communities: Vec<GmmCommunity>,
    pub seed: u64,
}

impl GmmSpec {
    /// Two communities in 20 dimensions, 2000 points per block, centers at the
    /// origin and at 0.3 * ones; the second community's deviations are the
    /// first's (0.1 core, 0.3 periphery) scaled by `gamma`.
    pub fn two_community_default(gamma: f64, seed: u64) -> Self {
        let d = 20;
        let community = |center: f64, scale: f64| GmmCommunity {
            center: vec![center; d],
            core_sigma: 0.1 * scale,
            periphery_sigma: 0.3 * scale,
            core_count: 2000,
            periphery_count: 2000,
        };
        Self {
            dimension: d,
            communities: vec![community(0.0, 1.0), community(0.3, gamma)],
            seed,
        }
    }

    pub fn num_points(&self) -> usize {
        self.communities
            .iter()
            .map(|c| c.core_count + c.periphery_count)
            .sum()
    }

    fn validate(&self) -> Result<()> {
        if self.communities.is_empty() {
            return Err(Error::InvalidParameter("GMM needs at least one community".into()));
        }
        for (l, c) in self.communities.iter().enumerate() {
            if c.center.len() != self.dimension {
                return Err(Error::InvalidParameter(format!(
                    "center {l} has dimension {} (expected {})",
                    c.center.len(),
                    self.dimension
                )));
            }
            if c.core_count == 0 || c.periphery_count == 0 {
                return Err(Error::InvalidParameter(format!("community {l} has an empty block")));
            }
            if !(c.core_sigma >= 0.0 && c.periphery_sigma >= 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "community {l} has a negative standard deviation"
                )));
            }
            if c.periphery_sigma < 1.1 * c.core_sigma {
                log::warn!(
                    "community {l}: periphery sigma {} is below 1.1 x core sigma {}",
                    c.periphery_sigma,
                    c.core_sigma
                );
            }
        }
        Ok(())
    }
}

/// Samples the mixture. Rows are ordered community by community, core block
/// before periphery block. Returns row-major points.
pub fn sample_concentric_gmm(spec: &GmmSpec) -> Result<(Vec<Vec<f64>>, GroundTruth)> {
    spec.validate()?;
    let mut plan = Vec::with_capacity(spec.num_points());
    for (l, c) in spec.communities.iter().enumerate() {
        plan.extend(std::iter::repeat_n((l, true), c.core_count));
        plan.extend(std::iter::repeat_n((l, false), c.periphery_count));
    }
    let points: Vec<Vec<f64>> = plan
        .par_iter()
        .enumerate()
        .map(|(row, &(l, core))| {
            let c = &spec.communities[l];
            let sigma = if core { c.core_sigma } else { c.periphery_sigma };
            let mut rng = stream_rng(spec.seed, row as u64);
            c.center
                .iter()
                .map(|&mu| {
                    let z: f64 = rng.sample(StandardNormal);
                    mu + sigma * z
                })
                .collect()
        })
        .collect();
    let truth = GroundTruth::new(
        plan.iter().map(|&(l, _)| l).collect(),
        Some(plan.iter().map(|&(_, c)| c).collect()),
    )?;
    Ok((points, truth))
}
