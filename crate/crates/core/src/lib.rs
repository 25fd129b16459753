//! Core ranking for graphs with several core-periphery pairs.
//!
//! The crate covers the whole analysis path: an immutable CSR graph, seeded
//! generators (a core-periphery block model and a concentric Gaussian mixture),
//! exact k-NN embedding of point clouds, baseline centralities, the relative
//! centrality family (`n_rank`, `n2_rank`, `rn_rank` and the general
//! [`relcen::meta_rank`]), and the evaluation metrics used to judge a ranking
//! (core concentration, AUROC, balancedness, preservation ratio, ICEF, purity
//! and NMI of a downstream Louvain clustering).

pub mod centrality;
pub mod cluster;
pub mod embed;
pub mod error;
pub mod graph;
pub mod metrics;
pub mod relcen;
pub mod rng;
pub mod synth;

pub use centrality::{Ranking, ScoreVector};
pub use error::{Error, Result};
pub use graph::{DirectedGraph, VertexSet};
pub use synth::GroundTruth;
