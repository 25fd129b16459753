use mcpc_core::centrality::{
    degree_centrality, katz, onion_score, pagerank, KatzParams, PageRankParams, ScoreVector,
};
use mcpc_core::relcen::{n2_rank, n_rank, rn_rank};
use mcpc_core::DirectedGraph;

use crate::config::Method;
use crate::error::Result;

/// Scores every vertex with `method`; `default_t` fills in an unset initial
/// step count for the relative-centrality rankings.
pub fn score(method: &Method, graph: &DirectedGraph, default_t: usize) -> Result<ScoreVector> {
    let scores = match *method {
        Method::Degree => degree_centrality(graph),
        Method::Pagerank { damping } => pagerank(graph, &PageRankParams::with_damping(damping))?,
        Method::Katz { alpha } => katz(
            graph,
            &KatzParams {
                alpha,
                ..KatzParams::default()
            },
        )?,
        Method::Onion => onion_score(graph),
        Method::Nrank { t } => n_rank(graph, t.unwrap_or(default_t))?,
        Method::N2rank { t } => n2_rank(graph, t.unwrap_or(default_t))?,
        Method::Rnrank { t } => rn_rank(graph, t.unwrap_or(default_t))?,
    };
    Ok(scores)
}
