use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge ({src}, {dst}) references a vertex outside [0, {n})")]
    VertexOutOfRange { src: usize, dst: usize, n: usize },

    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),

    #[error("vertex set is empty")]
    EmptyVertexSet,

    #[error("vertex set index {index} is invalid for a graph with {n} vertices")]
    InvalidVertexSet { index: usize, n: usize },

    #[error("edge probability {probability} exceeds 1 for block pair ({from}, {to})")]
    ProbabilityTooLarge {
        from: usize,
        to: usize,
        probability: f64,
    },

    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("k = {k} must satisfy 1 <= k < n = {n}")]
    InvalidNeighborCount { k: usize, n: usize },

    #[error("negative entry {value} at row {row}, column {col}")]
    NegativeEntry { row: usize, col: usize, value: f64 },

    #[error("non-finite entry at row {row}, column {col}")]
    NonFiniteEntry { row: usize, col: usize },

    #[error("pagerank did not converge after {iterations} iterations (residual {residual:e})")]
    NotConverged { iterations: usize, residual: f64 },

    #[error("katz series diverges (alpha = {alpha}); lower alpha below 1/spectral radius")]
    Diverged { alpha: f64 },

    #[error("score at vertex {0} is NaN")]
    NanScore(usize),

    #[error("core concentration undefined: the set has no outgoing edges")]
    NoOutgoingEdges,

    #[error("block (community {community}, core {core}) has no outgoing edges")]
    BlockWithoutOutEdges { community: usize, core: bool },

    #[error("ground truth has a single class; AUROC needs both core and periphery vertices")]
    SingleClass,

    #[error("ground truth has no communities with a nonempty core")]
    NoCores,

    #[error("ground truth carries no core/periphery flags")]
    MissingCoreFlags,

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
}
