//! Fee-weighted graph construction and betweenness centrality.

mod brandes;
mod brute_force;
mod fee;
mod graph;
mod registry;
mod report;

use thiserror::Error;

pub use brandes::{betweenness, betweenness_exact, betweenness_with, Accumulator};
pub use brute_force::{brute_force_betweenness, brute_force_exact, BRUTE_FORCE_MAX_NODES};
pub use fee::fee_weight;
pub use graph::{build_graph, WeightedDigraph};
pub use registry::{
    AlgorithmRegistry, BrandesExact, BrandesParallel, BruteForce, CentralityAlgorithm,
    ComputeOptions,
};
pub use report::{rank_order, CentralityReport};

use crate::codec::NodeId;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricsError {
    #[error("fee overflow: base {base} + {amount} msat x {ppm} ppm exceeds u64")]
    Overflow { base: u32, ppm: u32, amount: u64 },
    #[error("negative weight {weight} on arc {src} -> {dst}")]
    NegativeWeight { src: usize, dst: usize, weight: i64 },
    #[error("arc endpoint {index} out of range for {nodes} nodes")]
    NodeIndex { index: usize, nodes: usize },
    #[error("duplicate node {0}")]
    DuplicateNode(NodeId),
    #[error("brute force limited to {max} nodes, graph has {nodes}")]
    TooLarge { nodes: usize, max: usize },
    #[error(
        "zero-fee cycle structure around source {source_index} needs more than {budget} path \
         expansions to count exactly"
    )]
    ZeroCycleBudget { source_index: usize, budget: usize },
    #[error("unknown centrality algorithm {0:?}")]
    UnknownAlgorithm(String),
    #[error("thread pool: {0}")]
    ThreadPool(String),
    #[error("report line {line}: {reason}")]
    BadReport { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, MetricsError>;
