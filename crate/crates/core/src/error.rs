use thiserror::Error;

use crate::graph::Vertex;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(Vertex),
    #[error("edge ({0}, {1}) is not in the graph")]
    NoSuchEdge(Vertex, Vertex),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("weight {0} exceeds the configured bound")]
    WeightTooLarge(u64),
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("path set is not independent: {0}")]
    NotIndependent(String),
    #[error("batch mixes failed edges; use the general baseline")]
    MixedBatch,
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("claim violated: {0}")]
    ClaimViolated(String),
}
