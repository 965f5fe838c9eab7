use crate::graph::{EdgeId, VertexId};
use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("singular matrix (rank {rank} of {size})")]
    Singular { rank: usize, size: usize },

    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("edge weights must be strictly positive (edge {0})")]
    NonPositiveWeight(EdgeId),
    #[error("cannot contract self-loop {0}")]
    ContractLoop(EdgeId),

    #[error("{what} exceeds size limit: {actual} > {limit}")]
    SizeLimit {
        what: &'static str,
        limit: usize,
        actual: usize,
    },
    #[error("vertices {0} and {1} are not connected (infinite resistance)")]
    Disconnected(VertexId, VertexId),
    #[error("graph is not connected")]
    NotConnected,
    #[error("invalid event: {0}")]
    InvalidEvent(String),
    #[error("conditioning set contains a cycle")]
    CyclicConditioning,
    #[error("symbolic mode requires uniform edge weights")]
    ModeMismatch,
    #[error("edges {0} and {1} are not adjacent")]
    NotAdjacent(EdgeId, EdgeId),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("acceptance rate {rate:.2e} below floor {floor:.2e}; use exact methods for dense graphs")]
    TooDense { rate: f64, floor: f64 },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
