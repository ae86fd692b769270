use thiserror::Error;

use crate::graph::NodeId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge {{{0}, {1}}} not found")]
    EdgeNotFound(NodeId, NodeId),

    #[error("edge {{{0}, {1}}} already present")]
    DuplicateEdge(NodeId, NodeId),

    #[error("self-loop at node {0}")]
    SelfLoop(NodeId),

    #[error("node {node} out of range for graph with {n} nodes")]
    NodeOutOfRange { node: NodeId, n: usize },

    #[error("weight of {{{u}, {v}}} must strictly increase: current {current}, requested {requested}")]
    MonotonicityViolation {
        u: NodeId,
        v: NodeId,
        current: u64,
        requested: u64,
    },

    #[error("weight {weight} outside [1, {bound}]")]
    WeightOutOfRange { weight: u64, bound: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("unsupported update: {0}")]
    Unsupported(String),

    #[error("oracle size cap exceeded: n = {n} > cap {cap}")]
    CapExceeded { n: usize, cap: usize },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
