//! Decremental approximate all-pairs shortest paths.

pub mod additive;
pub mod algo;
pub mod bunch;
pub mod error;
pub mod es_tree;
pub mod graph;
pub mod harness;
pub mod heap;
pub mod mixed;
pub mod mult;
pub mod oracle;
pub mod reduction;
pub mod rounding;
pub mod workload;

pub use error::{Error, Result};
pub use graph::{Dist, DynamicGraph, NodeId, StreamItem, UpdateEvent, UpdateKind, INF};
pub use algo::{Counters, DecrementalApsp};
