use std::collections::BTreeMap;

use crate::error::Result;
use crate::graph::{Dist, NodeId, UpdateEvent};

/// Named operation counters, reported as JSON.
pub type Counters = BTreeMap<String, u64>;

/// Common surface of every decremental distance structure in the crate.
pub trait DecrementalApsp {
    fn name(&self) -> &'static str;

    fn node_count(&self) -> usize;

    /// Apply one update and finish all internal propagation.
    fn apply(&mut self, e: &UpdateEvent) -> Result<()>;

    /// Current estimate, `INF` when no certificate exists.
    fn query(&self, u: NodeId, v: NodeId) -> Dist;

    fn counters(&self) -> Counters;
}

impl<T: DecrementalApsp + ?Sized> DecrementalApsp for Box<T> {
    fn name(&self) -> &'static str {
        (**self).name()
    }

    fn node_count(&self) -> usize {
        (**self).node_count()
    }

    fn apply(&mut self, e: &UpdateEvent) -> Result<()> {
        (**self).apply(e)
    }

    fn query(&self, u: NodeId, v: NodeId) -> Dist {
        (**self).query(u, v)
    }

    fn counters(&self) -> Counters {
        (**self).counters()
    }
}

/// Turns a real-valued estimate built from rounded parts into an integer.
/// True distances are integers, so flooring keeps every lower bound intact.
pub(crate) fn floor_estimate(x: f64) -> Dist {
    if x.is_infinite() {
        crate::graph::INF
    } else {
        x.floor() as Dist
    }
}
