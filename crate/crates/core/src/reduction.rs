//! Edge subdivision: replace every unweighted edge by a path of `k + 1` unit
//! edges so that all original distances scale by exactly `k + 1`.

use std::collections::BTreeMap;

use crate::algo::{Counters, DecrementalApsp};
use crate::error::{Error, Result};
use crate::graph::{Dist, DynamicGraph, NodeId, UpdateEvent, UpdateKind, INF};
use crate::mixed::{default_mixed_p, default_tau, DynApspMixed, MixedConfig};

#[derive(Debug, Clone)]
pub struct SubdividedGraph {
    n: usize,
    k: usize,
    ordinal: BTreeMap<(NodeId, NodeId), usize>,
    deleted: Vec<bool>,
    graph: DynamicGraph,
}

pub fn subdivide(g: &DynamicGraph, k: usize) -> Result<SubdividedGraph> {
    if k == 0 {
        return Err(Error::Config("subdivision count must be at least 1".into()));
    }
    if !g.is_unweighted() {
        return Err(Error::Config("subdivision needs an unweighted graph".into()));
    }
    let edges = g.edges();
    let n = g.n();
    let mut h = DynamicGraph::new(n + k * edges.len());
    let mut ordinal = BTreeMap::new();
    for (i, &(u, v, _)) in edges.iter().enumerate() {
        ordinal.insert((u, v), i);
        let mut prev = u;
        for j in 0..k {
            let x = n + k * i + j;
            h.add_edge(prev, x, 1)?;
            prev = x;
        }
        h.add_edge(prev, v, 1)?;
    }
    Ok(SubdividedGraph { n, k, deleted: vec![false; edges.len()], ordinal, graph: h })
}

impl SubdividedGraph {
    pub fn original_n(&self) -> usize {
        self.n
    }

    pub fn original_m(&self) -> usize {
        self.ordinal.len()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// The subdivided graph in its initial state.
    pub fn graph(&self) -> &DynamicGraph {
        &self.graph
    }

    /// Chain of nodes from `min(u, v)` to `max(u, v)`.
    pub fn chain(&self, u: NodeId, v: NodeId) -> Option<Vec<NodeId>> {
        let (a, b) = (u.min(v), u.max(v));
        let i = *self.ordinal.get(&(a, b))?;
        let mut c = vec![a];
        c.extend((0..self.k).map(|j| self.n + self.k * i + j));
        c.push(b);
        Some(c)
    }

    /// The `k + 1` deletions on the subdivided graph that realize `e`.
    pub fn translate_update(&mut self, e: &UpdateEvent) -> Result<Vec<UpdateEvent>> {
        if let UpdateKind::Increase(_) = e.kind {
            return Err(Error::Unsupported("weight increases on an unweighted graph".into()));
        }
        let (a, b) = (e.u.min(e.v), e.u.max(e.v));
        let i = *self.ordinal.get(&(a, b)).ok_or(Error::EdgeNotFound(e.u, e.v))?;
        if self.deleted[i] {
            return Err(Error::EdgeNotFound(e.u, e.v));
        }
        self.deleted[i] = true;
        let chain = self.chain(a, b).expect("edge has a chain");
        Ok(chain.windows(2).map(|w| UpdateEvent::delete(w[0], w[1])).collect())
    }
}

/// `⌊δ' / (k + 1)⌋`, keeping `INF`.
pub fn translate_query(estimate: Dist, k: usize) -> Dist {
    if estimate == INF {
        INF
    } else {
        estimate / (k as Dist + 1)
    }
}

/// Mixed structure run on the once-subdivided graph.
#[derive(Debug, Clone)]
pub struct UnweightedMult {
    sub: SubdividedGraph,
    inner: DynApspMixed,
}

impl UnweightedMult {
    /// `cfg.tau == 0` selects `⌈√m'⌉` of the subdivided graph.
    pub fn new(g: &DynamicGraph, cfg: MixedConfig) -> Result<Self> {
        let sub = subdivide(g, 1)?;
        let h = sub.graph().clone();
        let tau = if cfg.tau == 0 { default_tau(h.m()) } else { cfg.tau };
        let p = cfg.p.unwrap_or_else(|| default_mixed_p(h.m()));
        let inner = DynApspMixed::new(h, MixedConfig { p: Some(p), tau, ..cfg })?;
        Ok(UnweightedMult { sub, inner })
    }

    pub fn inner(&self) -> &DynApspMixed {
        &self.inner
    }

    pub fn subdivided(&self) -> &SubdividedGraph {
        &self.sub
    }

    pub fn delete(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        for e in self.sub.translate_update(&UpdateEvent::delete(u, v))? {
            self.inner.update(&e)?;
        }
        Ok(())
    }

    pub fn query(&self, u: NodeId, v: NodeId) -> Dist {
        translate_query(self.inner.query(u, v), self.sub.k())
    }
}

impl DecrementalApsp for UnweightedMult {
    fn name(&self) -> &'static str {
        "unweighted-mult"
    }

    fn node_count(&self) -> usize {
        self.sub.original_n()
    }

    fn apply(&mut self, e: &UpdateEvent) -> Result<()> {
        match e.kind {
            UpdateKind::Delete => self.delete(e.u, e.v),
            UpdateKind::Increase(_) => Err(Error::Unsupported("weight increases on an unweighted graph".into())),
        }
    }

    fn query(&self, u: NodeId, v: NodeId) -> Dist {
        UnweightedMult::query(self, u, v)
    }

    fn counters(&self) -> Counters {
        let mut c = self.inner.counter_map();
        c.insert("subdivided_nodes".into(), self.sub.graph().n() as u64);
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::exact_apsp;

    #[test]
    fn single_edge_twice_subdivided() {
        let g = DynamicGraph::from_edges(2, &[(0, 1, 1)]).unwrap();
        let s = subdivide(&g, 2).unwrap();
        assert_eq!(s.chain(1, 0), Some(vec![0, 2, 3, 1]));
        assert_eq!(exact_apsp(s.graph()).unwrap()[0][1], 3);
    }

    #[test]
    fn path_counts() {
        let g = DynamicGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1)]).unwrap();
        let s = subdivide(&g, 1).unwrap();
        assert_eq!((s.graph().n(), s.graph().m()), (5, 4));
    }

    #[test]
    fn delete_translates_to_chain() {
        let g = DynamicGraph::from_edges(2, &[(0, 1, 1)]).unwrap();
        let mut s = subdivide(&g, 2).unwrap();
        let es = s.translate_update(&UpdateEvent::delete(1, 0)).unwrap();
        assert_eq!(
            es,
            vec![UpdateEvent::delete(0, 2), UpdateEvent::delete(2, 3), UpdateEvent::delete(3, 1)]
        );
        assert_eq!(s.translate_update(&UpdateEvent::delete(0, 1)), Err(Error::EdgeNotFound(0, 1)));
        assert!(matches!(
            s.translate_update(&UpdateEvent::increase(0, 1, 2)),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn floor_division() {
        assert_eq!(translate_query(7, 2), 2);
        assert_eq!(translate_query(9, 2), 3);
        assert_eq!(translate_query(INF, 1), INF);
    }

    #[test]
    fn rejects_weighted_input() {
        let g = DynamicGraph::from_edges(2, &[(0, 1, 3)]).unwrap();
        assert!(subdivide(&g, 1).is_err());
    }
}
