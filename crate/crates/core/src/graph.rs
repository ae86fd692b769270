//! Dynamic undirected weighted graph under deletions and weight increases,
//! plus the plain-text graph and update-stream formats.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::ops::Bound;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type NodeId = usize;
/// Distances and weights. `INF` marks "unreachable" / "deleted".
pub type Dist = u64;
pub const INF: Dist = u64::MAX;

#[inline]
pub fn sat_add(a: Dist, b: Dist) -> Dist {
    if a == INF || b == INF {
        INF
    } else {
        a.saturating_add(b)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpdateKind {
    Delete,
    Increase(Dist),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UpdateEvent {
    pub u: NodeId,
    pub v: NodeId,
    pub kind: UpdateKind,
}

impl UpdateEvent {
    pub fn delete(u: NodeId, v: NodeId) -> Self {
        UpdateEvent { u, v, kind: UpdateKind::Delete }
    }

    pub fn increase(u: NodeId, v: NodeId, weight: Dist) -> Self {
        UpdateEvent { u, v, kind: UpdateKind::Increase(weight) }
    }

    /// Target weight; a deletion is an increase to `INF`.
    pub fn new_weight(&self) -> Dist {
        match self.kind {
            UpdateKind::Delete => INF,
            UpdateKind::Increase(w) => w,
        }
    }
}

/// What actually changed, handed to downstream structures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeRecord {
    pub u: NodeId,
    pub v: NodeId,
    pub old: Dist,
    pub new: Dist,
    pub version: u64,
}

impl ChangeRecord {
    pub fn is_delete(&self) -> bool {
        self.new == INF
    }
}

/// One line of an update stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StreamItem {
    Update(UpdateEvent),
    Query(NodeId, NodeId),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DynamicGraph {
    adj: Vec<BTreeMap<NodeId, Dist>>,
    m: usize,
    weight_bound: Dist,
    version: u64,
    log: Vec<UpdateEvent>,
}

impl DynamicGraph {
    pub fn new(n: usize) -> Self {
        DynamicGraph {
            adj: vec![BTreeMap::new(); n],
            m: 0,
            weight_bound: 1,
            version: 0,
            log: Vec::new(),
        }
    }

    pub fn from_edges(n: usize, edges: &[(NodeId, NodeId, Dist)]) -> Result<Self> {
        let mut g = DynamicGraph::new(n);
        for &(u, v, w) in edges {
            g.add_edge(u, v, w)?;
        }
        Ok(g)
    }

    fn check_node(&self, u: NodeId) -> Result<()> {
        if u >= self.adj.len() {
            return Err(Error::NodeOutOfRange { node: u, n: self.adj.len() });
        }
        Ok(())
    }

    /// Construction-time insertion. Only valid before the first update.
    pub fn add_edge(&mut self, u: NodeId, v: NodeId, w: Dist) -> Result<()> {
        self.check_node(u)?;
        self.check_node(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if w == 0 || w == INF {
            return Err(Error::WeightOutOfRange { weight: w, bound: self.weight_bound.max(w) });
        }
        if self.adj[u].contains_key(&v) {
            return Err(Error::DuplicateEdge(u, v));
        }
        self.adj[u].insert(v, w);
        self.adj[v].insert(u, w);
        self.m += 1;
        self.weight_bound = self.weight_bound.max(w);
        Ok(())
    }

    /// Raise W so that later increases up to `w` are admissible.
    pub fn set_weight_bound(&mut self, w: Dist) {
        self.weight_bound = self.weight_bound.max(w);
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn weight_bound(&self) -> Dist {
        self.weight_bound
    }

    pub fn version(&self) -> u64 {
        self.version
    }

    pub fn log(&self) -> &[UpdateEvent] {
        &self.log
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> Option<Dist> {
        self.adj.get(u)?.get(&v).copied()
    }

    pub fn degree(&self, u: NodeId) -> usize {
        self.adj[u].len()
    }

    /// Neighbors in increasing id order.
    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = (NodeId, Dist)> + '_ {
        self.adj[u].iter().map(|(&v, &w)| (v, w))
    }

    /// Neighbors with id strictly greater than `x`, in increasing order.
    pub fn neighbors_after(&self, u: NodeId, x: NodeId) -> impl Iterator<Item = (NodeId, Dist)> + '_ {
        self.adj[u]
            .range((Bound::Excluded(x), Bound::Unbounded))
            .map(|(&v, &w)| (v, w))
    }

    /// Live edges with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(NodeId, NodeId, Dist)> {
        let mut out = Vec::with_capacity(self.m);
        for (u, nb) in self.adj.iter().enumerate() {
            for (&v, &w) in nb.range(u + 1..) {
                out.push((u, v, w));
            }
        }
        out
    }

    pub fn max_weight(&self) -> Dist {
        self.adj
            .iter()
            .flat_map(|nb| nb.values().copied())
            .max()
            .unwrap_or(0)
    }

    pub fn apply_update(&mut self, e: &UpdateEvent) -> Result<ChangeRecord> {
        let (u, v) = (e.u, e.v);
        self.check_node(u)?;
        self.check_node(v)?;
        let old = self.weight(u, v).ok_or(Error::EdgeNotFound(u, v))?;
        let new = e.new_weight();
        match e.kind {
            UpdateKind::Delete => {
                self.adj[u].remove(&v);
                self.adj[v].remove(&u);
                self.m -= 1;
            }
            UpdateKind::Increase(w) => {
                if w <= old {
                    return Err(Error::MonotonicityViolation { u, v, current: old, requested: w });
                }
                if w > self.weight_bound {
                    return Err(Error::WeightOutOfRange { weight: w, bound: self.weight_bound });
                }
                self.adj[u].insert(v, w);
                self.adj[v].insert(u, w);
            }
        }
        self.version += 1;
        self.log.push(*e);
        Ok(ChangeRecord { u, v, old, new, version: self.version })
    }

    /// Graph with the same live edges but no history.
    pub fn snapshot(&self) -> DynamicGraph {
        DynamicGraph {
            adj: self.adj.clone(),
            m: self.m,
            weight_bound: self.weight_bound,
            version: 0,
            log: Vec::new(),
        }
    }

    /// True when both graphs have identical live edges and weights.
    pub fn same_edges(&self, other: &DynamicGraph) -> bool {
        self.adj == other.adj
    }

    pub fn is_unweighted(&self) -> bool {
        self.adj.iter().all(|nb| nb.values().all(|&w| w == 1))
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    let tok = tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    tok.parse()
        .map_err(|_| parse_err(line, format!("bad {what} {tok:?}")))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

/// Parse "n m" followed by m lines "u v w".
pub fn load_graph(text: &str) -> Result<DynamicGraph> {
    let mut lines = content_lines(text);
    let (hl, header) = lines.next().ok_or_else(|| parse_err(1, "empty graph file"))?;
    let mut toks = header.split_whitespace();
    let n: usize = parse_num(toks.next(), hl, "node count")?;
    let m: usize = parse_num(toks.next(), hl, "edge count")?;
    if toks.next().is_some() {
        return Err(parse_err(hl, "trailing tokens in header"));
    }
    let mut g = DynamicGraph::new(n);
    let mut seen = 0usize;
    for (ln, l) in lines {
        let mut toks = l.split_whitespace();
        let u: NodeId = parse_num(toks.next(), ln, "endpoint")?;
        let v: NodeId = parse_num(toks.next(), ln, "endpoint")?;
        let w: Dist = parse_num(toks.next(), ln, "weight")?;
        if toks.next().is_some() {
            return Err(parse_err(ln, "trailing tokens"));
        }
        g.add_edge(u, v, w).map_err(|e| parse_err(ln, e.to_string()))?;
        seen += 1;
    }
    if seen != m {
        return Err(parse_err(hl, format!("header declares {m} edges, found {seen}")));
    }
    Ok(g)
}

pub fn write_graph(g: &DynamicGraph) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} {}", g.n(), g.m());
    for (u, v, w) in g.edges() {
        let _ = writeln!(s, "{u} {v} {w}");
    }
    s
}

/// Parse "d u v", "i u v w" and "q u v" lines.
pub fn parse_updates(text: &str) -> Result<Vec<StreamItem>> {
    let mut out = Vec::new();
    for (ln, l) in content_lines(text) {
        let mut toks = l.split_whitespace();
        let tag = toks.next().unwrap_or_default();
        let u: NodeId = parse_num(toks.next(), ln, "endpoint")?;
        let v: NodeId = parse_num(toks.next(), ln, "endpoint")?;
        let item = match tag {
            "d" => StreamItem::Update(UpdateEvent::delete(u, v)),
            "i" => {
                let w: Dist = parse_num(toks.next(), ln, "weight")?;
                if w == 0 {
                    return Err(parse_err(ln, "weight must be positive"));
                }
                StreamItem::Update(UpdateEvent::increase(u, v, w))
            }
            "q" => StreamItem::Query(u, v),
            other => return Err(parse_err(ln, format!("unknown tag {other:?}"))),
        };
        if toks.next().is_some() {
            return Err(parse_err(ln, "trailing tokens"));
        }
        out.push(item);
    }
    Ok(out)
}

pub fn write_updates(items: &[StreamItem]) -> String {
    let mut s = String::new();
    for it in items {
        let _ = match it {
            StreamItem::Update(UpdateEvent { u, v, kind: UpdateKind::Delete }) => writeln!(s, "d {u} {v}"),
            StreamItem::Update(UpdateEvent { u, v, kind: UpdateKind::Increase(w) }) => {
                writeln!(s, "i {u} {v} {w}")
            }
            StreamItem::Query(u, v) => writeln!(s, "q {u} {v}"),
        };
    }
    s
}

/// Largest weight that appears anywhere in the graph or the stream.
pub fn stream_weight_bound(g: &DynamicGraph, items: &[StreamItem]) -> Dist {
    items
        .iter()
        .filter_map(|it| match it {
            StreamItem::Update(UpdateEvent { kind: UpdateKind::Increase(w), .. }) => Some(*w),
            _ => None,
        })
        .fold(g.weight_bound(), Dist::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k3() -> DynamicGraph {
        load_graph("3 3\n0 1 1\n1 2 1\n0 2 1").unwrap()
    }

    #[test]
    fn loads_triangle() {
        let g = k3();
        assert_eq!((g.n(), g.m()), (3, 3));
        assert_eq!(g.weight(2, 0), Some(1));
    }

    #[test]
    fn delete_bumps_version() {
        let mut g = k3();
        let rec = g.apply_update(&UpdateEvent::delete(0, 1)).unwrap();
        assert_eq!(g.m(), 2);
        assert_eq!(g.version(), 1);
        assert!(rec.is_delete());
        assert_eq!(g.weight(1, 0), None);
        assert_eq!(
            g.apply_update(&UpdateEvent::delete(1, 0)),
            Err(Error::EdgeNotFound(1, 0))
        );
    }

    #[test]
    fn increase_must_grow() {
        let mut g = DynamicGraph::from_edges(2, &[(0, 1, 3)]).unwrap();
        g.set_weight_bound(10);
        g.apply_update(&UpdateEvent::increase(0, 1, 5)).unwrap();
        assert_eq!(g.weight(1, 0), Some(5));
        assert!(matches!(
            g.apply_update(&UpdateEvent::increase(0, 1, 2)),
            Err(Error::MonotonicityViolation { current: 5, requested: 2, .. })
        ));
        assert!(matches!(
            g.apply_update(&UpdateEvent::increase(0, 1, 11)),
            Err(Error::WeightOutOfRange { .. })
        ));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(load_graph("2 1\n0 0 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(
            load_graph("3 2\n0 1 1\n1 0 4"),
            Err(Error::Parse { line: 3, .. })
        ));
        assert!(matches!(load_graph("3 1\n0 1"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(load_graph("3 2\n0 1 1"), Err(Error::Parse { .. })));
        assert!(matches!(parse_updates("d 0 1\nx 1 2"), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn parses_stream() {
        let items = parse_updates("d 0 1\ni 0 1 7\nq 2 3\n").unwrap();
        assert_eq!(
            items,
            vec![
                StreamItem::Update(UpdateEvent::delete(0, 1)),
                StreamItem::Update(UpdateEvent::increase(0, 1, 7)),
                StreamItem::Query(2, 3),
            ]
        );
        assert_eq!(parse_updates(&write_updates(&items)).unwrap(), items);
    }

    #[test]
    fn graph_round_trip() {
        let g = DynamicGraph::from_edges(5, &[(0, 4, 3), (1, 2, 9), (3, 1, 1)]).unwrap();
        let h = load_graph(&write_graph(&g)).unwrap();
        assert!(g.same_edges(&h));
    }

    #[test]
    fn replay_reproduces_live_graph() {
        let mut g = DynamicGraph::from_edges(4, &[(0, 1, 1), (1, 2, 2), (2, 3, 3), (0, 3, 4)]).unwrap();
        g.set_weight_bound(20);
        let fresh = g.clone();
        g.apply_update(&UpdateEvent::increase(1, 2, 6)).unwrap();
        g.apply_update(&UpdateEvent::delete(0, 3)).unwrap();
        g.apply_update(&UpdateEvent::increase(2, 1, 19)).unwrap();
        let mut again = fresh;
        for e in g.log().to_vec() {
            again.apply_update(&e).unwrap();
        }
        assert!(again.same_edges(&g));
    }
}
