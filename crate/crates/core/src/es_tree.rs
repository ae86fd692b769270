//! Even–Shiloach trees.
//!
//! `MonotoneEsTree` keeps a level `ℓ(v)` for every node, a heap `N(u)` per node
//! holding `ℓ(v) + w(u, v)` for each neighbor `v`, and a work queue of nodes
//! whose level may have to grow. Levels never decrease. Under deletions and
//! weight increases only, levels are exact distances up to the depth cap; with
//! insertions or weight decreases they remain upper bounds on the distance in
//! the tree's own graph view.

use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::cmp::Reverse;

use crate::error::{Error, Result};
use crate::graph::{sat_add, Dist, DynamicGraph, NodeId, INF};
use crate::heap::IndexedHeap;

#[derive(Debug, Clone)]
pub struct MonotoneEsTree {
    root: NodeId,
    cap: Dist,
    level: Vec<Dist>,
    adj: Vec<BTreeMap<NodeId, Dist>>,
    nbr: Vec<IndexedHeap<NodeId, Dist>>,
    in_queue: Vec<bool>,
    level_increases: u64,
    heap_updates: u64,
}

/// A plain ES-tree is the monotone tree used without insertions.
pub type EsTree = MonotoneEsTree;

impl MonotoneEsTree {
    /// Build over `n` nodes and the given edges, rooted at `root`, depth `cap`.
    pub fn new<I>(n: usize, edges: I, root: NodeId, cap: Dist) -> Result<Self>
    where
        I: IntoIterator<Item = (NodeId, NodeId, Dist)>,
    {
        if root >= n {
            return Err(Error::NodeOutOfRange { node: root, n });
        }
        let mut adj = vec![BTreeMap::new(); n];
        for (u, v, w) in edges {
            if u >= n || v >= n {
                return Err(Error::NodeOutOfRange { node: u.max(v), n });
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            if adj[u].insert(v, w).is_some() {
                return Err(Error::DuplicateEdge(u, v));
            }
            adj[v].insert(u, w);
        }
        let mut t = MonotoneEsTree {
            root,
            cap,
            level: vec![INF; n],
            adj,
            nbr: vec![IndexedHeap::new(); n],
            in_queue: vec![false; n],
            level_increases: 0,
            heap_updates: 0,
        };
        t.initialize();
        Ok(t)
    }

    pub fn from_graph(g: &DynamicGraph, root: NodeId, cap: Dist) -> Result<Self> {
        Self::new(g.n(), g.edges(), root, cap)
    }

    fn initialize(&mut self) {
        let n = self.level.len();
        let mut dist = vec![INF; n];
        let mut pq = BinaryHeap::new();
        dist[self.root] = 0;
        pq.push(Reverse((0, self.root)));
        while let Some(Reverse((d, u))) = pq.pop() {
            if d > dist[u] {
                continue;
            }
            for (&v, &w) in &self.adj[u] {
                let nd = sat_add(d, w);
                if nd <= self.cap && nd < dist[v] {
                    dist[v] = nd;
                    pq.push(Reverse((nd, v)));
                }
            }
        }
        self.level = dist;
        for u in 0..n {
            for (&v, &w) in &self.adj[u] {
                self.nbr[u].upsert(v, sat_add(self.level[v], w));
            }
        }
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn cap(&self) -> Dist {
        self.cap
    }

    pub fn n(&self) -> usize {
        self.level.len()
    }

    pub fn level(&self, v: NodeId) -> Dist {
        self.level[v]
    }

    pub fn levels(&self) -> &[Dist] {
        &self.level
    }

    /// Neighbor attaining the minimum in `N(v)`; `None` for the root and for
    /// unreachable nodes.
    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        if v == self.root || self.level[v] == INF {
            return None;
        }
        self.nbr[v].peek().map(|(x, _)| x)
    }

    pub fn weight(&self, u: NodeId, v: NodeId) -> Option<Dist> {
        self.adj[u].get(&v).copied()
    }

    pub fn neighbors(&self, u: NodeId) -> impl Iterator<Item = (NodeId, Dist)> + '_ {
        self.adj[u].iter().map(|(&v, &w)| (v, w))
    }

    /// Total number of level increases so far.
    pub fn level_increases(&self) -> u64 {
        self.level_increases
    }

    pub fn heap_updates(&self) -> u64 {
        self.heap_updates
    }

    fn set_key(&mut self, u: NodeId, v: NodeId, w: Dist) {
        // key of v inside N(u)
        let key = sat_add(self.level[v], w);
        self.nbr[u].upsert(v, key);
        self.heap_updates += 1;
    }

    fn enqueue(&mut self, q: &mut BTreeSet<(Dist, NodeId)>, v: NodeId) {
        if !self.in_queue[v] {
            self.in_queue[v] = true;
            q.insert((self.level[v], v));
        }
    }

    pub fn delete_edge(&mut self, u: NodeId, v: NodeId) -> Result<Vec<NodeId>> {
        if self.adj[u].remove(&v).is_none() {
            return Err(Error::EdgeNotFound(u, v));
        }
        self.adj[v].remove(&u);
        self.nbr[u].remove(&v);
        self.nbr[v].remove(&u);
        self.heap_updates += 2;
        Ok(self.update_levels(&[u, v]))
    }

    pub fn increase_weight(&mut self, u: NodeId, v: NodeId, w: Dist) -> Result<Vec<NodeId>> {
        if w == INF {
            return self.delete_edge(u, v);
        }
        let cur = self.weight(u, v).ok_or(Error::EdgeNotFound(u, v))?;
        if w < cur {
            return Err(Error::MonotonicityViolation { u, v, current: cur, requested: w });
        }
        self.adj[u].insert(v, w);
        self.adj[v].insert(u, w);
        self.set_key(u, v, w);
        self.set_key(v, u, w);
        Ok(self.update_levels(&[u, v]))
    }

    /// Adds an edge without lowering any level.
    pub fn insert_edge(&mut self, u: NodeId, v: NodeId, w: Dist) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        if self.adj[u].contains_key(&v) {
            return Err(Error::DuplicateEdge(u, v));
        }
        self.adj[u].insert(v, w);
        self.adj[v].insert(u, w);
        self.set_key(u, v, w);
        self.set_key(v, u, w);
        Ok(())
    }

    /// Lowers an edge weight. Only heap keys change; levels stay put.
    pub fn decrease_weight(&mut self, u: NodeId, v: NodeId, w: Dist) -> Result<()> {
        let cur = self.weight(u, v).ok_or(Error::EdgeNotFound(u, v))?;
        if w > cur {
            return Err(Error::MonotonicityViolation { u, v, current: cur, requested: w });
        }
        self.adj[u].insert(v, w);
        self.adj[v].insert(u, w);
        self.set_key(u, v, w);
        self.set_key(v, u, w);
        Ok(())
    }

    /// Moves edge `{u, v}` to weight `w`, where `INF` means absent.
    pub fn set_weight(&mut self, u: NodeId, v: NodeId, w: Dist) -> Result<Vec<NodeId>> {
        match (self.weight(u, v), w) {
            (None, INF) => Ok(Vec::new()),
            (None, w) => self.insert_edge(u, v, w).map(|_| Vec::new()),
            (Some(_), INF) => self.delete_edge(u, v),
            (Some(c), w) if w > c => self.increase_weight(u, v, w),
            (Some(c), w) if w < c => self.decrease_weight(u, v, w).map(|_| Vec::new()),
            _ => Ok(Vec::new()),
        }
    }

    fn update_levels(&mut self, seeds: &[NodeId]) -> Vec<NodeId> {
        let mut q = BTreeSet::new();
        for &s in seeds {
            self.enqueue(&mut q, s);
        }
        let mut changed = Vec::new();
        while let Some((_, u)) = q.pop_first() {
            self.in_queue[u] = false;
            if u == self.root {
                continue;
            }
            let mut new_level = self.nbr[u].min_priority().unwrap_or(INF);
            if new_level > self.cap {
                new_level = INF;
            }
            if new_level <= self.level[u] {
                continue;
            }
            self.level[u] = new_level;
            self.level_increases += 1;
            changed.push(u);
            let nbrs: Vec<(NodeId, Dist)> = self.neighbors(u).collect();
            for (v, w) in nbrs {
                self.set_key(v, u, w);
                self.enqueue(&mut q, v);
            }
        }
        changed.sort_unstable();
        changed.dedup();
        changed
    }

    /// Heap keys agree with levels and weights, and no level sits below the
    /// best neighbor offer unless it is the root.
    pub fn check_consistency(&self) -> std::result::Result<(), String> {
        for u in 0..self.n() {
            if self.nbr[u].len() != self.adj[u].len() {
                return Err(format!("N({u}) size mismatch"));
            }
            for (&v, &w) in &self.adj[u] {
                if self.nbr[u].get(&v) != Some(sat_add(self.level[v], w)) {
                    return Err(format!("stale key for {v} in N({u})"));
                }
            }
        }
        if self.level[self.root] != 0 {
            return Err("root level not zero".into());
        }
        Ok(())
    }
}
