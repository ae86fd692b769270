//! `(2 + ε, W_uv)`-approximate decremental APSP.
//!
//! Same bunches and pivot route as the multiplicative structure, but the
//! adjacent heaps are replaced by two other routes:
//!
//! * heavy nodes, those that were ever in at least `τ` bunches, each get an
//!   exact ES-tree, and every node tracks its closest heavy node `q(v)`;
//! * for light nodes, `Q^overlap[u, v]` holds each light `w ∈ B(u) ∩ B(v)`
//!   keyed by `δ̃_B(u, w) + δ̃_B(v, w)`.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use ordered_float::OrderedFloat;

use crate::algo::{floor_estimate, Counters, DecrementalApsp};
use crate::bunch::{BunchChangeEvent, BunchEngine, ChangeKind, PivotSample};
use crate::error::{Error, Result};
use crate::es_tree::EsTree;
use crate::graph::{sat_add, ChangeRecord, Dist, DynamicGraph, NodeId, UpdateEvent, INF};
use crate::heap::IndexedHeap;
use crate::mult::{check_eps, pivot_route};
use crate::rounding::{Rounded, Rounder};

type Key = OrderedFloat<f64>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixedConfig {
    /// Sampling probability; defaults to `m^(-1/4)` capped at 1.
    pub p: Option<f64>,
    pub tau: usize,
    pub eps: f64,
    pub seed: u64,
}

impl MixedConfig {
    pub fn new(tau: usize) -> Self {
        MixedConfig { p: None, tau, eps: 0.9, seed: 0 }
    }
}

pub fn default_mixed_p(m: usize) -> f64 {
    if m == 0 {
        1.0
    } else {
        (m as f64).powf(-0.25).min(1.0)
    }
}

pub fn default_tau(m: usize) -> usize {
    ((m as f64).sqrt().ceil() as usize).max(1)
}

fn pair(u: NodeId, v: NodeId) -> (NodeId, NodeId) {
    (u.min(v), u.max(v))
}

#[derive(Debug, Clone, Default)]
struct Stats {
    overlap_touches: u64,
    heavy_pivot_touches: u64,
    promotions: u64,
    bunch_events: u64,
}

#[derive(Debug, Clone)]
pub struct DynApspMixed {
    g: DynamicGraph,
    tau: usize,
    rounder: Rounder,
    bunches: BunchEngine,
    mirror: Vec<BTreeMap<NodeId, Rounded>>,
    mirror_cluster: Vec<BTreeSet<NodeId>>,
    heavy_since: Vec<Option<u64>>,
    heavy_trees: BTreeMap<NodeId, EsTree>,
    heavy_pivot: Vec<IndexedHeap<NodeId, Dist>>,
    overlap: HashMap<(NodeId, NodeId), IndexedHeap<NodeId, Key>>,
    stats: Stats,
}

impl DynApspMixed {
    pub fn new(g: DynamicGraph, cfg: MixedConfig) -> Result<Self> {
        let p = cfg.p.unwrap_or_else(|| default_mixed_p(g.m()));
        check_eps(cfg.eps)?;
        let bunches = BunchEngine::new(&g, p, cfg.eps, cfg.seed)?;
        Self::assemble(g, cfg.tau, bunches)
    }

    pub fn with_sample(g: DynamicGraph, sample: PivotSample, tau: usize, eps: f64) -> Result<Self> {
        check_eps(eps)?;
        let bunches = BunchEngine::with_sample(&g, sample, eps)?;
        Self::assemble(g, tau, bunches)
    }

    fn assemble(g: DynamicGraph, tau: usize, bunches: BunchEngine) -> Result<Self> {
        if tau == 0 {
            return Err(Error::Config("overlap threshold must be at least 1".into()));
        }
        let n = g.n();
        let mut s = DynApspMixed {
            rounder: *bunches.rounder(),
            tau,
            bunches,
            mirror: vec![BTreeMap::new(); n],
            mirror_cluster: vec![BTreeSet::new(); n],
            heavy_since: vec![None; n],
            heavy_trees: BTreeMap::new(),
            heavy_pivot: vec![IndexedHeap::new(); n],
            overlap: HashMap::new(),
            stats: Stats::default(),
            g,
        };
        for w in 0..n {
            if s.bunches.cluster(w).len() >= tau {
                s.promote(w)?;
            }
        }
        for v in 0..n {
            let members: Vec<(NodeId, Rounded)> =
                s.bunches.bunch(v).iter().map(|(&w, m)| (w, m.rounded)).collect();
            for (w, r) in members {
                s.apply_event(&BunchChangeEvent { owner: v, member: w, kind: ChangeKind::Join, value: Some(r) })?;
            }
        }
        s.stats = Stats { promotions: s.stats.promotions, ..Stats::default() };
        Ok(s)
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.g
    }

    pub fn bunches(&self) -> &BunchEngine {
        &self.bunches
    }

    pub fn tau(&self) -> usize {
        self.tau
    }

    pub fn is_heavy(&self, w: NodeId) -> bool {
        self.heavy_since[w].is_some()
    }

    /// Graph version at which `w` became heavy.
    pub fn heavy_since(&self, w: NodeId) -> Option<u64> {
        self.heavy_since[w]
    }

    pub fn heavy_nodes(&self) -> Vec<NodeId> {
        self.heavy_trees.keys().copied().collect()
    }

    pub fn heavy_count(&self) -> usize {
        self.heavy_trees.len()
    }

    /// Closest heavy node and the distance to it.
    pub fn heavy_pivot(&self, v: NodeId) -> Option<(NodeId, Dist)> {
        self.heavy_pivot[v].peek().filter(|&(_, d)| d != INF)
    }

    fn heavy_dist(&self, s: NodeId, v: NodeId) -> Dist {
        self.heavy_trees.get(&s).map_or(INF, |t| t.level(v))
    }

    fn promote(&mut self, w: NodeId) -> Result<()> {
        if self.heavy_since[w].is_some() {
            return Ok(());
        }
        let cap = (self.g.n() as Dist).max(1).saturating_mul(self.g.weight_bound());
        let t = EsTree::from_graph(&self.g, w, cap)?;
        for v in 0..self.g.n() {
            self.heavy_pivot[v].upsert(w, t.level(v));
            self.stats.heavy_pivot_touches += 1;
        }
        self.heavy_trees.insert(w, t);
        self.heavy_since[w] = Some(self.g.version());
        self.stats.promotions += 1;
        // purge every overlap entry of w
        let owners: Vec<NodeId> = self.mirror_cluster[w].iter().copied().collect();
        for (i, &a) in owners.iter().enumerate() {
            for &b in &owners[i + 1..] {
                self.sync_overlap(a, b, w);
            }
        }
        Ok(())
    }

    fn sync_overlap(&mut self, a: NodeId, b: NodeId, w: NodeId) {
        if a == b {
            return;
        }
        let want = match (self.is_heavy(w), self.mirror[a].get(&w), self.mirror[b].get(&w)) {
            (false, Some(&x), Some(&y)) => Some(OrderedFloat(self.rounder.value(x) + self.rounder.value(y))),
            _ => None,
        };
        let key = pair(a, b);
        match want {
            Some(k) => {
                if self.overlap.entry(key).or_default().upsert(w, k) != Some(k) {
                    self.stats.overlap_touches += 1;
                }
            }
            None => {
                if let Some(h) = self.overlap.get_mut(&key) {
                    if h.remove(&w).is_some() {
                        self.stats.overlap_touches += 1;
                    }
                    if h.is_empty() {
                        self.overlap.remove(&key);
                    }
                }
            }
        }
    }

    fn apply_event(&mut self, ev: &BunchChangeEvent) -> Result<()> {
        let (u, w) = (ev.owner, ev.member);
        match ev.value {
            Some(r) => {
                self.mirror[u].insert(w, r);
                self.mirror_cluster[w].insert(u);
            }
            None => {
                self.mirror[u].remove(&w);
                self.mirror_cluster[w].remove(&u);
            }
        }
        if ev.kind == ChangeKind::Join && !self.is_heavy(w) && self.bunches.cluster(w).len() >= self.tau {
            return self.promote(w);
        }
        if self.is_heavy(w) {
            return Ok(());
        }
        let others: Vec<NodeId> = self.mirror_cluster[w].iter().copied().collect();
        for b in others {
            self.sync_overlap(u, b, w);
        }
        Ok(())
    }

    fn update_heavy_trees(&mut self, rec: &ChangeRecord) {
        let mut moved: Vec<(NodeId, Vec<NodeId>)> = Vec::new();
        for (&s, t) in &mut self.heavy_trees {
            let changed = if rec.is_delete() {
                t.delete_edge(rec.u, rec.v)
            } else {
                t.increase_weight(rec.u, rec.v, rec.new)
            }
            .expect("heavy trees mirror the graph");
            moved.push((s, changed));
        }
        for (s, vs) in moved {
            for v in vs {
                let d = self.heavy_dist(s, v);
                self.heavy_pivot[v].upsert(s, d);
                self.stats.heavy_pivot_touches += 1;
            }
        }
    }

    pub fn update(&mut self, e: &UpdateEvent) -> Result<()> {
        let rec = self.g.apply_update(e)?;
        let events = self.bunches.refresh(&self.g, &rec);
        self.update_heavy_trees(&rec);
        self.stats.bunch_events += events.len() as u64;
        for ev in &events {
            self.apply_event(ev)?;
        }
        Ok(())
    }

    pub fn delete(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        self.update(&UpdateEvent::delete(u, v))
    }

    pub fn increase(&mut self, u: NodeId, v: NodeId, w: Dist) -> Result<()> {
        self.update(&UpdateEvent::increase(u, v, w))
    }

    pub fn heavy_route(&self, u: NodeId, v: NodeId) -> Dist {
        let via = |a: NodeId, b: NodeId| match self.heavy_pivot(a) {
            Some((q, d)) => sat_add(d, self.heavy_dist(q, b)),
            None => INF,
        };
        via(u, v).min(via(v, u))
    }

    pub fn overlap_route(&self, u: NodeId, v: NodeId) -> f64 {
        self.overlap
            .get(&pair(u, v))
            .and_then(|h| h.min_priority())
            .map_or(f64::INFINITY, |k| k.0)
    }

    pub fn query(&self, u: NodeId, v: NodeId) -> Dist {
        if u == v {
            return 0;
        }
        pivot_route(&self.bunches, u, v)
            .min(self.heavy_route(u, v))
            .min(floor_estimate(self.overlap_route(u, v)))
    }

    /// Nodes `w` with an entry in `Q^overlap[u, v]`.
    pub fn overlap_members(&self, u: NodeId, v: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .overlap
            .get(&pair(u, v))
            .map(|h| h.iter().map(|(k, _)| k).collect())
            .unwrap_or_default();
        out.sort_unstable();
        out
    }

    /// Pairs `{u, b}` whose overlap heap holds `w`.
    pub fn overlap_set(&self, w: NodeId, u: NodeId) -> Vec<NodeId> {
        let mut out: Vec<NodeId> = self
            .overlap
            .iter()
            .filter(|(&(a, b), h)| (a == u || b == u) && h.contains(&w))
            .map(|(&(a, b), _)| if a == u { b } else { a })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn overlap_touches(&self) -> u64 {
        self.stats.overlap_touches
    }

    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.g.n();
        for v in 0..n {
            let b: BTreeMap<NodeId, Rounded> =
                self.bunches.bunch(v).iter().map(|(&w, m)| (w, m.rounded)).collect();
            if b != self.mirror[v] {
                return Err(format!("applied bunch of {v} is stale"));
            }
        }
        let mut want: HashMap<(NodeId, NodeId), BTreeMap<NodeId, f64>> = HashMap::new();
        for w in (0..n).filter(|&w| !self.is_heavy(w)) {
            let c: Vec<NodeId> = self.mirror_cluster[w].iter().copied().collect();
            for (i, &a) in c.iter().enumerate() {
                for &b in &c[i + 1..] {
                    let k = self.rounder.value(self.mirror[a][&w]) + self.rounder.value(self.mirror[b][&w]);
                    want.entry(pair(a, b)).or_default().insert(w, k);
                }
            }
        }
        if want.len() != self.overlap.len() {
            return Err(format!("{} overlap heaps, expected {}", self.overlap.len(), want.len()));
        }
        for (key, es) in &want {
            let have: BTreeMap<NodeId, f64> = self
                .overlap
                .get(key)
                .map(|h| h.iter().map(|(k, p)| (k, p.0)).collect())
                .unwrap_or_default();
            if &have != es {
                return Err(format!("Q^overlap{key:?} differs"));
            }
        }
        for v in 0..n {
            let have: BTreeMap<NodeId, Dist> = self.heavy_pivot[v].iter().collect();
            let exp: BTreeMap<NodeId, Dist> =
                self.heavy_trees.iter().map(|(&s, t)| (s, t.level(v))).collect();
            if have != exp {
                return Err(format!("heavy pivot heap of {v} differs"));
            }
        }
        Ok(())
    }

    pub fn counter_map(&self) -> Counters {
        let mut c = Counters::new();
        c.insert("overlap_touches".into(), self.stats.overlap_touches);
        c.insert("heavy_pivot_touches".into(), self.stats.heavy_pivot_touches);
        c.insert("promotions".into(), self.stats.promotions);
        c.insert("heavy_nodes".into(), self.heavy_count() as u64);
        c.insert("bunch_events".into(), self.stats.bunch_events);
        c.insert("bunch_rebuilds".into(), self.bunches.total_rebuilds());
        c.insert("max_bunch_rebuilds".into(), self.bunches.max_rebuilds());
        c.insert("bunch_load".into(), self.bunches.total_load());
        c.insert("pivot_level_increases".into(), self.bunches.level_increases());
        c.insert(
            "heavy_level_increases".into(),
            self.heavy_trees.values().map(|t| t.level_increases()).sum(),
        );
        c.insert("pivots".into(), self.bunches.sources().len() as u64);
        c
    }
}

impl DecrementalApsp for DynApspMixed {
    fn name(&self) -> &'static str {
        "mixed"
    }

    fn node_count(&self) -> usize {
        self.g.n()
    }

    fn apply(&mut self, e: &UpdateEvent) -> Result<()> {
        self.update(e)
    }

    fn query(&self, u: NodeId, v: NodeId) -> Dist {
        DynApspMixed::query(self, u, v)
    }

    fn counters(&self) -> Counters {
        self.counter_map()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> DynamicGraph {
        DynamicGraph::from_edges(n, &(0..n - 1).map(|i| (i, i + 1, 1)).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn huge_threshold_keeps_everything_light() {
        let g = path(8);
        let mut a = DynApspMixed::new(g, MixedConfig { p: Some(0.3), tau: 9, eps: 0.9, seed: 2 }).unwrap();
        a.delete(3, 4).unwrap();
        assert_eq!(a.heavy_count(), 0);
        a.check_invariants().unwrap();
    }

    #[test]
    fn unit_threshold_empties_overlaps() {
        let g = path(8);
        let a = DynApspMixed::new(g, MixedConfig { p: Some(0.3), tau: 1, eps: 0.9, seed: 2 }).unwrap();
        for w in 0..8 {
            if !a.bunches().cluster(w).is_empty() {
                assert!(a.is_heavy(w));
            }
        }
        assert!(a.overlap.is_empty());
        a.check_invariants().unwrap();
    }

    #[test]
    fn light_overlap_on_path() {
        // pivots only at the far ends, so the middle is in both inner bunches
        let g = path(7);
        let s = PivotSample::explicit(7, 0.3, &[0, 6]);
        let a = DynApspMixed::with_sample(g, s, 100, 0.9).unwrap();
        assert!(a.overlap_members(2, 4).contains(&3));
        assert_eq!(a.query(2, 4), 2);
    }

    #[test]
    fn zero_threshold_rejected() {
        assert!(matches!(
            DynApspMixed::new(path(3), MixedConfig::new(0)),
            Err(Error::Config(_))
        ));
    }
}
