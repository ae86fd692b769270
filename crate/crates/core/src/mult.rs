//! `(2 + ε)`-approximate decremental APSP on weighted graphs.
//!
//! Estimates come from two routes. The pivot route goes through the closest
//! sampled node. The adjacent route combines an in-bunch hop `u → x` with a
//! neighboring-bunch hop `x → y ∈ B(v)`:
//!
//! * `Q^nbr[x, v]` holds every `y ∈ N(x) ∩ B(v)` keyed by `w̃(x, y) + δ̃_B(y, v)`.
//!   Its rounded minimum is `δ̃^nbr(x, v)`.
//! * `Q^adj[u, v]` holds every `x ∈ B(u)` with a defined `δ̃^nbr(x, v)`, keyed by
//!   `δ̃_B(u, x) + δ̃^nbr(x, v)`.
//!
//! The heaps follow an applied copy of the bunches. Every maintenance step
//! recomputes one entry from current state, so the order of the fan-out does
//! not matter for the final contents.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use ordered_float::OrderedFloat;

use crate::algo::{floor_estimate, Counters, DecrementalApsp};
use crate::bunch::{BunchChangeEvent, BunchEngine, ChangeKind, PivotSample};
use crate::error::{Error, Result};
use crate::graph::{sat_add, ChangeRecord, Dist, DynamicGraph, NodeId, UpdateEvent, INF};
use crate::heap::IndexedHeap;
use crate::rounding::{Rounded, Rounder};

type Key = OrderedFloat<f64>;
type Pair = (NodeId, NodeId);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultConfig {
    /// Sampling probability; defaults to `sqrt(n / m)` capped at 1.
    pub p: Option<f64>,
    pub eps: f64,
    pub seed: u64,
}

impl Default for MultConfig {
    fn default() -> Self {
        MultConfig { p: None, eps: 0.9, seed: 0 }
    }
}

pub fn default_mult_p(n: usize, m: usize) -> f64 {
    if m == 0 {
        return 1.0;
    }
    (n as f64 / m as f64).sqrt().min(1.0)
}

#[derive(Debug, Clone, Default)]
struct Stats {
    heap_touches: u64,
    edge_changes: u64,
    bunch_events: u64,
    nbr_changes: HashMap<Pair, u64>,
}

#[derive(Debug, Clone)]
pub struct DynApspMult {
    g: DynamicGraph,
    eps: f64,
    rounder: Rounder,
    bunches: BunchEngine,
    // applied copy of B(v) with rounded in-bunch estimates, and its reverse
    mirror: Vec<BTreeMap<NodeId, Rounded>>,
    mirror_cluster: Vec<BTreeSet<NodeId>>,
    nbr: HashMap<Pair, IndexedHeap<NodeId, Key>>,
    nbr_min: HashMap<Pair, Rounded>,
    nbr_targets: Vec<BTreeSet<NodeId>>,
    adj: HashMap<Pair, IndexedHeap<NodeId, Key>>,
    stats: Stats,
}

impl DynApspMult {
    pub fn new(g: DynamicGraph, cfg: MultConfig) -> Result<Self> {
        let p = cfg.p.unwrap_or_else(|| default_mult_p(g.n(), g.m()));
        let bunches = BunchEngine::new(&g, p, cfg.eps, cfg.seed)?;
        Self::assemble(g, cfg.eps, bunches)
    }

    pub fn with_sample(g: DynamicGraph, sample: PivotSample, eps: f64) -> Result<Self> {
        let bunches = BunchEngine::with_sample(&g, sample, eps)?;
        Self::assemble(g, eps, bunches)
    }

    fn assemble(g: DynamicGraph, eps: f64, bunches: BunchEngine) -> Result<Self> {
        check_eps(eps)?;
        let n = g.n();
        let mut s = DynApspMult {
            rounder: *bunches.rounder(),
            eps,
            bunches,
            mirror: vec![BTreeMap::new(); n],
            mirror_cluster: vec![BTreeSet::new(); n],
            nbr: HashMap::new(),
            nbr_min: HashMap::new(),
            nbr_targets: vec![BTreeSet::new(); n],
            adj: HashMap::new(),
            stats: Stats::default(),
            g,
        };
        for v in 0..n {
            let members: Vec<(NodeId, Rounded)> =
                s.bunches.bunch(v).iter().map(|(&w, m)| (w, m.rounded)).collect();
            for (w, r) in members {
                s.apply_event(&BunchChangeEvent {
                    owner: v,
                    member: w,
                    kind: ChangeKind::Join,
                    value: Some(r),
                });
            }
        }
        s.stats = Stats::default();
        Ok(s)
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.g
    }

    pub fn bunches(&self) -> &BunchEngine {
        &self.bunches
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn w_tilde(&self, x: NodeId, y: NodeId) -> Option<Rounded> {
        self.g.weight(x, y).map(|w| self.rounder.round(w))
    }

    fn val(&self, r: Rounded) -> f64 {
        self.rounder.value(r)
    }

    /// Make the entry `y` of `Q^nbr[x, v]` match the graph and the mirror.
    fn sync_nbr_entry(&mut self, x: NodeId, v: NodeId, y: NodeId) {
        let want = match (self.w_tilde(x, y), self.mirror[v].get(&y)) {
            (Some(w), Some(&b)) => Some(OrderedFloat(self.val(w) + self.val(b))),
            _ => None,
        };
        let key = (x, v);
        let changed = match want {
            Some(k) => {
                let h = self.nbr.entry(key).or_default();
                h.upsert(y, k) != Some(k)
            }
            None => match self.nbr.get_mut(&key) {
                Some(h) => {
                    let had = h.remove(&y).is_some();
                    if h.is_empty() {
                        self.nbr.remove(&key);
                    }
                    had
                }
                None => false,
            },
        };
        if changed {
            self.stats.heap_touches += 1;
            self.sync_nbr_min(x, v);
        }
    }

    /// Recompute `δ̃^nbr(x, v)` and push a change into every `Q^adj[u, v]`
    /// with `x ∈ B(u)`.
    fn sync_nbr_min(&mut self, x: NodeId, v: NodeId) {
        let fresh = self
            .nbr
            .get(&(x, v))
            .and_then(|h| h.min_priority())
            .map(|k| self.rounder.round_f64(k.0));
        let old = self.nbr_min.get(&(x, v)).copied();
        if fresh == old {
            return;
        }
        *self.stats.nbr_changes.entry((x, v)).or_default() += 1;
        match fresh {
            Some(r) => {
                self.nbr_min.insert((x, v), r);
                self.nbr_targets[x].insert(v);
            }
            None => {
                self.nbr_min.remove(&(x, v));
                self.nbr_targets[x].remove(&v);
            }
        }
        let owners: Vec<NodeId> = self.mirror_cluster[x].iter().copied().collect();
        for u in owners {
            self.sync_adj_entry(u, v, x);
        }
    }

    /// Make the entry `x` of `Q^adj[u, v]` match the mirror and `δ̃^nbr(x, v)`.
    fn sync_adj_entry(&mut self, u: NodeId, v: NodeId, x: NodeId) {
        let want = match (self.mirror[u].get(&x), self.nbr_min.get(&(x, v))) {
            (Some(&b), Some(&nb)) => Some(OrderedFloat(self.val(b) + self.val(nb))),
            _ => None,
        };
        let key = (u, v);
        match want {
            Some(k) => {
                if self.adj.entry(key).or_default().upsert(x, k) != Some(k) {
                    self.stats.heap_touches += 1;
                }
            }
            None => {
                if let Some(h) = self.adj.get_mut(&key) {
                    if h.remove(&x).is_some() {
                        self.stats.heap_touches += 1;
                    }
                    if h.is_empty() {
                        self.adj.remove(&key);
                    }
                }
            }
        }
    }

    fn apply_event(&mut self, ev: &BunchChangeEvent) {
        let (v, y) = (ev.owner, ev.member);
        match ev.value {
            Some(r) => {
                self.mirror[v].insert(y, r);
                self.mirror_cluster[y].insert(v);
            }
            None => {
                self.mirror[v].remove(&y);
                self.mirror_cluster[y].remove(&v);
            }
        }
        // y's entries in Q^nbr[x, v] for every neighbor x
        let nbrs: Vec<NodeId> = self.g.neighbors(y).map(|(x, _)| x).collect();
        for x in nbrs {
            self.sync_nbr_entry(x, v, y);
        }
        // y's entries in Q^adj[v, t] for every t with δ̃^nbr(y, t) defined
        let targets: Vec<NodeId> = self.nbr_targets[y].iter().copied().collect();
        for t in targets {
            self.sync_adj_entry(v, t, y);
        }
    }

    fn apply_edge_change(&mut self, rec: &ChangeRecord) {
        let old = self.rounder.round(rec.old);
        let new = self.rounder.round(rec.new);
        if old == new {
            return;
        }
        self.stats.edge_changes += 1;
        for (x, y) in [(rec.u, rec.v), (rec.v, rec.u)] {
            let owners: Vec<NodeId> = self.mirror_cluster[y].iter().copied().collect();
            for v in owners {
                self.sync_nbr_entry(x, v, y);
            }
        }
    }

    pub fn update(&mut self, e: &UpdateEvent) -> Result<()> {
        let rec = self.g.apply_update(e)?;
        let events = self.bunches.refresh(&self.g, &rec);
        self.apply_edge_change(&rec);
        self.stats.bunch_events += events.len() as u64;
        for ev in &events {
            self.apply_event(ev);
        }
        Ok(())
    }

    pub fn delete(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        self.update(&UpdateEvent::delete(u, v))
    }

    pub fn increase(&mut self, u: NodeId, v: NodeId, w: Dist) -> Result<()> {
        self.update(&UpdateEvent::increase(u, v, w))
    }

    pub fn pivot_route(&self, u: NodeId, v: NodeId) -> Dist {
        pivot_route(&self.bunches, u, v)
    }

    pub fn adjacent_route(&self, u: NodeId, v: NodeId) -> f64 {
        self.adj
            .get(&(u, v))
            .and_then(|h| h.min_priority())
            .map_or(f64::INFINITY, |k| k.0)
    }

    pub fn query(&self, u: NodeId, v: NodeId) -> Dist {
        if u == v {
            return 0;
        }
        let adj = floor_estimate(self.adjacent_route(u, v));
        self.pivot_route(u, v).min(adj)
    }

    pub fn nbr_min(&self, x: NodeId, v: NodeId) -> Option<Rounded> {
        self.nbr_min.get(&(x, v)).copied()
    }

    pub fn max_nbr_changes(&self) -> u64 {
        self.stats.nbr_changes.values().copied().max().unwrap_or(0)
    }

    /// Sorted `(y, key)` entries of `Q^nbr[x, v]`.
    pub fn nbr_entries(&self, x: NodeId, v: NodeId) -> Vec<(NodeId, f64)> {
        sorted_entries(self.nbr.get(&(x, v)))
    }

    /// Sorted `(x, key)` entries of `Q^adj[u, v]`.
    pub fn adj_entries(&self, u: NodeId, v: NodeId) -> Vec<(NodeId, f64)> {
        sorted_entries(self.adj.get(&(u, v)))
    }

    /// Full contents of both heap families, for structural comparisons.
    pub fn heap_snapshot(&self) -> BTreeMap<(char, NodeId, NodeId), Vec<(NodeId, u64)>> {
        let mut out = BTreeMap::new();
        for (tag, fam) in [('n', &self.nbr), ('a', &self.adj)] {
            for (&(a, b), h) in fam {
                let mut es: Vec<(NodeId, u64)> = h.iter().map(|(k, p)| (k, p.0.to_bits())).collect();
                es.sort_unstable();
                out.insert((tag, a, b), es);
            }
        }
        out
    }

    /// Rebuild every heap from the current graph and bunches and compare.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let n = self.g.n();
        for v in 0..n {
            let b: BTreeMap<NodeId, Rounded> =
                self.bunches.bunch(v).iter().map(|(&w, m)| (w, m.rounded)).collect();
            if b != self.mirror[v] {
                return Err(format!("applied bunch of {v} is stale"));
            }
        }
        let mut nbr: HashMap<Pair, BTreeMap<NodeId, f64>> = HashMap::new();
        for v in 0..n {
            for (&y, &r) in &self.mirror[v] {
                for (x, w) in self.g.neighbors(y) {
                    let k = self.val(self.rounder.round(w)) + self.val(r);
                    nbr.entry((x, v)).or_default().insert(y, k);
                }
            }
        }
        if nbr.len() != self.nbr.len() {
            return Err(format!("{} neighbor heaps, expected {}", self.nbr.len(), nbr.len()));
        }
        let mut mins: HashMap<Pair, Rounded> = HashMap::new();
        for (key, want) in &nbr {
            let have: BTreeMap<NodeId, f64> = self.nbr_entries(key.0, key.1).into_iter().collect();
            if &have != want {
                return Err(format!("Q^nbr{key:?} differs"));
            }
            let m = want.values().copied().fold(f64::INFINITY, f64::min);
            mins.insert(*key, self.rounder.round_f64(m));
        }
        if mins != self.nbr_min {
            return Err("rounded neighbor minima differ".into());
        }
        let mut adj: HashMap<Pair, BTreeMap<NodeId, f64>> = HashMap::new();
        for (&(x, v), &nb) in &mins {
            for u in 0..n {
                if let Some(&b) = self.mirror[u].get(&x) {
                    adj.entry((u, v)).or_default().insert(x, self.val(b) + self.val(nb));
                }
            }
        }
        if adj.len() != self.adj.len() {
            return Err(format!("{} adjacent heaps, expected {}", self.adj.len(), adj.len()));
        }
        for (key, want) in &adj {
            let have: BTreeMap<NodeId, f64> = self.adj_entries(key.0, key.1).into_iter().collect();
            if &have != want {
                return Err(format!("Q^adj{key:?} differs"));
            }
        }
        Ok(())
    }

    pub fn counter_map(&self) -> Counters {
        let mut c = Counters::new();
        c.insert("heap_touches".into(), self.stats.heap_touches);
        c.insert("edge_rounding_changes".into(), self.stats.edge_changes);
        c.insert("bunch_events".into(), self.stats.bunch_events);
        c.insert("bunch_rebuilds".into(), self.bunches.total_rebuilds());
        c.insert("max_bunch_rebuilds".into(), self.bunches.max_rebuilds());
        c.insert("bunch_load".into(), self.bunches.total_load());
        c.insert("pivot_level_increases".into(), self.bunches.level_increases());
        c.insert("max_nbr_min_changes".into(), self.max_nbr_changes());
        c.insert("pivots".into(), self.bunches.sources().len() as u64);
        c
    }
}

pub(crate) fn pivot_route(b: &BunchEngine, u: NodeId, v: NodeId) -> Dist {
    let via = |a: NodeId, z: NodeId| match b.pivot(a) {
        Some(s) => sat_add(b.pivot_estimate(a), b.source_dist(s, z)),
        None => INF,
    };
    via(u, v).min(via(v, u))
}

fn sorted_entries(h: Option<&IndexedHeap<NodeId, Key>>) -> Vec<(NodeId, f64)> {
    let mut es: Vec<(NodeId, f64)> = h.map(|h| h.iter().map(|(k, p)| (k, p.0)).collect()).unwrap_or_default();
    es.sort_by_key(|e| e.0);
    es
}

impl DecrementalApsp for DynApspMult {
    fn name(&self) -> &'static str {
        "mult"
    }

    fn node_count(&self) -> usize {
        self.g.n()
    }

    fn apply(&mut self, e: &UpdateEvent) -> Result<()> {
        self.update(e)
    }

    fn query(&self, u: NodeId, v: NodeId) -> Dist {
        DynApspMult::query(self, u, v)
    }

    fn counters(&self) -> Counters {
        self.counter_map()
    }
}

pub(crate) fn check_eps(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::Domain(format!("accuracy {eps} not in (0,1)")));
    }
    Ok(())
}
