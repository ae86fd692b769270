//! Pivots, bunches and clusters under decremental updates.
//!
//! A sampled set `A` gets one exact ES-tree per source. The pivot estimate
//! `δ̄(v)` is the distance from `v` to its closest source. The current search
//! ball `B̃(v) = {w : d(v, w) < δ̄(v)}` is found with a truncated Dijkstra run
//! from `v`. The maintained bunch `B(v)` is rebuilt from the ball only when
//! `δ̄(v)` has outgrown the radius `r(v)` by a factor `1 + ε3`. Otherwise it
//! just loses the members that fell out of the ball.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::es_tree::EsTree;
use crate::graph::{sat_add, ChangeRecord, Dist, DynamicGraph, NodeId, INF};
use crate::rounding::{Rounded, Rounder};

/// Membership of `A`, drawn i.i.d. with probability `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct PivotSample {
    pub p: f64,
    pub in_a: Vec<bool>,
}

impl PivotSample {
    pub fn members(&self) -> Vec<NodeId> {
        (0..self.in_a.len()).filter(|&v| self.in_a[v]).collect()
    }

    pub fn explicit(n: usize, p: f64, members: &[NodeId]) -> Self {
        let mut in_a = vec![false; n];
        for &v in members {
            in_a[v] = true;
        }
        PivotSample { p, in_a }
    }
}

pub fn sample_pivots(n: usize, p: f64, seed: u64) -> Result<PivotSample> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::Domain(format!("sampling probability {p} not in (0,1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let in_a = (0..n).map(|_| rng.gen_bool(p)).collect();
    Ok(PivotSample { p, in_a })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ChangeKind {
    Leave,
    DistanceIncrease,
    Join,
}

/// `member` left, joined, or got a larger rounded estimate in `B(owner)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BunchChangeEvent {
    pub owner: NodeId,
    pub member: NodeId,
    pub kind: ChangeKind,
    /// New `δ̃_B(owner, member)`; `None` after a leave.
    pub value: Option<Rounded>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Member {
    pub dist: Dist,
    pub rounded: Rounded,
}

#[derive(Debug, Clone)]
pub struct BunchEngine {
    n: usize,
    p: f64,
    eps3: f64,
    rounder: Rounder,
    in_a: Vec<bool>,
    sources: Vec<NodeId>,
    trees: Vec<EsTree>,
    pivot: Vec<Option<NodeId>>,
    pivot_est: Vec<Dist>,
    radius: Vec<Dist>,
    ball: Vec<BTreeMap<NodeId, Dist>>,
    ball_rev: Vec<BTreeSet<NodeId>>,
    bunch: Vec<BTreeMap<NodeId, Member>>,
    cluster: Vec<BTreeSet<NodeId>>,
    rebuilds: Vec<u64>,
    ever: Vec<HashSet<NodeId>>,
    size_cap: Option<usize>,
    balls_recomputed: u64,
}

impl BunchEngine {
    /// `eps` is the overall accuracy; radius and rounding use `eps / 3` each.
    pub fn new(g: &DynamicGraph, p: f64, eps: f64, seed: u64) -> Result<Self> {
        let sample = sample_pivots(g.n(), p, seed)?;
        Self::with_sample(g, sample, eps)
    }

    pub fn with_sample(g: &DynamicGraph, sample: PivotSample, eps: f64) -> Result<Self> {
        let n = g.n();
        if sample.in_a.len() != n {
            return Err(Error::Config("pivot sample size does not match graph".into()));
        }
        let rounder = Rounder::new(eps / 3.0)?;
        let cap = (n as Dist).max(1).saturating_mul(g.weight_bound());
        let sources = sample.members();
        let trees = sources
            .iter()
            .map(|&s| EsTree::from_graph(g, s, cap))
            .collect::<Result<Vec<_>>>()?;
        let size_cap = if sources.is_empty() && n > 0 {
            let k = (4.0 * (n.max(2) as f64).ln() / sample.p).ceil() as usize;
            log::warn!("empty pivot set: bunches fall back to the {k} closest nodes");
            Some(k.max(1))
        } else {
            None
        };
        let mut e = BunchEngine {
            n,
            p: sample.p,
            eps3: eps / 3.0,
            rounder,
            in_a: sample.in_a,
            sources,
            trees,
            pivot: vec![None; n],
            pivot_est: vec![INF; n],
            radius: vec![INF; n],
            ball: vec![BTreeMap::new(); n],
            ball_rev: vec![BTreeSet::new(); n],
            bunch: vec![BTreeMap::new(); n],
            cluster: vec![BTreeSet::new(); n],
            rebuilds: vec![0; n],
            ever: vec![HashSet::new(); n],
            size_cap,
            balls_recomputed: 0,
        };
        for v in 0..n {
            e.refresh_pivot(v);
            e.radius[v] = e.pivot_est[v];
            e.recompute_ball(g, v);
            let fresh = e.ball_members(v);
            e.install_bunch(v, fresh);
        }
        Ok(e)
    }

    fn refresh_pivot(&mut self, v: NodeId) -> bool {
        let mut best = (INF, None);
        for (i, t) in self.trees.iter().enumerate() {
            let d = t.level(v);
            if d < best.0 {
                best = (d, Some(self.sources[i]));
            }
        }
        let changed = best.0 != self.pivot_est[v];
        self.pivot_est[v] = best.0;
        self.pivot[v] = best.1;
        changed
    }

    fn recompute_ball(&mut self, g: &DynamicGraph, v: NodeId) {
        self.balls_recomputed += 1;
        let fresh = truncated_ball(g, v, self.pivot_est[v], self.size_cap);
        for w in self.ball[v].keys() {
            self.ball_rev[*w].remove(&v);
        }
        for w in fresh.keys() {
            self.ball_rev[*w].insert(v);
        }
        self.ball[v] = fresh;
    }

    fn ball_members(&self, v: NodeId) -> BTreeMap<NodeId, Member> {
        self.ball[v]
            .iter()
            .map(|(&w, &d)| (w, Member { dist: d, rounded: self.rounder.round(d) }))
            .collect()
    }

    fn install_bunch(&mut self, v: NodeId, members: BTreeMap<NodeId, Member>) {
        for w in self.bunch[v].keys() {
            self.cluster[*w].remove(&v);
        }
        for w in members.keys() {
            self.cluster[*w].insert(v);
            self.ever[v].insert(*w);
        }
        self.bunch[v] = members;
    }

    fn needs_rebuild(&self, v: NodeId) -> bool {
        let (d, r) = (self.pivot_est[v], self.radius[v]);
        if r == INF {
            return false;
        }
        d == INF || d as f64 > (1.0 + self.eps3) * r as f64
    }

    /// Bring everything in line with `g`, which already reflects `change`.
    pub fn refresh(&mut self, g: &DynamicGraph, change: &ChangeRecord) -> Vec<BunchChangeEvent> {
        let mut touched: BTreeSet<NodeId> = BTreeSet::new();
        let mut level_moved: BTreeSet<NodeId> = BTreeSet::new();
        for t in &mut self.trees {
            let moved = if change.is_delete() {
                t.delete_edge(change.u, change.v)
            } else {
                t.increase_weight(change.u, change.v, change.new)
            }
            .expect("pivot trees mirror the graph");
            level_moved.extend(moved);
        }
        for v in level_moved {
            if self.refresh_pivot(v) {
                touched.insert(v);
            }
        }
        touched.extend(self.ball_rev[change.u].iter().copied());
        touched.extend(self.ball_rev[change.v].iter().copied());

        let mut events = Vec::new();
        for v in touched {
            self.recompute_ball(g, v);
            let fresh = self.ball_members(v);
            let next = if self.needs_rebuild(v) {
                self.radius[v] = self.pivot_est[v];
                self.rebuilds[v] += 1;
                fresh
            } else {
                self.bunch[v]
                    .keys()
                    .filter_map(|w| fresh.get(w).map(|m| (*w, *m)))
                    .collect()
            };
            diff_bunch(v, &self.bunch[v], &next, &mut events);
            self.install_bunch(v, next);
        }
        events
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn rounder(&self) -> &Rounder {
        &self.rounder
    }

    pub fn in_a(&self, v: NodeId) -> bool {
        self.in_a[v]
    }

    pub fn sources(&self) -> &[NodeId] {
        &self.sources
    }

    /// `δ_A(s, v)` for a source `s ∈ A`.
    pub fn source_dist(&self, s: NodeId, v: NodeId) -> Dist {
        match self.sources.binary_search(&s) {
            Ok(i) => self.trees[i].level(v),
            Err(_) => INF,
        }
    }

    pub fn pivot(&self, v: NodeId) -> Option<NodeId> {
        self.pivot[v]
    }

    pub fn pivot_estimate(&self, v: NodeId) -> Dist {
        self.pivot_est[v]
    }

    pub fn radius(&self, v: NodeId) -> Dist {
        self.radius[v]
    }

    pub fn bunch(&self, v: NodeId) -> &BTreeMap<NodeId, Member> {
        &self.bunch[v]
    }

    pub fn member(&self, v: NodeId, w: NodeId) -> Option<Member> {
        self.bunch[v].get(&w).copied()
    }

    pub fn cluster(&self, u: NodeId) -> &BTreeSet<NodeId> {
        &self.cluster[u]
    }

    pub fn rebuilds(&self, v: NodeId) -> u64 {
        self.rebuilds[v]
    }

    pub fn max_rebuilds(&self) -> u64 {
        self.rebuilds.iter().copied().max().unwrap_or(0)
    }

    pub fn total_rebuilds(&self) -> u64 {
        self.rebuilds.iter().sum()
    }

    /// `Σ_v |⋃_t B(v)|` over the run so far.
    pub fn total_load(&self) -> u64 {
        self.ever.iter().map(|s| s.len() as u64).sum()
    }

    pub fn balls_recomputed(&self) -> u64 {
        self.balls_recomputed
    }

    pub fn level_increases(&self) -> u64 {
        self.trees.iter().map(|t| t.level_increases()).sum()
    }

    /// Bound on rebuilds per node: `⌈log_{1+ε3}(nW)⌉ + 1`.
    pub fn rebuild_bound(&self, w: Dist) -> u64 {
        self.rounder.levels(self.n as f64 * w as f64) + 1
    }
}

fn diff_bunch(
    owner: NodeId,
    old: &BTreeMap<NodeId, Member>,
    new: &BTreeMap<NodeId, Member>,
    out: &mut Vec<BunchChangeEvent>,
) {
    for (&w, m) in old {
        match new.get(&w) {
            None => out.push(BunchChangeEvent { owner, member: w, kind: ChangeKind::Leave, value: None }),
            Some(n) if n.rounded != m.rounded => out.push(BunchChangeEvent {
                owner,
                member: w,
                kind: ChangeKind::DistanceIncrease,
                value: Some(n.rounded),
            }),
            _ => {}
        }
    }
    for (&w, m) in new {
        if !old.contains_key(&w) {
            out.push(BunchChangeEvent { owner, member: w, kind: ChangeKind::Join, value: Some(m.rounded) });
        }
    }
}

/// Nodes at distance strictly below `radius` from `v`, settled in `(dist, id)`
/// order and cut after `cap` nodes if given.
pub fn truncated_ball(
    g: &DynamicGraph,
    v: NodeId,
    radius: Dist,
    cap: Option<usize>,
) -> BTreeMap<NodeId, Dist> {
    let mut out = BTreeMap::new();
    if radius == 0 {
        return out;
    }
    let mut best: BTreeMap<NodeId, Dist> = BTreeMap::new();
    let mut pq = BinaryHeap::new();
    best.insert(v, 0);
    pq.push(Reverse((0, v)));
    while let Some(Reverse((d, u))) = pq.pop() {
        if out.contains_key(&u) || best.get(&u).is_some_and(|&b| b < d) {
            continue;
        }
        out.insert(u, d);
        if cap.is_some_and(|c| out.len() >= c) {
            break;
        }
        for (x, w) in g.neighbors(u) {
            let nd = sat_add(d, w);
            if nd < radius && best.get(&x).is_none_or(|&b| nd < b) {
                best.insert(x, nd);
                pq.push(Reverse((nd, x)));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::UpdateEvent;

    fn star() -> DynamicGraph {
        DynamicGraph::from_edges(4, &[(0, 1, 1), (0, 2, 1), (0, 3, 1)]).unwrap()
    }

    #[test]
    fn all_sampled_means_empty_bunches() {
        let g = star();
        let e = BunchEngine::new(&g, 1.0, 0.9, 1).unwrap();
        for v in 0..4 {
            assert_eq!(e.pivot(v), Some(v));
            assert_eq!(e.pivot_estimate(v), 0);
            assert!(e.bunch(v).is_empty());
        }
    }

    #[test]
    fn rejects_bad_probability() {
        assert!(sample_pivots(5, 0.0, 1).is_err());
        assert!(sample_pivots(5, 1.5, 1).is_err());
    }

    #[test]
    fn sample_size_concentrates() {
        let ok = (0..200)
            .filter(|&s| {
                let k = sample_pivots(64, 0.5, s).unwrap().members().len();
                (16..=48).contains(&k)
            })
            .count();
        assert!(ok >= 198);
    }

    #[test]
    fn leaf_cut_from_center_rebuilds() {
        let mut g = star();
        let e0 = PivotSample::explicit(4, 0.25, &[0]);
        let mut e = BunchEngine::with_sample(&g, e0, 0.9).unwrap();
        assert_eq!(e.radius(1), 1);
        assert_eq!(e.bunch(1).keys().copied().collect::<Vec<_>>(), vec![1]);
        let rec = g.apply_update(&UpdateEvent::delete(0, 1)).unwrap();
        let ev = e.refresh(&g, &rec);
        assert_eq!(e.radius(1), INF);
        assert_eq!(e.rebuilds(1), 1);
        assert_eq!(e.pivot(1), None);
        // node 1 is now alone: its bunch is itself, so no membership change
        assert!(ev.iter().all(|x| x.owner == 1));
        assert!(e.cluster(1).contains(&1));
    }

    #[test]
    fn unrelated_deletion_is_silent() {
        // two triangles joined by a bridge, both pivots on the left
        let mut g = DynamicGraph::from_edges(
            6,
            &[(0, 1, 1), (1, 2, 1), (0, 2, 1), (2, 3, 1), (3, 4, 1), (4, 5, 1), (3, 5, 1)],
        )
        .unwrap();
        let s = PivotSample::explicit(6, 0.3, &[0, 5]);
        let mut e = BunchEngine::with_sample(&g, s, 0.9).unwrap();
        let before: Vec<_> = (0..6).map(|v| e.bunch(v).clone()).collect();
        let rec = g.apply_update(&UpdateEvent::delete(0, 1)).unwrap();
        let ev = e.refresh(&g, &rec);
        // node 1 moves away from pivot 0, so it is the only owner allowed to change
        assert!(ev.iter().all(|x| x.owner == 1 || x.owner == 2));
        assert_eq!(e.bunch(4), &before[4]);
    }

    #[test]
    fn empty_pivot_set_caps_bunches() {
        let g = DynamicGraph::from_edges(10, &(0..9).map(|i| (i, i + 1, 1)).collect::<Vec<_>>()).unwrap();
        let s = PivotSample::explicit(10, 0.9, &[]);
        let e = BunchEngine::with_sample(&g, s, 0.9).unwrap();
        let cap = (4.0 * 10f64.ln() / 0.9).ceil() as usize;
        for v in 0..10 {
            assert_eq!(e.pivot_estimate(v), INF);
            assert!(e.bunch(v).len() <= cap);
        }
    }

    #[test]
    fn isolating_a_node_drops_its_members() {
        let mut g = DynamicGraph::from_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let s = PivotSample::explicit(4, 0.3, &[3]);
        let mut e = BunchEngine::with_sample(&g, s, 0.9).unwrap();
        assert_eq!(e.bunch(0).len(), 3);
        let rec = g.apply_update(&UpdateEvent::delete(0, 1)).unwrap();
        let ev = e.refresh(&g, &rec);
        let leaves: Vec<_> = ev
            .iter()
            .filter(|x| x.owner == 0 && x.kind == ChangeKind::Leave)
            .map(|x| x.member)
            .collect();
        assert_eq!(leaves, vec![1, 2]);
        assert_eq!(e.pivot_estimate(0), INF);
    }
}
