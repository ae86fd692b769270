//! Additive `+2(k − 1)` decremental APSP on unweighted graphs, for pairs within
//! a fixed depth `d`.
//!
//! Nodes are split into a hierarchy `D_1, …, D_k`. Every node roots one
//! monotone ES-tree of depth `d + 3k`. Roots in `D_1` search the whole graph.
//! A root `u ∈ D_i` with `i ≥ 2` searches the sparser graph
//! `H_u^i = E_i ∪ E* ∪ E_u^i`:
//!
//! * `i_v` is the smallest level among `v`'s neighbors;
//!   `E_i` holds the edges `{x, y}` with `max(i_x, i_y) ≥ i`;
//! * `E*` holds, for every `v`, one edge to a neighbor in `D_{i_v}`;
//! * `E_u^i` joins `u` to every `v` on a lower level, with weight `ℓ_v(u)`.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algo::{Counters, DecrementalApsp};
use crate::error::{Error, Result};
use crate::es_tree::MonotoneEsTree;
use crate::graph::{Dist, DynamicGraph, NodeId, UpdateEvent, UpdateKind, INF};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdditiveConfig {
    pub k: usize,
    pub depth: Dist,
    /// Sampling constant; at least 2.
    pub c: f64,
    pub seed: u64,
}

impl AdditiveConfig {
    pub fn new(k: usize, depth: Dist) -> Self {
        AdditiveConfig { k, depth, c: 2.0, seed: 0 }
    }
}

/// `s_i = (m/n)^{1 − i/k} · (ln n)^{i/k}`.
pub fn level_size(n: usize, m: usize, k: usize, i: usize) -> f64 {
    let n = n.max(2) as f64;
    let t = i as f64 / k as f64;
    (m.max(1) as f64 / n).powf(1.0 - t) * n.ln().powf(t)
}

/// Assigns each node the first level `i < k` whose coin lands, else `k`.
pub fn sample_hierarchy(n: usize, m: usize, k: usize, c: f64, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ln = (n.max(2) as f64).ln();
    let probs: Vec<f64> = (1..k)
        .map(|i| (c * ln / level_size(n, m, k, i)).min(1.0))
        .collect();
    (0..n)
        .map(|_| {
            for (j, &p) in probs.iter().enumerate() {
                if rng.gen::<f64>() < p {
                    return j + 1;
                }
            }
            k
        })
        .collect()
}

/// Upper bound on the edges ever placed in `E_i`, `i ≥ 2`: `4·n·s_{i−1}`.
pub fn e_level_bound(n: usize, m: usize, k: usize, i: usize) -> f64 {
    4.0 * n as f64 * level_size(n, m, k, i - 1)
}

/// Upper bound on the edges ever placed in `E*`.
pub fn e_star_bound(n: usize, m: usize, k: usize) -> f64 {
    let (nf, mf, kf) = (n.max(2) as f64, m.max(1) as f64, k as f64);
    4.0 * kf * nf.powf(1.0 - 1.0 / kf) * mf.powf(1.0 / kf) * nf.ln().powf(1.0 - 1.0 / kf)
}

#[derive(Debug, Clone)]
pub struct AdditiveApsp {
    g: DynamicGraph,
    k: usize,
    depth: Dist,
    index: Vec<usize>,
    /// `i_v`; `k + 1` when `v` is isolated.
    nbr_index: Vec<usize>,
    star: Vec<Option<NodeId>>,
    trees: Vec<MonotoneEsTree>,
    /// Roots ordered by `(index, id)`.
    order: Vec<NodeId>,
    /// `e_load[i]`: edges ever placed in `E_i`.
    e_load: Vec<u64>,
    star_load: u64,
    exports: u64,
}

/// Edge being deleted and, per level, whether it sat in `H` beforehand.
struct Pending {
    a: NodeId,
    b: NodeId,
    present: Vec<bool>,
}

impl AdditiveApsp {
    pub fn new(g: DynamicGraph, cfg: AdditiveConfig) -> Result<Self> {
        if !(cfg.c >= 2.0) {
            return Err(Error::Config(format!("sampling constant {} below 2", cfg.c)));
        }
        Self::check_params(&g, cfg.k, cfg.depth)?;
        let index = sample_hierarchy(g.n(), g.m(), cfg.k, cfg.c, cfg.seed);
        Self::with_hierarchy(g, cfg.k, cfg.depth, index)
    }

    fn check_params(g: &DynamicGraph, k: usize, depth: Dist) -> Result<()> {
        let log_n = (g.n().max(2) as f64).log2().ceil() as usize;
        if k < 2 || k > log_n.max(2) {
            return Err(Error::Config(format!("k = {k} outside [2, {}]", log_n.max(2))));
        }
        if depth == 0 {
            return Err(Error::Config("depth must be positive".into()));
        }
        if !g.is_unweighted() {
            return Err(Error::Config("additive structure needs an unweighted graph".into()));
        }
        Ok(())
    }

    /// Uses the given level (`1..=k`) for every node instead of sampling.
    pub fn with_hierarchy(g: DynamicGraph, k: usize, depth: Dist, index: Vec<usize>) -> Result<Self> {
        Self::check_params(&g, k, depth)?;
        let n = g.n();
        if index.len() != n {
            return Err(Error::Config(format!("hierarchy has {} entries for {n} nodes", index.len())));
        }
        if let Some(&bad) = index.iter().find(|&&i| i == 0 || i > k) {
            return Err(Error::Config(format!("level {bad} outside [1, {k}]")));
        }
        let mut order: Vec<NodeId> = (0..n).collect();
        order.sort_by_key(|&v| (index[v], v));
        let mut s = AdditiveApsp {
            g,
            k,
            depth,
            index,
            nbr_index: vec![k + 1; n],
            star: vec![None; n],
            trees: Vec::with_capacity(n),
            order,
            e_load: vec![0; k + 1],
            star_load: 0,
            exports: 0,
        };
        for v in 0..n {
            s.rescan(v);
            if s.star[v].is_some() {
                s.star_load += 1;
            }
        }
        for (x, y, _) in s.g.edges() {
            let top = s.nbr_index[x].max(s.nbr_index[y]).min(k);
            s.e_load[1] += 1;
            for i in 2..=top {
                s.e_load[i] += 1;
            }
        }
        // Placeholder trees, replaced level by level so that `E_u^i` can read
        // the finished lower levels.
        s.trees = (0..n)
            .map(|r| MonotoneEsTree::new(n, std::iter::empty(), r, 0))
            .collect::<Result<_>>()?;
        let cap = s.cap();
        for idx in 0..n {
            let r = s.order[idx];
            let i = s.index[r];
            let edges: Vec<(NodeId, NodeId, Dist)> = if i == 1 {
                s.g.edges()
            } else {
                s.h_edges(r, i)
            };
            s.trees[r] = MonotoneEsTree::new(n, edges, r, cap)?;
        }
        Ok(s)
    }

    pub fn cap(&self) -> Dist {
        self.depth + 3 * self.k as Dist
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn depth(&self) -> Dist {
        self.depth
    }

    pub fn graph(&self) -> &DynamicGraph {
        &self.g
    }

    pub fn index(&self, v: NodeId) -> usize {
        self.index[v]
    }

    pub fn nbr_index(&self, v: NodeId) -> usize {
        self.nbr_index[v]
    }

    pub fn star(&self, v: NodeId) -> Option<NodeId> {
        self.star[v]
    }

    pub fn tree(&self, r: NodeId) -> &MonotoneEsTree {
        &self.trees[r]
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        let mut c = vec![0; self.k + 1];
        for &i in &self.index {
            c[i] += 1;
        }
        c
    }

    pub fn e_level_load(&self, i: usize) -> u64 {
        self.e_load[i]
    }

    pub fn e_star_load(&self) -> u64 {
        self.star_load
    }

    /// Recomputes `i_v` and picks the first neighbor in `D_{i_v}`.
    fn rescan(&mut self, v: NodeId) {
        let iv = self.g.neighbors(v).map(|(x, _)| self.index[x]).min().unwrap_or(self.k + 1);
        self.nbr_index[v] = iv;
        self.star[v] = self.g.neighbors(v).map(|(x, _)| x).find(|&x| self.index[x] == iv);
    }

    fn in_star(&self, x: NodeId, y: NodeId) -> bool {
        self.star[x] == Some(y) || self.star[y] == Some(x)
    }

    fn in_h(&self, x: NodeId, y: NodeId, i: usize) -> bool {
        i <= self.nbr_index[x].max(self.nbr_index[y]) || self.in_star(x, y)
    }

    /// Weight of `{x, y}` in `H_r^i`, `INF` if absent.
    fn effective(&self, r: NodeId, i: usize, x: NodeId, y: NodeId, pending: Option<&Pending>) -> Dist {
        let is_pending = pending.is_some_and(|p| (p.a, p.b) == (x.min(y), x.max(y)));
        let graph_part = if is_pending {
            pending.is_some_and(|p| p.present[i])
        } else {
            self.g.weight(x, y).is_some() && self.in_h(x, y, i)
        };
        let mut w = if graph_part { 1 } else { INF };
        let other = if x == r { Some(y) } else if y == r { Some(x) } else { None };
        if let Some(o) = other {
            if self.index[o] < i {
                w = w.min(self.trees[o].level(r));
            }
        }
        w
    }

    fn h_edges(&self, r: NodeId, i: usize) -> Vec<(NodeId, NodeId, Dist)> {
        let mut out = Vec::new();
        for (x, y, _) in self.g.edges() {
            if self.in_h(x, y, i) {
                out.push((x, y, self.effective(r, i, x, y, None)));
            }
        }
        for o in 0..self.g.n() {
            if o != r && self.index[o] < i && !(self.g.weight(r, o).is_some() && self.in_h(r, o, i)) {
                let w = self.trees[o].level(r);
                if w != INF {
                    out.push((r, o, w));
                }
            }
        }
        out
    }

    pub fn delete(&mut self, u: NodeId, v: NodeId) -> Result<()> {
        self.g.apply_update(&UpdateEvent::delete(u, v))?;
        let (a, b) = (u.min(v), u.max(v));
        let k = self.k;
        let mut present = vec![false; k + 1];
        for (i, p) in present.iter_mut().enumerate().skip(1) {
            *p = i <= self.nbr_index[a].max(self.nbr_index[b]) || self.in_star(a, b);
        }
        let pending = Pending { a, b, present };

        // New E* and E_i edges, per level.
        let mut added: Vec<BTreeSet<(NodeId, NodeId)>> = vec![BTreeSet::new(); k + 1];
        for (x, y) in [(a, b), (b, a)] {
            if self.star[x] != Some(y) {
                continue;
            }
            let old = self.nbr_index[x];
            let next = self
                .g
                .neighbors_after(x, y)
                .map(|(z, _)| z)
                .find(|&z| self.index[z] == old);
            match next {
                Some(z) => self.star[x] = Some(z),
                None => self.rescan(x),
            }
            if let Some(z) = self.star[x] {
                self.star_load += 1;
                for set in added.iter_mut().skip(2) {
                    set.insert((x.min(z), x.max(z)));
                }
            }
            let new = self.nbr_index[x];
            if new > old {
                let nbrs: Vec<NodeId> = self.g.neighbors(x).map(|(z, _)| z).collect();
                for z in nbrs {
                    let before = old.max(self.nbr_index[z]);
                    let after = new.max(self.nbr_index[z]).min(k);
                    for (i, set) in added.iter_mut().enumerate().take(after + 1).skip(before + 1) {
                        self.e_load[i] += 1;
                        set.insert((x.min(z), x.max(z)));
                    }
                }
            }
        }

        let n = self.g.n();
        let mut inbox: Vec<BTreeSet<NodeId>> = vec![BTreeSet::new(); n];
        for idx in 0..n {
            let r = self.order[idx];
            let i = self.index[r];
            let changed = if i == 1 {
                if self.trees[r].weight(a, b).is_some() {
                    self.trees[r].delete_edge(a, b)?
                } else {
                    Vec::new()
                }
            } else {
                let mut changed = Vec::new();
                for &(x, y) in &added[i] {
                    let w = self.effective(r, i, x, y, Some(&pending));
                    changed.extend(self.trees[r].set_weight(x, y, w)?);
                }
                for o in std::mem::take(&mut inbox[r]) {
                    let w = self.effective(r, i, r, o, Some(&pending));
                    changed.extend(self.trees[r].set_weight(r, o, w)?);
                }
                let w = self.effective(r, i, a, b, None);
                changed.extend(self.trees[r].set_weight(a, b, w)?);
                changed
            };
            for x in changed {
                if self.index[x] > i {
                    self.exports += 1;
                    inbox[x].insert(r);
                }
            }
        }
        Ok(())
    }

    /// `ℓ_u(v)` when `u` sits on a strictly lower level than `v`, else `ℓ_v(u)`.
    pub fn query(&self, u: NodeId, v: NodeId) -> Dist {
        if u == v {
            0
        } else if self.index[u] < self.index[v] {
            self.trees[u].level(v)
        } else {
            self.trees[v].level(u)
        }
    }

    /// For every root `u ∈ D_i`, `i ≥ 2`, and node `v` with a finite level:
    /// either some `H`-edge joins `v` to a node on a level below `i`, or all
    /// graph edges at `v` are in `H_u^i`.
    pub fn check_claim(&self) -> std::result::Result<(), String> {
        for u in 0..self.g.n() {
            let i = self.index[u];
            if i == 1 {
                continue;
            }
            let t = &self.trees[u];
            for v in 0..self.g.n() {
                let low = t.neighbors(v).any(|(w, _)| self.index[w] < i);
                let all = self.g.neighbors(v).all(|(w, _)| t.weight(v, w).is_some());
                if !low && !all {
                    return Err(format!("root {u} (level {i}): node {v} has neither"));
                }
            }
        }
        Ok(())
    }

    pub fn counter_map(&self) -> Counters {
        let mut c = Counters::new();
        for i in 1..=self.k {
            c.insert(format!("e_level_{i}_load"), self.e_load[i]);
        }
        for (i, &s) in self.level_sizes().iter().enumerate().skip(1) {
            c.insert(format!("level_{i}_nodes"), s as u64);
        }
        c.insert("e_star_load".into(), self.star_load);
        c.insert("exports".into(), self.exports);
        c.insert(
            "level_increases".into(),
            self.trees.iter().map(|t| t.level_increases()).sum(),
        );
        c
    }
}

impl DecrementalApsp for AdditiveApsp {
    fn name(&self) -> &'static str {
        "additive"
    }

    fn node_count(&self) -> usize {
        self.g.n()
    }

    fn apply(&mut self, e: &UpdateEvent) -> Result<()> {
        match e.kind {
            UpdateKind::Delete => self.delete(e.u, e.v),
            UpdateKind::Increase(_) => Err(Error::Unsupported("weight increases on an unweighted graph".into())),
        }
    }

    fn query(&self, u: NodeId, v: NodeId) -> Dist {
        AdditiveApsp::query(self, u, v)
    }

    fn counters(&self) -> Counters {
        self.counter_map()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{sweep, BoundSpec, Density};
    use crate::workload::{deletion_stream, erdos_renyi};

    fn random_levels(n: usize, k: usize, seed: u64) -> Vec<usize> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                for i in 1..k {
                    if rng.gen::<f64>() < 0.15 * i as f64 {
                        return i;
                    }
                }
                k
            })
            .collect()
    }

    #[test]
    fn path_exact_with_single_level() {
        let g = DynamicGraph::from_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        let mut a = AdditiveApsp::with_hierarchy(g, 2, 5, vec![1; 4]).unwrap();
        assert_eq!(a.query(0, 3), 3);
        a.delete(1, 2).unwrap();
        assert_eq!(a.query(0, 3), INF);
        assert_eq!(a.query(2, 2), 0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let g = DynamicGraph::from_edges(4, &[(0, 1, 1)]).unwrap();
        assert!(AdditiveApsp::new(g.clone(), AdditiveConfig { c: 1.0, ..AdditiveConfig::new(2, 3) }).is_err());
        assert!(AdditiveApsp::new(g.clone(), AdditiveConfig::new(1, 3)).is_err());
        assert!(AdditiveApsp::with_hierarchy(g.clone(), 2, 3, vec![3; 4]).is_err());
        let w = DynamicGraph::from_edges(2, &[(0, 1, 2)]).unwrap();
        assert!(AdditiveApsp::new(w, AdditiveConfig::new(2, 3)).is_err());
    }

    #[test]
    fn star_edges_point_to_lowest_level() {
        let g = erdos_renyi(40, 0.2, 1, 3).unwrap();
        let a = AdditiveApsp::with_hierarchy(g.clone(), 3, 6, random_levels(40, 3, 9)).unwrap();
        for v in 0..40 {
            if let Some(s) = a.star(v) {
                assert_eq!(a.index(s), a.nbr_index(v));
                assert!(g.neighbors(v).all(|(x, _)| a.index(x) >= a.nbr_index(v)));
            }
        }
    }

    #[test]
    fn random_hierarchies_hold_bound_and_claim() {
        for seed in 0..4 {
            let k = 2 + (seed as usize % 2);
            let g = erdos_renyi(36, 0.15, 1, seed).unwrap();
            let items = deletion_stream(&g, 0.6, 0, seed).unwrap();
            let mut a = AdditiveApsp::with_hierarchy(g.clone(), k, 6, random_levels(36, k, seed)).unwrap();
            let report = sweep(&mut a, &g, &items, BoundSpec::Additive { k, depth: 6 }, Density::EveryUpdate).unwrap();
            assert!(report.pass, "seed {seed}: {:?}", report.violations);
            a.check_claim().unwrap();
        }
    }

    #[test]
    fn sampled_hierarchy_respects_bounds() {
        let g = erdos_renyi(48, 0.2, 1, 5).unwrap();
        let (n, m) = (g.n(), g.m());
        let a = AdditiveApsp::new(g, AdditiveConfig { seed: 1, ..AdditiveConfig::new(2, 4) }).unwrap();
        assert!((a.e_star_load() as f64) <= e_star_bound(n, m, 2));
        assert!((a.e_level_load(2) as f64) <= e_level_bound(n, m, 2, 2));
    }
}
