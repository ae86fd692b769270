//! Exact baselines and the stretch sweeper.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::algo::{Counters, DecrementalApsp};
use crate::bunch::sample_pivots;
use crate::error::{Error, Result};
use crate::graph::{sat_add, Dist, DynamicGraph, NodeId, StreamItem, UpdateEvent, INF};

pub const DEFAULT_CAP: usize = 512;
pub const CAP_ENV: &str = "DAPSP_ORACLE_CAP";
pub const REPORT_VERSION: u32 = 1;

pub type Matrix = Vec<Vec<Dist>>;

pub fn oracle_cap() -> usize {
    std::env::var(CAP_ENV)
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_CAP)
}

fn check_cap(g: &DynamicGraph) -> Result<()> {
    let cap = oracle_cap();
    if g.n() > cap {
        return Err(Error::CapExceeded { n: g.n(), cap });
    }
    Ok(())
}

/// Single-source distances; BFS when every weight is 1.
pub fn sssp(g: &DynamicGraph, s: NodeId) -> Vec<Dist> {
    let mut dist = vec![INF; g.n()];
    dist[s] = 0;
    if g.is_unweighted() {
        let mut q = VecDeque::from([s]);
        while let Some(u) = q.pop_front() {
            for (v, _) in g.neighbors(u) {
                if dist[v] == INF {
                    dist[v] = dist[u] + 1;
                    q.push_back(v);
                }
            }
        }
        return dist;
    }
    let mut pq = BinaryHeap::from([Reverse((0, s))]);
    while let Some(Reverse((d, u))) = pq.pop() {
        if d > dist[u] {
            continue;
        }
        for (v, w) in g.neighbors(u) {
            let nd = d + w;
            if nd < dist[v] {
                dist[v] = nd;
                pq.push(Reverse((nd, v)));
            }
        }
    }
    dist
}

pub fn exact_apsp(g: &DynamicGraph) -> Result<Matrix> {
    check_cap(g)?;
    Ok((0..g.n()).map(|s| sssp(g, s)).collect())
}

/// `W[u][v]`: largest edge weight on any shortest `u`-`v` path; 0 when `u = v`
/// or the pair is disconnected.
pub fn bottleneck_w(g: &DynamicGraph) -> Result<Matrix> {
    check_cap(g)?;
    let n = g.n();
    let mut out = vec![vec![0; n]; n];
    for s in 0..n {
        let dist = sssp(g, s);
        let mut order: Vec<NodeId> = (0..n).filter(|&v| dist[v] != INF).collect();
        order.sort_by_key(|&v| (dist[v], v));
        let row = &mut out[s];
        for &y in &order {
            for (x, w) in g.neighbors(y) {
                if dist[x] != INF && dist[x] + w == dist[y] {
                    row[y] = row[y].max(row[x].max(w));
                }
            }
        }
    }
    Ok(out)
}

/// Static 2-approximation from exact pivots and bunches.
pub fn static_two_apsp(g: &DynamicGraph, p: f64, seed: u64) -> Result<Matrix> {
    let d = exact_apsp(g)?;
    let n = g.n();
    let sample = sample_pivots(n, p, seed)?;
    let sources = sample.members();
    let pivot: Vec<Option<NodeId>> = (0..n)
        .map(|v| sources.iter().copied().min_by_key(|&s| (d[v][s], s)).filter(|&s| d[v][s] != INF))
        .collect();
    let radius: Vec<Dist> = (0..n).map(|v| pivot[v].map_or(INF, |s| d[v][s])).collect();
    let bunch: Vec<Vec<NodeId>> = (0..n)
        .map(|v| (0..n).filter(|&w| d[v][w] < radius[v]).collect())
        .collect();
    // nbr[x][v] = min over y in N(x) ∩ B(v) of w(x, y) + d(y, v)
    let mut nbr = vec![vec![INF; n]; n];
    for v in 0..n {
        for &y in &bunch[v] {
            for (x, w) in g.neighbors(y) {
                let c = w + d[y][v];
                if c < nbr[x][v] {
                    nbr[x][v] = c;
                }
            }
        }
    }
    let mut est = vec![vec![INF; n]; n];
    for u in 0..n {
        for v in 0..n {
            if u == v {
                est[u][v] = 0;
                continue;
            }
            let mut best = INF;
            if let Some(s) = pivot[u] {
                best = best.min(sat_add(radius[u], d[s][v]));
            }
            if let Some(s) = pivot[v] {
                best = best.min(sat_add(radius[v], d[s][u]));
            }
            for &x in &bunch[u] {
                best = best.min(sat_add(d[u][x], nbr[x][v]));
            }
            est[u][v] = best;
        }
    }
    Ok(est)
}

pub fn default_static_p(n: usize, m: usize) -> f64 {
    if m == 0 {
        1.0
    } else {
        (n as f64 / m as f64).sqrt().min(1.0)
    }
}

/// Static baseline wrapped as a dynamic structure that recomputes after every
/// update.
#[derive(Debug, Clone)]
pub struct Static2 {
    g: DynamicGraph,
    p: f64,
    seed: u64,
    est: Matrix,
    recomputes: u64,
}

impl Static2 {
    pub fn new(g: DynamicGraph, p: Option<f64>, seed: u64) -> Result<Self> {
        let p = p.unwrap_or_else(|| default_static_p(g.n(), g.m()));
        let est = static_two_apsp(&g, p, seed)?;
        Ok(Static2 { g, p, seed, est, recomputes: 1 })
    }
}

impl DecrementalApsp for Static2 {
    fn name(&self) -> &'static str {
        "static-2"
    }

    fn node_count(&self) -> usize {
        self.g.n()
    }

    fn apply(&mut self, e: &UpdateEvent) -> Result<()> {
        self.g.apply_update(e)?;
        self.est = static_two_apsp(&self.g, self.p, self.seed)?;
        self.recomputes += 1;
        Ok(())
    }

    fn query(&self, u: NodeId, v: NodeId) -> Dist {
        self.est[u][v]
    }

    fn counters(&self) -> Counters {
        Counters::from([("recomputes".to_string(), self.recomputes)])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundSpec {
    /// `d ≤ d̂ ≤ alpha·d + beta`.
    Multiplicative { alpha: f64, beta: Dist },
    /// `d ≤ d̂ ≤ alpha·d + W_uv`.
    Mixed { alpha: f64 },
    /// `d ≤ d̂ ≤ d + 2(k − 1)` for pairs with `d ≤ depth`; only `d ≤ d̂` beyond.
    Additive { k: usize, depth: Dist },
}

impl BoundSpec {
    fn needs_bottleneck(&self) -> bool {
        matches!(self, BoundSpec::Mixed { .. })
    }

    /// Upper bound for a pair at distance `d` with bottleneck `w`; `None` when
    /// only the lower bound is checked.
    pub fn upper(&self, d: Dist, w: Dist) -> Option<Dist> {
        let scaled = |alpha: f64| (alpha * d as f64 + 1e-9).floor() as Dist;
        match *self {
            BoundSpec::Multiplicative { alpha, beta } => Some(scaled(alpha) + beta),
            BoundSpec::Mixed { alpha } => Some(scaled(alpha) + w),
            BoundSpec::Additive { k, depth } => {
                (d <= depth).then(|| d + 2 * (k.max(1) as Dist - 1))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub u: NodeId,
    pub v: NodeId,
    pub exact: Option<Dist>,
    pub estimate: Option<Dist>,
    pub bound: Option<Dist>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckpointRecord {
    /// Number of updates applied before this checkpoint.
    pub after_updates: usize,
    pub pairs_checked: usize,
    pub violations: Vec<Violation>,
    pub max_ratio: f64,
    pub max_additive_slack: Dist,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StretchReport {
    pub bound: BoundSpec,
    pub checkpoints: Vec<CheckpointRecord>,
    pub max_ratio: f64,
    pub max_additive_slack: Dist,
    pub violations: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Density {
    /// Check at every `q` line of the stream.
    #[default]
    Queries,
    /// Check after initialization and after every update.
    EveryUpdate,
}

fn opt(d: Dist) -> Option<Dist> {
    (d != INF).then_some(d)
}

/// Check every ordered pair of `algo` against an exact matrix.
pub fn check_all_pairs(
    algo: &dyn DecrementalApsp,
    g: &DynamicGraph,
    bound: &BoundSpec,
    after_updates: usize,
) -> Result<CheckpointRecord> {
    let d = exact_apsp(g)?;
    let wb = if bound.needs_bottleneck() { Some(bottleneck_w(g)?) } else { None };
    let n = g.n();
    let mut rec = CheckpointRecord {
        after_updates,
        pairs_checked: 0,
        violations: Vec::new(),
        max_ratio: 1.0,
        max_additive_slack: 0,
    };
    for u in 0..n {
        for v in 0..n {
            let exact = d[u][v];
            let est = algo.query(u, v);
            rec.pairs_checked += 1;
            let w = wb.as_ref().map_or(0, |m| m[u][v]);
            let bound_val = if exact == INF { None } else { bound.upper(exact, w) };
            let ok = if exact == INF {
                est == INF
            } else {
                est >= exact && bound_val.is_none_or(|b| est <= b)
            };
            if exact != INF && est != INF && exact > 0 && bound_val.is_some() {
                rec.max_ratio = rec.max_ratio.max(est as f64 / exact as f64);
                rec.max_additive_slack = rec.max_additive_slack.max(est.saturating_sub(exact));
            }
            if !ok {
                rec.violations.push(Violation {
                    u,
                    v,
                    exact: opt(exact),
                    estimate: opt(est),
                    bound: bound_val,
                });
            }
        }
    }
    Ok(rec)
}

/// Replay `items` against `algo` and a private copy of `g`, checking all
/// pairs at each checkpoint.
pub fn sweep(
    algo: &mut dyn DecrementalApsp,
    g: &DynamicGraph,
    items: &[StreamItem],
    bound: BoundSpec,
    density: Density,
) -> Result<StretchReport> {
    let mut live = g.snapshot();
    let mut checkpoints = Vec::new();
    let mut applied = 0usize;
    if density == Density::EveryUpdate {
        checkpoints.push(check_all_pairs(&*algo, &live, &bound, 0)?);
    }
    for it in items {
        match it {
            StreamItem::Update(e) => {
                live.apply_update(e)?;
                algo.apply(e)?;
                applied += 1;
                if density == Density::EveryUpdate {
                    checkpoints.push(check_all_pairs(&*algo, &live, &bound, applied)?);
                }
            }
            StreamItem::Query(..) => {
                if density == Density::Queries {
                    checkpoints.push(check_all_pairs(&*algo, &live, &bound, applied)?);
                }
            }
        }
    }
    Ok(summarize(bound, checkpoints))
}

pub fn summarize(bound: BoundSpec, checkpoints: Vec<CheckpointRecord>) -> StretchReport {
    let violations = checkpoints.iter().map(|c| c.violations.len()).sum();
    StretchReport {
        bound,
        max_ratio: checkpoints.iter().map(|c| c.max_ratio).fold(1.0, f64::max),
        max_additive_slack: checkpoints.iter().map(|c| c.max_additive_slack).max().unwrap_or(0),
        violations,
        pass: violations == 0,
        checkpoints,
    }
}

/// JSON document: schema version, the caller's configuration, the report.
pub fn report_json(config: &serde_json::Value, report: &StretchReport) -> serde_json::Value {
    serde_json::json!({
        "version": REPORT_VERSION,
        "config": config,
        "pass": report.pass,
        "violations": report.violations,
        "max_ratio": report.max_ratio,
        "max_additive_slack": report.max_additive_slack,
        "checkpoints": report.checkpoints,
    })
}

/// Distances computed by repeated min-plus squaring of the weight matrix,
/// restricted to paths of at most `hops` edges. Slow; for cross-checks.
pub fn min_plus_hops(g: &DynamicGraph, hops: usize) -> Matrix {
    let n = g.n();
    let mut a = vec![vec![INF; n]; n];
    for (u, row) in a.iter_mut().enumerate() {
        row[u] = 0;
        for (v, w) in g.neighbors(u) {
            row[v] = w;
        }
    }
    let base = a.clone();
    let mut cur = a;
    for _ in 1..hops.max(1) {
        let mut next = cur.clone();
        for i in 0..n {
            for k in 0..n {
                if cur[i][k] == INF {
                    continue;
                }
                for j in 0..n {
                    let c = sat_add(cur[i][k], base[k][j]);
                    if c < next[i][j] {
                        next[i][j] = c;
                    }
                }
            }
        }
        cur = next;
    }
    cur
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_and_path() {
        let k3 = DynamicGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        let d = exact_apsp(&k3).unwrap();
        assert_eq!(d, vec![vec![0, 1, 1], vec![1, 0, 1], vec![1, 1, 0]]);
        let p4 = DynamicGraph::from_edges(4, &[(0, 1, 1), (1, 2, 1), (2, 3, 1)]).unwrap();
        assert_eq!(exact_apsp(&p4).unwrap()[0][3], 3);
    }

    #[test]
    fn bottleneck_takes_worst_shortest_path() {
        // 0-1-3 with weights 2,2 and 0-2-3 with weights 3,1
        let g = DynamicGraph::from_edges(4, &[(0, 1, 2), (1, 3, 2), (0, 2, 3), (2, 3, 1)]).unwrap();
        let w = bottleneck_w(&g).unwrap();
        assert_eq!(w[0][3], 3);
        assert_eq!(w[3][0], 3);
        assert_eq!(w[0][1], 2);
        let p = DynamicGraph::from_edges(3, &[(0, 1, 4), (1, 2, 9)]).unwrap();
        assert_eq!(bottleneck_w(&p).unwrap()[0][2], 9);
    }

    #[test]
    fn static_on_triangle() {
        let k3 = DynamicGraph::from_edges(3, &[(0, 1, 1), (1, 2, 1), (0, 2, 1)]).unwrap();
        for seed in 0..10 {
            let e = static_two_apsp(&k3, 0.5, seed).unwrap();
            for u in 0..3 {
                for v in 0..3 {
                    if u != v {
                        assert!((1..=2).contains(&e[u][v]));
                    }
                }
            }
        }
    }

    #[test]
    fn static_with_everything_sampled_is_exact() {
        let g = DynamicGraph::from_edges(5, &[(0, 1, 3), (1, 2, 1), (2, 3, 7), (3, 4, 2), (0, 4, 9)]).unwrap();
        assert_eq!(static_two_apsp(&g, 1.0, 4).unwrap(), exact_apsp(&g).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let g = DynamicGraph::new(DEFAULT_CAP + 1);
        if oracle_cap() == DEFAULT_CAP {
            assert!(matches!(exact_apsp(&g), Err(Error::CapExceeded { .. })));
        }
    }

    #[test]
    fn bound_arithmetic() {
        let b = BoundSpec::Multiplicative { alpha: 2.9, beta: 0 };
        assert_eq!(b.upper(10, 0), Some(29));
        assert_eq!(BoundSpec::Mixed { alpha: 2.9 }.upper(10, 4), Some(33));
        let a = BoundSpec::Additive { k: 3, depth: 4 };
        assert_eq!(a.upper(4, 0), Some(8));
        assert_eq!(a.upper(5, 0), None);
    }
}
