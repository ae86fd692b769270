//! Run configurations shared by the command-line tool and the examples:
//! building a structure from a tag, replaying a stream, verifying it, and the
//! size ladder used for benchmarking.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::additive::{AdditiveApsp, AdditiveConfig};
use crate::algo::{Counters, DecrementalApsp};
use crate::bunch::BunchEngine;
use crate::error::{Error, Result};
use crate::graph::{stream_weight_bound, Dist, DynamicGraph, NodeId, StreamItem, INF};
use crate::mixed::{default_tau, DynApspMixed, MixedConfig};
use crate::mult::{DynApspMult, MultConfig};
use crate::oracle::{report_json, sweep, BoundSpec, Density, Static2, StretchReport};
use crate::reduction::UnweightedMult;
use crate::workload::{generate, WorkloadSpec};

pub const BENCH_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Mult,
    Mixed,
    UnweightedMult,
    Additive,
    #[serde(rename = "static-2")]
    Static2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Mult,
        Algorithm::Mixed,
        Algorithm::UnweightedMult,
        Algorithm::Additive,
        Algorithm::Static2,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Algorithm::Mult => "mult",
            Algorithm::Mixed => "mixed",
            Algorithm::UnweightedMult => "unweighted-mult",
            Algorithm::Additive => "additive",
            Algorithm::Static2 => "static-2",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.tag() == s)
            .ok_or_else(|| Error::Config(format!("unknown algorithm {s:?}")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub algorithm: Algorithm,
    pub p: Option<f64>,
    pub tau: Option<usize>,
    pub eps: f64,
    pub k: Option<usize>,
    pub d: Option<Dist>,
    pub c: f64,
    pub seed: u64,
    pub density: Density,
}

impl RunConfig {
    pub fn new(algorithm: Algorithm) -> Self {
        RunConfig {
            algorithm,
            p: None,
            tau: None,
            eps: 0.9,
            k: None,
            d: None,
            c: 2.0,
            seed: 0,
            density: Density::Queries,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.algorithm {
            Algorithm::Mixed if self.tau.is_none() => Err(Error::Config("mixed needs --tau".into())),
            Algorithm::Additive if self.k.is_none() || self.d.is_none() => {
                Err(Error::Config("additive needs --k and --d".into()))
            }
            _ => Ok(()),
        }
    }

    pub fn build(&self, g: &DynamicGraph) -> Result<Box<dyn DecrementalApsp>> {
        self.validate()?;
        let g = g.clone();
        Ok(match self.algorithm {
            Algorithm::Mult => Box::new(DynApspMult::new(g, self.mult_config())?),
            Algorithm::Mixed => Box::new(DynApspMixed::new(g, self.mixed_config(0))?),
            Algorithm::UnweightedMult => Box::new(UnweightedMult::new(&g, self.mixed_config(0))?),
            Algorithm::Additive => Box::new(AdditiveApsp::new(g, self.additive_config())?),
            Algorithm::Static2 => Box::new(Static2::new(g, self.p, self.seed)?),
        })
    }

    fn mult_config(&self) -> MultConfig {
        MultConfig { p: self.p, eps: self.eps, seed: self.seed }
    }

    fn mixed_config(&self, fallback_tau: usize) -> MixedConfig {
        MixedConfig { p: self.p, tau: self.tau.unwrap_or(fallback_tau), eps: self.eps, seed: self.seed }
    }

    fn additive_config(&self) -> AdditiveConfig {
        AdditiveConfig { k: self.k.unwrap_or(2), depth: self.d.unwrap_or(1), c: self.c, seed: self.seed }
    }

    /// The guarantee the tag promises.
    pub fn bound(&self) -> BoundSpec {
        match self.algorithm {
            Algorithm::Mult => BoundSpec::Multiplicative { alpha: 2.0 + self.eps, beta: 0 },
            Algorithm::Mixed => BoundSpec::Mixed { alpha: 2.0 + self.eps },
            Algorithm::UnweightedMult => BoundSpec::Multiplicative { alpha: 2.0 + 3.0 * self.eps, beta: 0 },
            Algorithm::Additive => BoundSpec::Additive { k: self.k.unwrap_or(2), depth: self.d.unwrap_or(1) },
            Algorithm::Static2 => BoundSpec::Multiplicative { alpha: 2.0, beta: 0 },
        }
    }
}

/// Raises the graph's weight bound to cover every increase in the stream.
pub fn prepare(mut g: DynamicGraph, items: &[StreamItem]) -> DynamicGraph {
    let w = stream_weight_bound(&g, items);
    g.set_weight_bound(w);
    g
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Answer {
    pub after_updates: usize,
    pub u: NodeId,
    pub v: NodeId,
    pub estimate: Option<Dist>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: u32,
    pub config: RunConfig,
    pub n: usize,
    pub m: usize,
    pub updates: usize,
    pub answers: Vec<Answer>,
    pub counters: Counters,
    /// Excluded from determinism comparisons.
    pub wall_ms: f64,
}

/// Replays the stream, answering each `q` line.
pub fn run(cfg: &RunConfig, g: &DynamicGraph, items: &[StreamItem]) -> Result<RunReport> {
    let g = prepare(g.clone(), items);
    let start = Instant::now();
    let mut algo = cfg.build(&g)?;
    let mut answers = Vec::new();
    let mut updates = 0;
    for it in items {
        match *it {
            StreamItem::Update(e) => {
                algo.apply(&e)?;
                updates += 1;
            }
            StreamItem::Query(u, v) => {
                if u.max(v) >= g.n() {
                    return Err(Error::NodeOutOfRange { node: u.max(v), n: g.n() });
                }
                let d = algo.query(u, v);
                answers.push(Answer { after_updates: updates, u, v, estimate: (d != INF).then_some(d) });
            }
        }
    }
    Ok(RunReport {
        version: crate::oracle::REPORT_VERSION,
        config: cfg.clone(),
        n: g.n(),
        m: g.m(),
        updates,
        answers,
        counters: algo.counters(),
        wall_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// Sweeps the stream against the exact oracle under the tag's bound.
pub fn verify(cfg: &RunConfig, g: &DynamicGraph, items: &[StreamItem]) -> Result<(StretchReport, serde_json::Value)> {
    let g = prepare(g.clone(), items);
    let mut algo = cfg.build(&g)?;
    let report = sweep(algo.as_mut(), &g, items, cfg.bound(), cfg.density)?;
    let config = serde_json::to_value(cfg).map_err(|e| Error::Io(e.to_string()))?;
    let json = report_json(&config, &report);
    Ok((report, json))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub schema: u32,
    pub n: usize,
    pub m: usize,
    pub updates: usize,
    pub update_ms: f64,
    pub rebuild_bound: Option<u64>,
    pub max_bunch_rebuilds: Option<u64>,
    pub nbr_bound: Option<u64>,
    pub max_nbr_min_changes: Option<u64>,
    /// Counters as a JSON object.
    pub counters: String,
}

/// Fails if some node rebuilt its bunch more often than allowed.
pub fn check_rebuilds(b: &BunchEngine, w: Dist) -> Result<(u64, u64)> {
    let bound = b.rebuild_bound(w);
    let max = b.max_rebuilds();
    if max > bound {
        return Err(Error::Domain(format!("bunch rebuilds {max} exceed {bound}")));
    }
    Ok((bound, max))
}

/// Fails if some `(x, v)` neighbor-bunch minimum changed more than `L²` times.
pub fn check_nbr_changes(a: &DynApspMult) -> Result<(u64, u64)> {
    let b = a.bunches();
    let l = b.rounder().levels(b.n() as f64 * a.graph().weight_bound() as f64);
    let bound = l * l;
    let max = a.max_nbr_changes();
    if max > bound {
        return Err(Error::Domain(format!("neighbor-bunch changes {max} exceed {bound}")));
    }
    Ok((bound, max))
}

/// Runs every update of `items`, then checks the laziness counters.
fn bench_one(cfg: &RunConfig, g: &DynamicGraph, items: &[StreamItem]) -> Result<BenchRow> {
    let g = prepare(g.clone(), items);
    let w = g.weight_bound();
    let updates: Vec<_> = items
        .iter()
        .filter_map(|it| match it {
            StreamItem::Update(e) => Some(*e),
            StreamItem::Query(..) => None,
        })
        .collect();
    let mut row = BenchRow {
        schema: BENCH_SCHEMA,
        n: g.n(),
        m: g.m(),
        updates: updates.len(),
        update_ms: 0.0,
        rebuild_bound: None,
        max_bunch_rebuilds: None,
        nbr_bound: None,
        max_nbr_min_changes: None,
        counters: String::new(),
    };
    let start = Instant::now();
    let counters = match cfg.algorithm {
        Algorithm::Mult => {
            let mut a = DynApspMult::new(g.clone(), cfg.mult_config())?;
            for e in &updates {
                a.update(e)?;
            }
            row.update_ms = start.elapsed().as_secs_f64() * 1e3;
            let (rb, rm) = check_rebuilds(a.bunches(), w)?;
            let (nb, nm) = check_nbr_changes(&a)?;
            row.rebuild_bound = Some(rb);
            row.max_bunch_rebuilds = Some(rm);
            row.nbr_bound = Some(nb);
            row.max_nbr_min_changes = Some(nm);
            a.counter_map()
        }
        Algorithm::Mixed => {
            let mut a = DynApspMixed::new(g.clone(), cfg.mixed_config(default_tau(g.m())))?;
            for e in &updates {
                a.update(e)?;
            }
            row.update_ms = start.elapsed().as_secs_f64() * 1e3;
            let (rb, rm) = check_rebuilds(a.bunches(), w)?;
            row.rebuild_bound = Some(rb);
            row.max_bunch_rebuilds = Some(rm);
            a.counter_map()
        }
        _ => {
            let mut a = cfg.build(&g)?;
            for e in &updates {
                a.apply(e)?;
            }
            row.update_ms = start.elapsed().as_secs_f64() * 1e3;
            a.counters()
        }
    };
    row.counters = serde_json::to_string(&counters).map_err(|e| Error::Io(e.to_string()))?;
    Ok(row)
}

/// One row per size; `template.n` is overwritten.
pub fn bench(cfg: &RunConfig, template: &WorkloadSpec, sizes: &[usize]) -> Result<Vec<BenchRow>> {
    sizes
        .iter()
        .map(|&n| {
            let (g, items) = generate(&WorkloadSpec { n, ..*template })?;
            bench_one(cfg, &g, &items)
        })
        .collect()
}

pub fn bench_csv(rows: &[BenchRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Io(e.to_string()))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn k8() -> (DynamicGraph, Vec<StreamItem>) {
        generate(&WorkloadSpec { n: 8, density: 1.0, ..WorkloadSpec::default() }).unwrap()
    }

    #[test]
    fn tags_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.tag().parse::<Algorithm>().unwrap(), a);
        }
        assert!("dijkstra".parse::<Algorithm>().is_err());
    }

    #[test]
    fn required_flags() {
        let (g, _) = k8();
        assert!(matches!(RunConfig::new(Algorithm::Mixed).build(&g), Err(Error::Config(_))));
        let mut a = RunConfig::new(Algorithm::Additive);
        a.k = Some(2);
        assert!(matches!(a.build(&g), Err(Error::Config(_))));
    }

    #[test]
    fn mult_on_k8_passes_and_is_deterministic() {
        let (g, items) = k8();
        assert_eq!(g.m(), 28);
        let cfg = RunConfig::new(Algorithm::Mult);
        let (report, json) = verify(&cfg, &g, &items).unwrap();
        assert!(report.pass);
        assert_eq!(json["pass"], true);
        let mut a = run(&cfg, &g, &items).unwrap();
        let mut b = run(&cfg, &g, &items).unwrap();
        a.wall_ms = 0.0;
        b.wall_ms = 0.0;
        assert_eq!(a, b);
    }

    #[test]
    fn bench_ladder_rows() {
        let cfg = RunConfig::new(Algorithm::Mult);
        let spec = WorkloadSpec { density: 0.3, max_weight: 4, ..WorkloadSpec::default() };
        let rows = bench(&cfg, &spec, &[16, 24, 32]).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.max_bunch_rebuilds <= r.rebuild_bound));
        let csv = bench_csv(&rows).unwrap();
        assert_eq!(csv.lines().count(), 4);
    }
}
