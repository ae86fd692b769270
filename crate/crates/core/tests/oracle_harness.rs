use dapsp::algo::{Counters, DecrementalApsp};
use dapsp::bunch::BunchEngine;
use dapsp::graph::{load_graph, parse_updates, write_graph, write_updates, Dist, NodeId, UpdateEvent};
use dapsp::harness::{run, verify, Algorithm, RunConfig};
use dapsp::mult::{DynApspMult, MultConfig};
use dapsp::oracle::{sssp, sweep, BoundSpec, Density};
use dapsp::workload::{generate, updates_only, WorkloadSpec};
use dapsp::{Result, INF};

/// Adds a fixed error to a single ordered pair.
struct Corrupt<A> {
    inner: A,
    pair: (NodeId, NodeId),
}

impl<A: DecrementalApsp> DecrementalApsp for Corrupt<A> {
    fn name(&self) -> &'static str {
        "corrupt"
    }

    fn node_count(&self) -> usize {
        self.inner.node_count()
    }

    fn apply(&mut self, e: &UpdateEvent) -> Result<()> {
        self.inner.apply(e)
    }

    fn query(&self, u: NodeId, v: NodeId) -> Dist {
        let d = self.inner.query(u, v);
        if (u, v) == self.pair && d != INF {
            d + 1000
        } else {
            d
        }
    }

    fn counters(&self) -> Counters {
        self.inner.counters()
    }
}

fn workload(n: usize, w: Dist, seed: u64) -> (dapsp::DynamicGraph, Vec<dapsp::StreamItem>) {
    generate(&WorkloadSpec { n, density: 0.3, max_weight: w, query_every: 0, seed, ..Default::default() }).unwrap()
}

#[test]
fn injected_fault_yields_exactly_one_violation() {
    let (g, _) = workload(16, 5, 2);
    let inner = DynApspMult::new(g.clone(), MultConfig::default()).unwrap();
    let mut a = Corrupt { inner, pair: (3, 7) };
    let r = sweep(&mut a, &g, &[], BoundSpec::Multiplicative { alpha: 2.9, beta: 0 }, Density::EveryUpdate).unwrap();
    assert_eq!(r.violations, 1);
    assert!(!r.pass);
    let v = &r.checkpoints[0].violations[0];
    assert_eq!((v.u, v.v), (3, 7));
}

#[test]
fn clean_run_has_no_violations() {
    let (g, items) = workload(20, 3, 4);
    let mut a = DynApspMult::new(g.clone(), MultConfig::default()).unwrap();
    let r = sweep(&mut a, &g, &items, BoundSpec::Multiplicative { alpha: 2.9, beta: 0 }, Density::EveryUpdate).unwrap();
    assert!(r.pass && r.checkpoints.iter().all(|c| c.violations.is_empty()));
}

/// Every bunch holds exact distances inside its ball and contains every node
/// strictly closer than the radius.
#[test]
fn bunches_are_exact_and_contain_the_inner_ball() {
    for seed in 0..6 {
        let (mut g, items) = workload(40, 6, 10 + seed);
        let mut b = BunchEngine::new(&g, 0.2, 0.9, seed).unwrap();
        if b.sources().is_empty() {
            continue;
        }
        for e in updates_only(&items) {
            let rec = g.apply_update(&e).unwrap();
            b.refresh(&g, &rec);
            for v in 0..g.n() {
                let d = sssp(&g, v);
                let to_a = b.sources().iter().map(|&s| d[s]).min().unwrap();
                assert_eq!(b.pivot_estimate(v), to_a);
                for (&w, m) in b.bunch(v) {
                    assert_eq!(m.dist, d[w]);
                    assert!(d[w] < to_a);
                }
                let r = b.radius(v);
                for w in 0..g.n() {
                    if d[w] < r && d[w] < to_a {
                        assert!(b.member(v, w).is_some(), "seed {seed}: {w} missing from B({v})");
                    }
                }
            }
        }
    }
}

#[test]
fn files_round_trip_through_run_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let (g, items) = generate(&WorkloadSpec { n: 12, density: 0.4, max_weight: 4, seed: 9, ..Default::default() }).unwrap();
    std::fs::write(dir.path().join("graph.txt"), write_graph(&g)).unwrap();
    std::fs::write(dir.path().join("updates.txt"), write_updates(&items)).unwrap();
    let g2 = load_graph(&std::fs::read_to_string(dir.path().join("graph.txt")).unwrap()).unwrap();
    let items2 = parse_updates(&std::fs::read_to_string(dir.path().join("updates.txt")).unwrap()).unwrap();
    assert!(g.same_edges(&g2));
    assert_eq!(items, items2);

    let mut cfg = RunConfig::new(Algorithm::Mixed);
    cfg.tau = Some(3);
    let report = run(&cfg, &g2, &items2).unwrap();
    assert_eq!(report.updates, g.m());
    let queries = items.iter().filter(|it| matches!(it, dapsp::StreamItem::Query(..))).count();
    assert_eq!(report.answers.len(), queries);
    let (stretch, json) = verify(&cfg, &g2, &items2).unwrap();
    assert!(stretch.pass);
    assert_eq!(json["version"], 1);
    assert_eq!(json["config"]["algorithm"], "mixed");
}

#[test]
fn every_tag_verifies_on_a_small_workload() {
    let (g, items) = generate(&WorkloadSpec { n: 16, density: 0.35, seed: 5, ..Default::default() }).unwrap();
    for algorithm in Algorithm::ALL {
        let mut cfg = RunConfig::new(algorithm);
        cfg.tau = Some(4);
        cfg.k = Some(2);
        cfg.d = Some(4);
        cfg.density = Density::EveryUpdate;
        let (r, _) = verify(&cfg, &g, &items).unwrap();
        assert!(r.pass, "{algorithm}");
    }
}

#[test]
fn sweeps_are_deterministic() {
    let (g, items) = workload(18, 7, 12);
    let cfg = RunConfig { density: Density::EveryUpdate, ..RunConfig::new(Algorithm::Mult) };
    assert_eq!(verify(&cfg, &g, &items).unwrap().1, verify(&cfg, &g, &items).unwrap().1);
}
