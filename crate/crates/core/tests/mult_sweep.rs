use dapsp::mult::{DynApspMult, MultConfig};
use dapsp::oracle::{sweep, BoundSpec, Density};
use dapsp::workload::{generate, WorkloadSpec};

#[test]
fn mult_full_sweeps() {
    for (n, w, seed) in [(32, 1, 1), (32, 10, 2), (48, 10, 3), (40, 1, 4)] {
        let spec = WorkloadSpec { n, density: 0.25, max_weight: w, seed, ..Default::default() };
        let (g, items) = generate(&spec).unwrap();
        let mut a = DynApspMult::new(g.clone(), MultConfig { p: None, eps: 0.9, seed }).unwrap();
        let r = sweep(&mut a, &g, &items, BoundSpec::Multiplicative { alpha: 2.9, beta: 0 }, Density::EveryUpdate).unwrap();
        assert!(r.pass, "n={n} w={w}: {:?}", r.checkpoints.iter().flat_map(|c| c.violations.iter()).take(3).collect::<Vec<_>>());
        a.check_invariants().unwrap();
    }
}

#[test]
fn mixed_full_sweeps() {
    use dapsp::mixed::{default_tau, DynApspMixed, MixedConfig};
    for (n, w, seed, small_tau) in [(32, 1, 1, true), (32, 10, 2, false), (48, 10, 3, true), (40, 1, 4, false)] {
        let spec = WorkloadSpec { n, density: 0.25, max_weight: w, seed, ..Default::default() };
        let (g, items) = generate(&spec).unwrap();
        let tau = if small_tau { 4 } else { default_tau(g.m()) };
        let mut a = DynApspMixed::new(g.clone(), MixedConfig { p: None, tau, eps: 0.9, seed }).unwrap();
        let r = sweep(&mut a, &g, &items, BoundSpec::Mixed { alpha: 2.9 }, Density::EveryUpdate).unwrap();
        assert!(r.pass, "n={n} w={w}: {:?}", r.checkpoints.iter().flat_map(|c| c.violations.iter()).take(3).collect::<Vec<_>>());
        a.check_invariants().unwrap();
    }
}
