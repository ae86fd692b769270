use dapsp::additive::{AdditiveApsp, AdditiveConfig};
use dapsp::oracle::{check_all_pairs, BoundSpec};
use dapsp::workload::{deletion_stream, erdos_renyi};
use dapsp::{DynamicGraph, StreamItem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn levels(n: usize, k: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xabc);
    let p: f64 = rng.gen_range(0.05..0.4);
    (0..n)
        .map(|_| (1..k).find(|_| rng.gen::<f64>() < p).unwrap_or(k))
        .collect()
}

fn run(mut a: AdditiveApsp, g: &DynamicGraph, seed: u64) {
    let k = a.k();
    let bound = BoundSpec::Additive { k, depth: a.depth() };
    let items = deletion_stream(g, 0.7, 0, seed).unwrap();
    let mut cur = g.clone();
    for it in items {
        if let StreamItem::Update(e) = it {
            a.delete(e.u, e.v).unwrap();
            cur.apply_update(&e).unwrap();
            let r = check_all_pairs(&a, &cur, &bound, cur.version() as usize).unwrap();
            assert!(r.violations.is_empty(), "seed {seed} k {k}: {:?}", r.violations.first());
            a.check_claim().unwrap();
        }
    }
}

#[test]
fn explicit_hierarchies_every_update() {
    for seed in 0..24u64 {
        let k = 2 + (seed % 3) as usize;
        let d = [4, 8][(seed / 3 % 2) as usize];
        let g = erdos_renyi(40, 0.12, 1, seed).unwrap();
        let a = AdditiveApsp::with_hierarchy(g.clone(), k, d, levels(40, k, seed)).unwrap();
        run(a, &g, seed);
    }
}

#[test]
fn sampled_hierarchies_every_update() {
    for seed in 0..6u64 {
        let k = 2 + (seed % 2) as usize;
        let g = erdos_renyi(48, 0.15, 1, seed).unwrap();
        let a = AdditiveApsp::new(g.clone(), AdditiveConfig { seed, ..AdditiveConfig::new(k, 6) }).unwrap();
        run(a, &g, seed);
    }
}
