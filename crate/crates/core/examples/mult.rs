//! The multiplicative structure against exact distances while edges vanish.

use dapsp::mult::{DynApspMult, MultConfig};
use dapsp::oracle::exact_apsp;
use dapsp::workload::{deletion_stream, erdos_renyi};
use dapsp::{StreamItem, INF};

fn main() -> dapsp::Result<()> {
    let g = erdos_renyi(40, 0.2, 10, 3)?;
    let items = deletion_stream(&g, 0.5, 0, 3)?;
    let mut a = DynApspMult::new(g.clone(), MultConfig::default())?;
    let mut live = g;
    let mut worst: f64 = 1.0;
    for it in &items {
        if let StreamItem::Update(e) = it {
            live.apply_update(e)?;
            a.update(e)?;
        }
    }
    let d = exact_apsp(&live)?;
    for u in 0..live.n() {
        for v in 0..live.n() {
            if u != v && d[u][v] != INF {
                worst = worst.max(a.query(u, v) as f64 / d[u][v] as f64);
            }
        }
    }
    println!("after {} deletions: worst ratio {worst:.3} (allowed 2.9)", items.len());
    println!("estimate(0, 1) = {}, exact = {}", a.query(0, 1), d[0][1]);
    println!("{:#?}", a.counter_map());
    Ok(())
}
