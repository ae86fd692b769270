//! Subdividing every edge once doubles all distances exactly; running the
//! mixed structure there turns its additive term into a small multiplicative one.

use dapsp::mixed::MixedConfig;
use dapsp::oracle::exact_apsp;
use dapsp::reduction::{subdivide, UnweightedMult};
use dapsp::workload::erdos_renyi;

fn main() -> dapsp::Result<()> {
    let g = erdos_renyi(20, 0.3, 1, 2)?;
    let s = subdivide(&g, 1)?;
    let (d, d2) = (exact_apsp(&g)?, exact_apsp(s.graph())?);
    println!("n {} -> {}, m {} -> {}", g.n(), s.graph().n(), g.m(), s.graph().m());
    println!("d(0,7) = {}, subdivided = {}", d[0][7], d2[0][7]);

    let mut a = UnweightedMult::new(&g, MixedConfig { tau: 0, eps: 0.1, ..MixedConfig::new(0) })?;
    let (u, v, _) = g.edges()[0];
    a.delete(u, v)?;
    println!("deleted ({u},{v}); chain was {:?}", a.subdivided().chain(u, v));
    println!("estimate(0,7) = {}", a.query(0, 7));
    Ok(())
}
