//! The mixed structure: heavy nodes get their own trees, the rest share
//! overlap heaps. Compares the three query routes for one pair.

use dapsp::mixed::{default_tau, DynApspMixed, MixedConfig};
use dapsp::oracle::{bottleneck_w, exact_apsp};
use dapsp::workload::erdos_renyi;
use dapsp::{Dist, UpdateEvent, INF};

fn show(d: Dist) -> String {
    if d == INF { "inf".into() } else { d.to_string() }
}

fn main() -> dapsp::Result<()> {
    let mut g = erdos_renyi(48, 0.2, 20, 11)?;
    // A low threshold so that some clusters count as heavy.
    let tau = 3;
    let mut a = DynApspMixed::new(g.clone(), MixedConfig::new(tau))?;
    println!("tau = {tau} (default would be {}), heavy nodes = {}", default_tau(g.m()), a.heavy_count());

    for (u, v, _) in g.edges().into_iter().step_by(3).take(40) {
        let e = UpdateEvent::delete(u, v);
        g.apply_update(&e)?;
        a.update(&e)?;
    }
    let (d, w) = (exact_apsp(&g)?, bottleneck_w(&g)?);
    let (u, v) = (0, 5);
    println!("pair ({u},{v}): exact {} bound {:.1}", d[u][v], 2.9 * d[u][v] as f64 + w[u][v] as f64);
    println!("  heavy route   {}", show(a.heavy_route(u, v)));
    println!("  overlap route {}", a.overlap_route(u, v));
    println!("  answer        {}", show(a.query(u, v)));
    println!("heavy nodes now {}", a.heavy_count());
    Ok(())
}
