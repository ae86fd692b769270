//! Pivots, bunches and clusters on a random graph, and the change events a
//! deletion produces.

use dapsp::bunch::BunchEngine;
use dapsp::workload::erdos_renyi;
use dapsp::UpdateEvent;

fn main() -> dapsp::Result<()> {
    let mut g = erdos_renyi(30, 0.2, 5, 7)?;
    let mut b = BunchEngine::new(&g, 0.1, 0.9, 1)?;
    println!("A = {:?}", b.sources());
    for v in 0..4 {
        let members: Vec<_> = b.bunch(v).iter().map(|(w, m)| (*w, m.dist)).collect();
        println!("v={v} pivot={:?} d(v,A)={} B(v)={members:?}", b.pivot(v), b.pivot_estimate(v));
    }

    let mut events = Vec::new();
    for (u, v, _) in g.edges().into_iter().step_by(2) {
        let rec = g.apply_update(&UpdateEvent::delete(u, v))?;
        events.extend(b.refresh(&g, &rec));
    }
    println!("deleting half the edges produced {} bunch events, e.g.", events.len());
    for e in events.iter().take(5) {
        println!("  {e:?}");
    }
    println!("max rebuilds per node {} (bound {})", b.max_rebuilds(), b.rebuild_bound(g.weight_bound()));
    Ok(())
}
