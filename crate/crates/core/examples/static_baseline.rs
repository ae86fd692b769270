//! The static 2-approximation from exact bunches and pivots.

use dapsp::oracle::{default_static_p, exact_apsp, static_two_apsp};
use dapsp::workload::erdos_renyi;

fn main() -> dapsp::Result<()> {
    let g = erdos_renyi(48, 0.2, 1, 8)?;
    let p = default_static_p(g.n(), g.m());
    let est = static_two_apsp(&g, p, 1)?;
    let d = exact_apsp(&g)?;
    let mut hist = [0usize; 3];
    for u in 0..g.n() {
        for v in 0..g.n() {
            if u != v {
                hist[(est[u][v] - d[u][v]).min(2) as usize] += 1;
            }
        }
    }
    println!("p = {p:.3}; pairs exact {}, +1 {}, +2 or more {}", hist[0], hist[1], hist[2]);
    Ok(())
}
