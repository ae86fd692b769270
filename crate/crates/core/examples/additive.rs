//! The additive structure with an explicit three-level hierarchy, checked
//! against exact distances within the depth horizon.

use dapsp::additive::AdditiveApsp;
use dapsp::oracle::exact_apsp;
use dapsp::workload::{deletion_stream, erdos_renyi};
use dapsp::{StreamItem, INF};

fn main() -> dapsp::Result<()> {
    let (n, k, depth) = (48, 3, 6);
    let g = erdos_renyi(n, 0.12, 1, 4)?;
    let levels: Vec<usize> = (0..n).map(|v| if v % 9 == 0 { 1 } else if v % 4 == 0 { 2 } else { 3 }).collect();
    let mut a = AdditiveApsp::with_hierarchy(g.clone(), k, depth, levels)?;
    println!("level sizes {:?}", &a.level_sizes()[1..]);

    let mut live = g.clone();
    for it in deletion_stream(&g, 0.4, 0, 4)? {
        if let StreamItem::Update(e) = it {
            live.apply_update(&e)?;
            a.delete(e.u, e.v)?;
        }
    }
    a.check_claim().map_err(dapsp::Error::Domain)?;
    let d = exact_apsp(&live)?;
    let mut slack = 0;
    for u in 0..n {
        for v in 0..n {
            if d[u][v] != INF && d[u][v] <= depth {
                slack = slack.max(a.query(u, v) - d[u][v]);
            }
        }
    }
    println!("max additive error {slack} (allowed {})", 2 * (k - 1));
    println!("{:#?}", a.counter_map());
    Ok(())
}
