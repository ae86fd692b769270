//! Every structure swept against the exact oracle after each update.

use dapsp::harness::{verify, Algorithm, RunConfig};
use dapsp::oracle::Density;
use dapsp::workload::{generate, WorkloadSpec};

fn main() -> dapsp::Result<()> {
    let (g, items) = generate(&WorkloadSpec { n: 24, density: 0.3, seed: 1, ..Default::default() })?;
    for algorithm in Algorithm::ALL {
        let mut cfg = RunConfig::new(algorithm);
        cfg.tau = Some(4);
        cfg.k = Some(2);
        cfg.d = Some(4);
        cfg.density = Density::EveryUpdate;
        let (r, _) = verify(&cfg, &g, &items)?;
        println!(
            "{algorithm:<16} pass={} checkpoints={} max_ratio={:.3} max_slack={}",
            r.pass,
            r.checkpoints.len(),
            r.max_ratio,
            r.max_additive_slack
        );
    }
    Ok(())
}
