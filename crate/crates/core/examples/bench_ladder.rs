//! A small size ladder with the laziness counters asserted, printed as CSV.

use dapsp::harness::{bench, bench_csv, Algorithm, RunConfig};
use dapsp::workload::WorkloadSpec;

fn main() -> dapsp::Result<()> {
    let spec = WorkloadSpec { density: 0.2, max_weight: 10, ..Default::default() };
    let rows = bench(&RunConfig::new(Algorithm::Mult), &spec, &[32, 64, 96])?;
    print!("{}", bench_csv(&rows)?);
    Ok(())
}
