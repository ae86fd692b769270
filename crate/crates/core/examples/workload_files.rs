//! Writing a workload to disk, reading it back, and replaying it.

use dapsp::graph::{load_graph, parse_updates, write_graph, write_updates};
use dapsp::harness::{run, Algorithm, RunConfig};
use dapsp::workload::{generate, WorkloadSpec};

fn main() -> dapsp::Result<()> {
    let dir = std::env::temp_dir().join("dapsp-example");
    std::fs::create_dir_all(&dir)?;
    let spec = WorkloadSpec { n: 8, density: 1.0, max_weight: 3, query_every: 4, seed: 5, ..Default::default() };
    let (g, items) = generate(&spec)?;
    std::fs::write(dir.join("graph.txt"), write_graph(&g))?;
    std::fs::write(dir.join("updates.txt"), write_updates(&items))?;

    let g = load_graph(&std::fs::read_to_string(dir.join("graph.txt"))?)?;
    let items = parse_updates(&std::fs::read_to_string(dir.join("updates.txt"))?)?;
    let report = run(&RunConfig::new(Algorithm::Mult), &g, &items)?;
    println!("{} updates, {} answers, files in {}", report.updates, report.answers.len(), dir.display());
    for a in report.answers.iter().take(4) {
        println!("  after {:>2}: d({},{}) ~ {:?}", a.after_updates, a.u, a.v, a.estimate);
    }
    Ok(())
}
