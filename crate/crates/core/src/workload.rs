//! Random graphs and deletion streams.
//!
//! The update order is drawn from its own seed before any algorithm samples
//! anything, so the sequence never depends on the structure under test.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Dist, DynamicGraph, StreamItem, UpdateEvent};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadSpec {
    pub n: usize,
    pub density: f64,
    pub max_weight: Dist,
    /// Fraction of edges deleted, in `[0, 1]`.
    pub delete_fraction: f64,
    /// A `q` line after every this many updates; 0 disables checkpoints.
    pub query_every: usize,
    pub seed: u64,
}

impl Default for WorkloadSpec {
    fn default() -> Self {
        WorkloadSpec { n: 32, density: 0.25, max_weight: 1, delete_fraction: 1.0, query_every: 1, seed: 0 }
    }
}

/// Erdős–Rényi graph with weights uniform in `[1, max_weight]`.
pub fn erdos_renyi(n: usize, density: f64, max_weight: Dist, seed: u64) -> Result<DynamicGraph> {
    if !(density > 0.0 && density <= 1.0) {
        return Err(Error::Config(format!("density {density} not in (0,1]")));
    }
    if max_weight == 0 {
        return Err(Error::Config("max weight must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = DynamicGraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(density) {
                g.add_edge(u, v, rng.gen_range(1..=max_weight))?;
            }
        }
    }
    g.set_weight_bound(max_weight);
    Ok(g)
}

/// Shuffled deletions of a fraction of the edges, with `q` lines between them.
pub fn deletion_stream(g: &DynamicGraph, fraction: f64, query_every: usize, seed: u64) -> Result<Vec<StreamItem>> {
    if !(0.0..=1.0).contains(&fraction) {
        return Err(Error::Config(format!("deletion fraction {fraction} not in [0,1]")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x005e_ed0f_de1e_7e00);
    let mut edges = g.edges();
    edges.shuffle(&mut rng);
    let count = (fraction * edges.len() as f64).round() as usize;
    let n = g.n().max(1);
    let mut out = Vec::new();
    for (i, &(u, v, _)) in edges.iter().take(count).enumerate() {
        out.push(StreamItem::Update(UpdateEvent::delete(u, v)));
        if query_every > 0 && (i + 1) % query_every == 0 {
            out.push(StreamItem::Query(rng.gen_range(0..n), rng.gen_range(0..n)));
        }
    }
    Ok(out)
}

pub fn generate(spec: &WorkloadSpec) -> Result<(DynamicGraph, Vec<StreamItem>)> {
    let g = erdos_renyi(spec.n, spec.density, spec.max_weight, spec.seed)?;
    let items = deletion_stream(&g, spec.delete_fraction, spec.query_every, spec.seed)?;
    Ok((g, items))
}

pub fn updates_only(items: &[StreamItem]) -> Vec<UpdateEvent> {
    items
        .iter()
        .filter_map(|it| match it {
            StreamItem::Update(e) => Some(*e),
            StreamItem::Query(..) => None,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{write_graph, write_updates};

    #[test]
    fn full_density_is_complete() {
        let g = erdos_renyi(8, 1.0, 1, 3).unwrap();
        assert_eq!(g.m(), 28);
        assert!(g.is_unweighted());
    }

    #[test]
    fn same_seed_same_files() {
        let spec = WorkloadSpec { n: 20, density: 0.3, max_weight: 10, seed: 11, ..Default::default() };
        let (g1, s1) = generate(&spec).unwrap();
        let (g2, s2) = generate(&spec).unwrap();
        assert_eq!(write_graph(&g1), write_graph(&g2));
        assert_eq!(write_updates(&s1), write_updates(&s2));
        assert_eq!(updates_only(&s1).len(), g1.m());
        assert!(g1.edges().iter().all(|e| (1..=10).contains(&e.2)));
    }
}
