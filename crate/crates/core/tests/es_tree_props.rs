use proptest::prelude::*;

use dapsp::es_tree::EsTree;
use dapsp::graph::{DynamicGraph, UpdateEvent};
use dapsp::oracle::sssp;
use dapsp::INF;

fn graph_strategy() -> impl Strategy<Value = (usize, Vec<(usize, usize, u64)>)> {
    (3usize..20).prop_flat_map(|n| {
        let edge = (0..n, 0..n, 1u64..6);
        (Just(n), prop::collection::vec(edge, 0..60))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    /// Under deletions and increases the tree matches a fresh shortest-path
    /// computation, truncated at the cap.
    #[test]
    fn decremental_tree_is_exact((n, raw) in graph_strategy(), ops in prop::collection::vec((any::<prop::sample::Index>(), 0u64..4), 0..40), cap in 1u64..30) {
        let mut g = DynamicGraph::new(n);
        for (u, v, w) in raw {
            if u != v && g.weight(u, v).is_none() {
                g.add_edge(u, v, w).unwrap();
            }
        }
        g.set_weight_bound(100);
        let mut t = EsTree::from_graph(&g, 0, cap).unwrap();
        for (idx, bump) in ops {
            let edges = g.edges();
            if edges.is_empty() {
                break;
            }
            let (u, v, w) = edges[idx.index(edges.len())];
            if bump == 0 {
                g.apply_update(&UpdateEvent::delete(u, v)).unwrap();
                t.delete_edge(u, v).unwrap();
            } else {
                g.apply_update(&UpdateEvent::increase(u, v, w + bump)).unwrap();
                t.increase_weight(u, v, w + bump).unwrap();
            }
            let d = sssp(&g, 0);
            for x in 0..n {
                let want = if d[x] <= cap { d[x] } else { INF };
                prop_assert_eq!(t.level(x), want);
            }
        }
    }
}
