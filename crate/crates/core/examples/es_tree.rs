//! A depth-capped ES-tree on a weighted path, under a weight increase, a
//! deletion and, in its monotone form, an insertion.

use dapsp::es_tree::MonotoneEsTree;

fn main() -> dapsp::Result<()> {
    let edges = [(0, 1, 1), (1, 2, 2), (2, 3, 1), (0, 3, 6)];
    let mut t = MonotoneEsTree::new(4, edges, 0, 8)?;
    println!("levels        {:?}", t.levels());

    let moved = t.increase_weight(1, 2, 4)?;
    println!("w(1,2) = 4    {:?}  moved {moved:?}", t.levels());

    let moved = t.delete_edge(0, 3)?;
    println!("drop (0,3)    {:?}  moved {moved:?}", t.levels());

    // Insertions never lower a level; the estimate stays an upper bound.
    t.insert_edge(0, 2, 1)?;
    println!("add (0,2)     {:?}", t.levels());
    t.check_consistency().map_err(dapsp::Error::Domain)?;
    Ok(())
}
