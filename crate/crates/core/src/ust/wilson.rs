use crate::graph::VertexId;
use crate::rng::{rng_from_seed, SimRng};

use super::lerw::{erased_walk, Eraser};
use super::tree::SpanningTree;
use super::wired::WiredGraph;
use super::UstError;

/// Per-branch step cap used by the samplers unless told otherwise.
pub const DEFAULT_STEP_CAP: u64 = 1_000_000_000;

/// Wilson's algorithm: loop-erased walks from each vertex of `order` not yet
/// in the tree, absorbed on the tree or the wired boundary.
pub fn wilson_ust(wg: &WiredGraph, order: &[VertexId], seed: u64) -> Result<SpanningTree, UstError> {
    let mut covered = vec![false; wg.len()];
    for &v in order {
        if v >= wg.len() {
            return Err(UstError::VertexOutOfRange(v));
        }
        covered[v] = true;
    }
    if let Some(&v) = wg.interior_ids().iter().find(|&&v| !covered[v]) {
        return Err(UstError::OrderIncomplete { vertex: v });
    }
    let mut tree = SpanningTree::empty(wg.len());
    let mut rng = rng_from_seed(seed);
    let mut er = Eraser::new(wg.len());
    grow_from(wg, &mut tree, order, &mut rng, DEFAULT_STEP_CAP, &mut er)?;
    Ok(tree)
}

/// Wilson's algorithm in increasing vertex order.
pub fn wilson_ust_default(wg: &WiredGraph, seed: u64) -> Result<SpanningTree, UstError> {
    let order = wg.interior_ids().to_vec();
    wilson_ust(wg, &order, seed)
}

/// Finish a partial tree with Wilson's algorithm in increasing vertex order.
pub fn complete_tree(wg: &WiredGraph, tree: &mut SpanningTree, rng: &mut SimRng) -> Result<(), UstError> {
    let mut er = Eraser::new(wg.len());
    let order = wg.interior_ids().to_vec();
    grow_from(wg, tree, &order, rng, DEFAULT_STEP_CAP, &mut er)
}

pub(crate) fn grow_from(
    wg: &WiredGraph,
    tree: &mut SpanningTree,
    order: &[VertexId],
    rng: &mut SimRng,
    cap: u64,
    er: &mut Eraser,
) -> Result<(), UstError> {
    for &v in order {
        grow(wg, tree, v, rng, cap, er)?;
    }
    Ok(())
}

/// Add the branch from `v` (nothing if `v` is already absorbing).
pub(crate) fn grow(
    wg: &WiredGraph,
    tree: &mut SpanningTree,
    v: VertexId,
    rng: &mut SimRng,
    cap: u64,
    er: &mut Eraser,
) -> Result<Option<super::lerw::Walked>, UstError> {
    if !wg.is_interior(v) || tree.contains(v) {
        return Ok(None);
    }
    let w = {
        let t = &*tree;
        erased_walk(wg.network(), v, |u| !wg.is_interior(u) || t.contains(u), rng, cap, er)?
    };
    tree.graft(w.path.clone());
    Ok(Some(w))
}
