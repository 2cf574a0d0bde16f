//! Fixed workloads shared by the benchmarks.

use twsdd_core::analysis::{disjointness, disjointness_blocks};
use twsdd_core::{BoolFunc, VarId, VarSet, Vtree};

/// `⋀_i (x_i ↔ y_i)` over interleaved variables, a function with small
/// factor width under the interleaved linear order and large width under
/// the blocked one.
pub fn equality(n: u32) -> BoolFunc {
    BoolFunc::from_index_fn(VarSet::range(2 * n), |i| {
        (0..n).all(|b| (i >> (2 * b)) & 1 == (i >> (2 * b + 1)) & 1)
    })
    .expect("within the variable cap")
}

pub fn interleaved(n: u32) -> Vtree {
    let order: Vec<VarId> = (0..2 * n).map(VarId).collect();
    Vtree::linear(&order).expect("nonempty")
}

pub fn blocked(n: u32) -> Vtree {
    let order: Vec<VarId> = (0..n)
        .map(|i| VarId(2 * i))
        .chain((0..n).map(|i| VarId(2 * i + 1)))
        .collect();
    Vtree::balanced(&order).expect("nonempty")
}

pub fn disjointness_instance(n: u32) -> (BoolFunc, VarSet, VarSet) {
    let (x, y) = disjointness_blocks(n);
    (disjointness(n).expect("within the variable cap"), x, y)
}
