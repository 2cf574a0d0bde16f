use serde::Serialize;

use super::verify::GateFunctions;
use crate::boolfn::{BoolFunc, TruthTable, VarSet};
use crate::compile::{CompiledForm, Node};
use crate::error::{Error, Result};
use crate::vtree::VNodeId;

/// `sat(left) × sat(right)` over a partition `(X1, X2)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rectangle {
    pub left: BoolFunc,
    pub right: BoolFunc,
}

impl Rectangle {
    pub fn size(&self) -> u64 {
        self.left.model_count() * self.right.model_count()
    }

    /// The rectangle as a function over `X1 ∪ X2`.
    pub fn to_function(&self) -> Result<BoolFunc> {
        self.left.and(&self.right)
    }
}

#[derive(Clone, Debug)]
pub struct Cover {
    pub x1: VarSet,
    pub x2: VarSet,
    pub rectangles: Vec<Rectangle>,
}

impl Cover {
    pub fn len(&self) -> usize {
        self.rectangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rectangles.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct CoverCheck {
    pub covers: bool,
    pub disjoint: bool,
}

impl CoverCheck {
    pub fn ok(&self) -> bool {
        self.covers && self.disjoint
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Inside,
    Outside,
    Mixed,
}

/// Disjoint rectangle cover of the form's function over `(X_v, X ∖ X_v)`.
///
/// Gates reading only `X_v` become rectangle keys; a key's right component
/// is the disjunction of the contexts under which it is reached through
/// gates that read both sides. Outside operands of such Or gates are
/// collected under a single `⊤` key.
pub fn extract_cover(form: &CompiledForm, v: VNodeId) -> Result<Cover> {
    let t = form
        .vtree()
        .ok_or_else(|| Error::Form("cover extraction needs a vtree".into()))?;
    if v >= t.len() {
        return Err(Error::Vtree(format!("node {v} is not in the vtree")));
    }
    let x1 = t.vars(v).intersection(form.vars());
    let x2 = form.vars().difference(&x1);
    let gf = GateFunctions::new(form)?;
    let reach = form.reachable();
    let side: Vec<Side> = gf
        .vars
        .iter()
        .map(|vs| {
            if vs.is_disjoint(&x1) {
                Side::Outside
            } else if vs.is_subset(&x1) {
                Side::Inside
            } else {
                Side::Mixed
            }
        })
        .collect();

    let whole = |f: &BoolFunc, over: &VarSet| f.extend(over);
    let root = form.root();
    let mut rects = Vec::new();
    match side[root] {
        Side::Inside => rects.push(Rectangle {
            left: whole(&gf.funcs[root], &x1)?,
            right: BoolFunc::constant(x2.clone(), true)?,
        }),
        Side::Outside => rects.push(Rectangle {
            left: BoolFunc::constant(x1.clone(), true)?,
            right: whole(&gf.funcs[root], &x2)?,
        }),
        Side::Mixed => {
            let n2 = x2.len() as u32;
            let mut ctx: Vec<Option<TruthTable>> = vec![None; form.size()];
            let mut top = TruthTable::zeros(n2);
            ctx[root] = Some(TruthTable::ones(n2));
            let push =
                |ctx: &mut Vec<Option<TruthTable>>, c: usize, t: &TruthTable| match &mut ctx[c] {
                    Some(acc) => acc.or_assign(t),
                    slot => *slot = Some(t.clone()),
                };
            for g in (0..=root).rev() {
                if !reach[g] || side[g] != Side::Mixed {
                    continue;
                }
                let Some(here) = ctx[g].take() else { continue };
                match form.node(g) {
                    Node::Or { children, .. } => {
                        for &c in children {
                            if side[c] == Side::Outside {
                                top.or_assign(&here.and(whole(&gf.funcs[c], &x2)?.table()));
                            } else {
                                push(&mut ctx, c, &here);
                            }
                        }
                    }
                    Node::And { parts, .. } => {
                        let (out, inn) = match (side[parts[0]], side[parts[1]]) {
                            (Side::Outside, _) => (parts[0], parts[1]),
                            (_, Side::Outside) => (parts[1], parts[0]),
                            _ => {
                                return Err(Error::Form(format!(
                                    "gate {g} reads both sides of node {v} in each operand"
                                )))
                            }
                        };
                        let narrowed = here.and(whole(&gf.funcs[out], &x2)?.table());
                        push(&mut ctx, inn, &narrowed);
                    }
                    _ => unreachable!("literals and constants are never mixed"),
                }
            }
            if !top.is_zero() {
                rects.push(Rectangle {
                    left: BoolFunc::constant(x1.clone(), true)?,
                    right: BoolFunc::from_table(x2.clone(), top)?,
                });
            }
            for (g, c) in ctx.into_iter().enumerate() {
                if let (Some(b), Side::Inside) = (c, side[g]) {
                    rects.push(Rectangle {
                        left: whole(&gf.funcs[g], &x1)?,
                        right: BoolFunc::from_table(x2.clone(), b)?,
                    });
                }
            }
        }
    }
    rects.retain(|r| !r.left.is_false() && !r.right.is_false());
    Ok(Cover {
        x1,
        x2,
        rectangles: rects,
    })
}

/// Brute-force check that the rectangles are pairwise disjoint and that
/// their union is `sat(f)`.
pub fn verify_cover(cover: &Cover, f: &BoolFunc) -> Result<CoverCheck> {
    let all = cover.x1.union(&cover.x2);
    let f = f.extend(&all)?;
    let mut union = TruthTable::zeros(all.len() as u32);
    let mut disjoint = true;
    for r in &cover.rectangles {
        let t = r.to_function()?.extend(&all)?;
        if union.intersects(t.table()) {
            disjoint = false;
        }
        union.or_assign(t.table());
    }
    Ok(CoverCheck {
        covers: &union == f.table(),
        disjoint,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::VarId;
    use crate::compile::{compile_dsnnf, compile_sdd};
    use crate::vtree::Vtree;

    #[test]
    fn conjunction_gives_one_rectangle() {
        let f = BoolFunc::var(VarId(0))
            .and(&BoolFunc::var(VarId(1)))
            .unwrap();
        let t = Vtree::balanced(&[VarId(0), VarId(1)]).unwrap();
        let form = compile_sdd(&f, &t).unwrap();
        let x = t.leaf_of(VarId(0)).unwrap();
        let c = extract_cover(&form, x).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.rectangles[0].left, BoolFunc::var(VarId(0)));
        assert_eq!(c.rectangles[0].right, BoolFunc::var(VarId(1)));
        assert!(verify_cover(&c, &f).unwrap().ok());
    }

    #[test]
    fn parity_splits_in_two() {
        let order: Vec<VarId> = (0..4).map(VarId).collect();
        let f = BoolFunc::from_index_fn(VarSet::range(4), |i| i.count_ones() % 2 == 1).unwrap();
        let t = Vtree::balanced(&order).unwrap();
        let left = t.children(t.root())[0];
        for form in [compile_dsnnf(&f, &t).unwrap(), compile_sdd(&f, &t).unwrap()] {
            let c = extract_cover(&form, left).unwrap();
            assert_eq!(c.len(), 2);
            assert!(verify_cover(&c, &f).unwrap().ok());
            assert!(c.len() <= form.size());
        }
    }

    #[test]
    fn every_node_of_a_random_function() {
        let f =
            BoolFunc::from_index_fn(VarSet::range(5), |i| (0x9b3c_71e5u64 >> i) & 1 == 1).unwrap();
        let order: Vec<VarId> = (0..5).map(VarId).collect();
        for t in [
            Vtree::balanced(&order).unwrap(),
            Vtree::linear(&order).unwrap(),
        ] {
            let form = compile_dsnnf(&f, &t).unwrap();
            for v in 0..t.len() {
                let c = extract_cover(&form, v).unwrap();
                assert!(verify_cover(&c, &f).unwrap().ok(), "node {v}");
                assert!(c.len() <= form.size());
            }
        }
    }

    #[test]
    fn missing_node_is_an_error() {
        let f = BoolFunc::var(VarId(0));
        let t = Vtree::leaf(VarId(0));
        let form = compile_dsnnf(&f, &t).unwrap();
        assert!(extract_cover(&form, 7).is_err());
    }
}
