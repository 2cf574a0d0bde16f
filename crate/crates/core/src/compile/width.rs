use serde::Serialize;

use super::construct::{compile_dsnnf, compile_sdd};
use super::form::CompiledForm;
use crate::boolfn::{BoolFunc, FactorPartition};
use crate::error::Result;
use crate::vtree::Vtree;

/// Per-vtree-node counts and their maximum.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct WidthReport {
    pub per_node: Vec<usize>,
    pub width: usize,
    /// Gate count of the compiled form, when one was built.
    pub size: Option<usize>,
}

impl WidthReport {
    fn from_counts(per_node: Vec<usize>, size: Option<usize>) -> Self {
        WidthReport {
            width: per_node.iter().copied().max().unwrap_or(0),
            per_node,
            size,
        }
    }
}

/// `|factors(F, Z_v)|` at every node. The vtree may carry dummy leaves and
/// variables `F` does not have; only `X_v ∩ F.vars` matters.
pub fn factor_width(f: &BoolFunc, t: &Vtree) -> Result<WidthReport> {
    let per_node = (0..t.len())
        .map(|v| FactorPartition::compute(f, t.vars(v)).map(|p| p.len()))
        .collect::<Result<Vec<_>>>()?;
    Ok(WidthReport::from_counts(per_node, None))
}

/// Structured And gates per node of an already compiled form.
pub fn structured_width(form: &CompiledForm) -> WidthReport {
    WidthReport::from_counts(form.and_counts(), Some(form.size()))
}

pub fn fiw(f: &BoolFunc, t: &Vtree) -> Result<WidthReport> {
    Ok(structured_width(&compile_dsnnf(f, t)?))
}

pub fn sdw(f: &BoolFunc, t: &Vtree) -> Result<WidthReport> {
    Ok(structured_width(&compile_sdd(f, t)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{VarId, VarSet};

    fn parity(n: u32) -> BoolFunc {
        BoolFunc::from_index_fn(VarSet::range(n), |i| i.count_ones() % 2 == 1).unwrap()
    }

    #[test]
    fn parity_has_factor_width_two() {
        let f = parity(4);
        let t = Vtree::balanced(&[VarId(2), VarId(0), VarId(3), VarId(1)]).unwrap();
        let r = factor_width(&f, &t).unwrap();
        assert_eq!(r.width, 2);
        for v in 0..t.len() {
            if v != t.root() {
                assert_eq!(r.per_node[v], 2);
            }
        }
        assert!(fiw(&f, &t).unwrap().width <= 4);
    }

    #[test]
    fn constants_have_width_one_and_no_ands() {
        let f = BoolFunc::constant(VarSet::range(2), true).unwrap();
        let t = Vtree::linear(&[VarId(0), VarId(1)]).unwrap();
        assert_eq!(factor_width(&f, &t).unwrap().width, 1);
        assert_eq!(fiw(&f, &t).unwrap().width, 0);
        assert_eq!(sdw(&f, &t).unwrap().width, 0);
    }

    #[test]
    fn implication_linear() {
        let f = BoolFunc::var(VarId(0))
            .not()
            .or(&BoolFunc::var(VarId(1)))
            .unwrap();
        let t = Vtree::linear(&[VarId(0), VarId(1)]).unwrap();
        let r = factor_width(&f, &t).unwrap();
        assert_eq!(r.width, 2);
        assert_eq!(r.per_node[t.leaf_of(VarId(0)).unwrap()], 2);
    }
}
