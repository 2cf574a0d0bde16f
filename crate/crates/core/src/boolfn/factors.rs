use std::collections::HashMap;

use super::func::{check_cap, BoolFunc};
use super::store::{FuncId, FunctionStore};
use super::table::{deposit, TruthTable};
use super::vars::{Assignment, VarSet};
use crate::error::Result;

/// One block of the factor partition: all assignments of the block
/// variables that induce the same cofactor.
#[derive(Clone, Debug)]
pub struct FactorClass {
    /// Smallest table index (over the block variables) in the class.
    pub witness: u64,
    pub size: u64,
    /// The induced cofactor, over the remaining variables of `F`.
    pub cofactor: TruthTable,
}

/// The partition of `{0,1}^{Y∩X}` by induced cofactor. Classes are numbered
/// in order of their smallest member.
#[derive(Clone, Debug)]
pub struct FactorPartition {
    domain: VarSet,
    rest: VarSet,
    classes: Vec<FactorClass>,
    class_of: Vec<u32>,
}

impl FactorPartition {
    pub fn compute(f: &BoolFunc, y: &VarSet) -> Result<Self> {
        let domain = y.intersection(f.vars());
        check_cap(domain.len())?;
        let rest = f.vars().difference(&domain);
        let mask = domain.mask_in(f.vars())?;
        let mut ids: HashMap<TruthTable, u32> = HashMap::new();
        let mut classes: Vec<FactorClass> = Vec::new();
        let mut class_of = Vec::with_capacity(1 << domain.len());
        for a in 0..(1u64 << domain.len()) {
            let cof = f.table().restrict(mask, deposit(a, mask));
            let next = classes.len() as u32;
            let id = *ids.entry(cof).or_insert(next);
            if id == next {
                let cofactor = f.table().restrict(mask, deposit(a, mask));
                classes.push(FactorClass {
                    witness: a,
                    size: 0,
                    cofactor,
                });
            }
            classes[id as usize].size += 1;
            class_of.push(id);
        }
        Ok(FactorPartition {
            domain,
            rest,
            classes,
            class_of,
        })
    }

    /// `Y ∩ X`, the variables the factors range over.
    pub fn domain(&self) -> &VarSet {
        &self.domain
    }

    /// `X ∖ Y`, the variables the cofactors range over.
    pub fn rest(&self) -> &VarSet {
        &self.rest
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[FactorClass] {
        &self.classes
    }

    /// Class of the block assignment with table index `idx`.
    pub fn class_of(&self, idx: u64) -> usize {
        self.class_of[idx as usize] as usize
    }

    /// Characteristic function of class `c` over the block variables.
    pub fn characteristic(&self, c: usize) -> BoolFunc {
        let n = self.domain.len() as u32;
        let t = TruthTable::from_fn(n, |i| self.class_of[i as usize] as usize == c);
        BoolFunc::from_table(self.domain.clone(), t).expect("arity matches")
    }

    pub fn cofactor(&self, c: usize) -> BoolFunc {
        BoolFunc::from_table(self.rest.clone(), self.classes[c].cofactor.clone())
            .expect("arity matches")
    }

    /// Index of the class whose characteristic function is `g`, if any.
    pub fn find(&self, g: &BoolFunc) -> Option<usize> {
        if g.vars() != &self.domain || g.is_false() {
            return None;
        }
        let c = self.class_of(g.table().first_one()?);
        (self.characteristic(c) == *g).then_some(c)
    }
}

/// A factor of `F` relative to `Y`, together with the cofactor it induces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    /// Characteristic function over `Y ∩ X`.
    pub func: BoolFunc,
    /// Interned id of the induced cofactor over `X ∖ Y`.
    pub cofactor: FuncId,
    /// Lexicographically least model of `func`.
    pub witness: Assignment,
}

/// All factors of `f` relative to `y`; variables of `y` outside `f` are ignored.
pub fn factors(f: &BoolFunc, y: &VarSet, store: &FunctionStore) -> Result<Vec<Factor>> {
    let part = FactorPartition::compute(f, y)?;
    Ok((0..part.len())
        .map(|c| Factor {
            func: store_round_trip(store, part.characteristic(c)),
            cofactor: store.intern(&part.cofactor(c)),
            witness: Assignment::from_index(part.domain(), part.classes()[c].witness),
        })
        .collect())
}

fn store_round_trip(store: &FunctionStore, f: BoolFunc) -> BoolFunc {
    let id = store.intern(&f);
    store.get(id).unwrap_or(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::VarId;
    use proptest::prelude::*;

    fn implication() -> BoolFunc {
        BoolFunc::var(VarId(0))
            .not()
            .or(&BoolFunc::var(VarId(1)))
            .unwrap()
    }

    #[test]
    fn factors_of_implication_relative_to_x() {
        let store = FunctionStore::new();
        let fs = factors(&implication(), &VarSet::singleton(VarId(0)), &store).unwrap();
        let funcs: Vec<BoolFunc> = fs.iter().map(|f| f.func.clone()).collect();
        assert_eq!(funcs.len(), 2);
        assert!(funcs.contains(&BoolFunc::var(VarId(0))));
        assert!(funcs.contains(&BoolFunc::var(VarId(0)).not()));
    }

    #[test]
    fn factors_relative_to_empty_set() {
        let store = FunctionStore::new();
        let fs = factors(&implication(), &VarSet::empty(), &store).unwrap();
        assert_eq!(fs.len(), 1);
        assert_eq!(fs[0].func, BoolFunc::top());
    }

    #[test]
    fn parity_prefix_has_two_factors() {
        let store = FunctionStore::new();
        let f = BoolFunc::from_index_fn(VarSet::range(4), |i| i.count_ones() % 2 == 1).unwrap();
        let y: VarSet = [VarId(0), VarId(1)].into_iter().collect();
        assert_eq!(factors(&f, &y, &store).unwrap().len(), 2);
    }

    #[test]
    fn foreign_variables_are_ignored() {
        let store = FunctionStore::new();
        let y: VarSet = [VarId(0), VarId(9)].into_iter().collect();
        let fs = factors(&implication(), &y, &store).unwrap();
        assert_eq!(fs[0].func.vars(), &VarSet::singleton(VarId(0)));
    }

    #[test]
    fn factors_differ_from_cofactors() {
        // relative to {x}: factors are x and ¬x, the cofactors over {y} are ⊤ and y
        let store = FunctionStore::new();
        let fs = factors(&implication(), &VarSet::singleton(VarId(0)), &store).unwrap();
        let cofs: Vec<BoolFunc> = fs.iter().map(|f| store.get(f.cofactor).unwrap()).collect();
        assert!(cofs.contains(&BoolFunc::var(VarId(1))));
        assert!(!cofs.contains(&BoolFunc::var(VarId(0))));
    }

    proptest! {
        #[test]
        fn factors_partition_the_block(bits in any::<u32>(), ymask in 0u32..32) {
            let f = BoolFunc::from_index_fn(VarSet::range(5), |i| (bits >> i) & 1 == 1).unwrap();
            let y: VarSet = (0..5).filter(|i| (ymask >> i) & 1 == 1).map(VarId).collect();
            let store = FunctionStore::new();
            let fs = factors(&f, &y, &store).unwrap();
            let total: u64 = fs.iter().map(|g| g.func.model_count()).sum();
            prop_assert_eq!(total, 1u64 << y.len());
            for (i, a) in fs.iter().enumerate() {
                for b in &fs[i + 1..] {
                    prop_assert!(!a.func.intersects(&b.func).unwrap());
                }
            }
            // one factor per distinct cofactor
            let mut cofs: Vec<FuncId> = fs.iter().map(|g| g.cofactor).collect();
            cofs.sort();
            cofs.dedup();
            prop_assert_eq!(cofs.len(), fs.len());
        }

        #[test]
        fn cofactor_composition(bits in any::<u32>(), a in 0u64..4, b in 0u64..4) {
            let f = BoolFunc::from_index_fn(VarSet::range(5), |i| (bits >> i) & 1 == 1).unwrap();
            let b1 = Assignment::new([(VarId(0), a & 1 == 1), (VarId(3), a & 2 == 2)]).unwrap();
            let b2 = Assignment::new([(VarId(1), b & 1 == 1), (VarId(4), b & 2 == 2)]).unwrap();
            let lhs = f.cofactor(&b1).unwrap().cofactor(&b2).unwrap();
            let rhs = f.cofactor(&b1.union(&b2).unwrap()).unwrap();
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn interning_matches_equivalence(x in any::<u16>(), y in any::<u16>()) {
            let store = FunctionStore::new();
            let f = BoolFunc::from_index_fn(VarSet::range(4), |i| (x >> i) & 1 == 1).unwrap();
            let g = BoolFunc::from_index_fn(VarSet::range(4), |i| (y >> i) & 1 == 1).unwrap();
            prop_assert_eq!(f.equivalent(&g).unwrap(), store.intern(&f) == store.intern(&g));
        }
    }
}
