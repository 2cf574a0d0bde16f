use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use super::table::{deposit, submasks, TruthTable};
use super::vars::{Assignment, VarId, VarSet};
use crate::error::{Error, Result};

pub const DEFAULT_VAR_CAP: usize = 24;

static VAR_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_VAR_CAP);

/// Largest variable count for which exhaustive tables may be built.
pub fn var_cap() -> usize {
    VAR_CAP.load(Ordering::Relaxed)
}

/// Raise or lower the process-wide variable cap. Values above 32 are clamped.
pub fn set_var_cap(cap: usize) {
    VAR_CAP.store(cap.min(32), Ordering::Relaxed);
}

pub(crate) fn check_cap(needed: usize) -> Result<()> {
    let cap = var_cap();
    if needed > cap {
        Err(Error::Capacity { needed, cap })
    } else {
        Ok(())
    }
}

/// A Boolean function over an explicit variable set, stored as a full
/// truth table. Equality is bit-for-bit on `(vars, table)`.
#[derive(Clone)]
pub struct BoolFunc {
    vars: VarSet,
    table: Arc<TruthTable>,
}

impl PartialEq for BoolFunc {
    fn eq(&self, other: &Self) -> bool {
        self.vars == other.vars
            && (Arc::ptr_eq(&self.table, &other.table) || self.table == other.table)
    }
}

impl Eq for BoolFunc {}

impl Hash for BoolFunc {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.vars.hash(state);
        self.table.hash(state);
    }
}

impl BoolFunc {
    pub fn from_table(vars: VarSet, table: TruthTable) -> Result<Self> {
        if table.nvars() as usize != vars.len() {
            return Err(Error::Domain(format!(
                "table over {} variables for a set of {}",
                table.nvars(),
                vars.len()
            )));
        }
        Ok(BoolFunc {
            vars,
            table: Arc::new(table),
        })
    }

    /// Build from a predicate on table indices.
    pub fn from_index_fn(vars: VarSet, f: impl FnMut(u64) -> bool) -> Result<Self> {
        check_cap(vars.len())?;
        let n = vars.len() as u32;
        Ok(BoolFunc {
            vars,
            table: Arc::new(TruthTable::from_fn(n, f)),
        })
    }

    /// Build from a predicate on assignments.
    pub fn from_fn(vars: VarSet, mut f: impl FnMut(&Assignment) -> bool) -> Result<Self> {
        let domain = vars.clone();
        Self::from_index_fn(vars, |i| f(&Assignment::from_index(&domain, i)))
    }

    pub fn constant(vars: VarSet, value: bool) -> Result<Self> {
        check_cap(vars.len())?;
        let n = vars.len() as u32;
        let table = if value {
            TruthTable::ones(n)
        } else {
            TruthTable::zeros(n)
        };
        Ok(BoolFunc {
            vars,
            table: Arc::new(table),
        })
    }

    pub fn top() -> Self {
        BoolFunc {
            vars: VarSet::empty(),
            table: Arc::new(TruthTable::ones(0)),
        }
    }

    pub fn bottom() -> Self {
        BoolFunc {
            vars: VarSet::empty(),
            table: Arc::new(TruthTable::zeros(0)),
        }
    }

    /// The positive literal `x` as a function over `{x}`.
    pub fn var(x: VarId) -> Self {
        BoolFunc {
            vars: VarSet::singleton(x),
            table: Arc::new(TruthTable::projection(1, 0)),
        }
    }

    pub fn literal(x: VarId, positive: bool) -> Self {
        let f = Self::var(x);
        if positive {
            f
        } else {
            f.not()
        }
    }

    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn arity(&self) -> usize {
        self.vars.len()
    }

    pub fn table(&self) -> &TruthTable {
        &self.table
    }

    pub fn is_false(&self) -> bool {
        self.table.is_zero()
    }

    pub fn is_true(&self) -> bool {
        self.table.is_ones()
    }

    /// Value at table index `idx` (see the index convention in `table`).
    pub fn get(&self, idx: u64) -> bool {
        self.table.get(idx)
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        Ok(self.table.get(a.index_in(&self.vars)?))
    }

    pub fn not(&self) -> Self {
        BoolFunc {
            vars: self.vars.clone(),
            table: Arc::new(self.table.not()),
        }
    }

    /// Same function viewed over a superset of its variables.
    pub fn extend(&self, superset: &VarSet) -> Result<Self> {
        if !self.vars.is_subset(superset) {
            return Err(Error::Domain(format!(
                "{:?} is not a superset of {:?}",
                superset, self.vars
            )));
        }
        if superset.len() == self.vars.len() {
            return Ok(self.clone());
        }
        check_cap(superset.len())?;
        let positions: Vec<u32> = self
            .vars
            .iter()
            .map(|v| superset.position(v).unwrap() as u32)
            .collect();
        Ok(BoolFunc {
            vars: superset.clone(),
            table: Arc::new(self.table.lift(superset.len() as u32, &positions)),
        })
    }

    fn align(&self, other: &Self) -> Result<(VarSet, BoolFunc, BoolFunc)> {
        let vars = self.vars.union(&other.vars);
        Ok((vars.clone(), self.extend(&vars)?, other.extend(&vars)?))
    }

    pub fn and(&self, other: &Self) -> Result<Self> {
        let (vars, a, b) = self.align(other)?;
        Self::from_table(vars, a.table.and(&b.table))
    }

    pub fn or(&self, other: &Self) -> Result<Self> {
        let (vars, a, b) = self.align(other)?;
        Self::from_table(vars, a.table.or(&b.table))
    }

    pub fn implies(&self, other: &Self) -> Result<bool> {
        let (_, a, b) = self.align(other)?;
        Ok(!a.table.intersects(&b.table.not()))
    }

    /// Whether the two functions share a model once aligned.
    pub fn intersects(&self, other: &Self) -> Result<bool> {
        let (_, a, b) = self.align(other)?;
        Ok(a.table.intersects(&b.table))
    }

    /// Semantic equality. Callers must align the variable sets first.
    pub fn equivalent(&self, other: &Self) -> Result<bool> {
        if self.vars != other.vars {
            return Err(Error::Domain(format!(
                "equivalence over mismatched variable sets {:?} and {:?}",
                self.vars, other.vars
            )));
        }
        Ok(self.table == other.table)
    }

    /// Equality after extending both to the union of their variables.
    pub fn equivalent_aligned(&self, other: &Self) -> Result<bool> {
        let (_, a, b) = self.align(other)?;
        Ok(a.table == b.table)
    }

    pub fn model_count(&self) -> u64 {
        self.table.count_ones()
    }

    /// Table indices of the models, ascending.
    pub fn model_indices(&self) -> impl Iterator<Item = u64> + '_ {
        self.table.ones_iter()
    }

    pub fn models(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.table
            .ones_iter()
            .map(move |i| Assignment::from_index(&self.vars, i))
    }

    /// Whether the function depends on `x` (false when `x` is not a variable).
    pub fn depends_on(&self, x: VarId) -> bool {
        match self.vars.position(x) {
            None => false,
            Some(p) => {
                let bit = 1u64 << p;
                submasks(((1u64 << self.arity()) - 1) & !bit)
                    .any(|i| self.table.get(i) != self.table.get(i | bit))
            }
        }
    }

    /// The cofactor induced by `b`, over `vars ∖ dom(b)`.
    pub fn cofactor(&self, b: &Assignment) -> Result<BoolFunc> {
        if !b.domain().is_subset(&self.vars) {
            return Err(Error::Domain(format!(
                "cofactor by {:?} which is not within {:?}",
                b.domain(),
                self.vars
            )));
        }
        let fixed_mask = b.domain().mask_in(&self.vars)?;
        let fixed_bits = deposit(b.index_in(b.domain())?, fixed_mask);
        Ok(BoolFunc {
            vars: self.vars.difference(b.domain()),
            table: Arc::new(self.table.restrict(fixed_mask, fixed_bits)),
        })
    }
}

impl fmt::Debug for BoolFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BoolFunc({:?}, {:?})", self.vars, self.table)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x() -> VarId {
        VarId(0)
    }
    fn y() -> VarId {
        VarId(1)
    }

    pub(crate) fn implication() -> BoolFunc {
        BoolFunc::var(x()).not().or(&BoolFunc::var(y())).unwrap()
    }

    fn parity(n: u32) -> BoolFunc {
        BoolFunc::from_index_fn(VarSet::range(n), |i| i.count_ones() % 2 == 1).unwrap()
    }

    #[test]
    fn eval_implication() {
        let f = implication();
        let a = Assignment::new([(x(), true), (y(), false)]).unwrap();
        assert!(!f.eval(&a).unwrap());
        assert_eq!(f.model_count(), 3);
    }

    #[test]
    fn eval_constant_over_empty_set() {
        assert!(BoolFunc::top().eval(&Assignment::empty()).unwrap());
    }

    #[test]
    fn eval_parity() {
        let f = parity(3);
        let a = Assignment::new([(VarId(0), true), (VarId(1), true), (VarId(2), false)]).unwrap();
        assert!(!f.eval(&a).unwrap());
    }

    #[test]
    fn eval_missing_variable_is_an_error() {
        let f = implication();
        let a = Assignment::new([(x(), true)]).unwrap();
        assert_eq!(f.eval(&a), Err(Error::MissingVar(y())));
    }

    #[test]
    fn cofactors_of_implication() {
        let f = implication();
        let c = f
            .cofactor(&Assignment::new([(x(), false)]).unwrap())
            .unwrap();
        assert_eq!(c, BoolFunc::constant(VarSet::singleton(y()), true).unwrap());
        let c = f
            .cofactor(&Assignment::new([(y(), false)]).unwrap())
            .unwrap();
        assert_eq!(c, BoolFunc::var(x()).not());
        assert_eq!(f.cofactor(&Assignment::empty()).unwrap(), f);
    }

    #[test]
    fn cofactor_outside_domain_fails() {
        let f = implication();
        let b = Assignment::new([(VarId(7), true)]).unwrap();
        assert!(matches!(f.cofactor(&b), Err(Error::Domain(_))));
    }

    #[test]
    fn equivalence_and_counts() {
        let a = BoolFunc::var(x()).and(&BoolFunc::var(y())).unwrap();
        let b = BoolFunc::var(y()).and(&BoolFunc::var(x())).unwrap();
        assert!(a.equivalent(&b).unwrap());
        let bot = BoolFunc::constant(VarSet::singleton(x()), false).unwrap();
        assert_eq!(bot.model_count(), 0);
        assert!(a.equivalent(&BoolFunc::var(x())).is_err());
    }

    #[test]
    fn extend_keeps_semantics() {
        let f = implication();
        let big = VarSet::range(4);
        let g = f.extend(&big).unwrap();
        assert_eq!(g.model_count(), 12);
        for idx in 0..16u64 {
            let a = Assignment::from_index(&big, idx);
            assert_eq!(g.eval(&a).unwrap(), f.eval(&a).unwrap());
        }
    }

    #[test]
    fn capacity_is_enforced() {
        let r = BoolFunc::constant(VarSet::range(40), true);
        assert!(matches!(r, Err(Error::Capacity { .. })));
    }

    #[test]
    fn depends_on_detects_support() {
        let f = BoolFunc::var(x()).extend(&VarSet::range(3)).unwrap();
        assert!(f.depends_on(x()));
        assert!(!f.depends_on(VarId(2)));
        assert!(!f.depends_on(VarId(9)));
    }
}
