use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Dense variable identifier. Names live in a [`Variables`] registry.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Debug for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

/// Ordered set of variables, always ascending and duplicate free.
#[derive(Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VarSet(Vec<VarId>);

impl VarSet {
    pub fn empty() -> Self {
        VarSet(Vec::new())
    }

    pub fn singleton(v: VarId) -> Self {
        VarSet(vec![v])
    }

    /// `0..n` as variable ids.
    pub fn range(n: u32) -> Self {
        VarSet((0..n).map(VarId).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, v: VarId) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// Rank of `v` inside the set, i.e. the bit it occupies in table indices.
    pub fn position(&self, v: VarId) -> Option<usize> {
        self.0.binary_search(&v).ok()
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = VarId> + '_ {
        self.0.iter().copied()
    }

    pub fn as_slice(&self) -> &[VarId] {
        &self.0
    }

    pub fn get(&self, i: usize) -> Option<VarId> {
        self.0.get(i).copied()
    }

    pub fn insert(&mut self, v: VarId) -> bool {
        match self.0.binary_search(&v) {
            Ok(_) => false,
            Err(pos) => {
                self.0.insert(pos, v);
                true
            }
        }
    }

    pub fn union(&self, other: &VarSet) -> VarSet {
        let mut out = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].cmp(&other.0[j]) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push(self.0[i]);
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        VarSet(out)
    }

    pub fn intersection(&self, other: &VarSet) -> VarSet {
        VarSet(self.iter().filter(|v| other.contains(*v)).collect())
    }

    pub fn difference(&self, other: &VarSet) -> VarSet {
        VarSet(self.iter().filter(|v| !other.contains(*v)).collect())
    }

    pub fn is_subset(&self, other: &VarSet) -> bool {
        self.iter().all(|v| other.contains(v))
    }

    pub fn is_disjoint(&self, other: &VarSet) -> bool {
        self.iter().all(|v| !other.contains(v))
    }

    /// Bitmask of the positions `self`'s variables occupy inside `outer`.
    pub fn mask_in(&self, outer: &VarSet) -> Result<u64> {
        let mut mask = 0u64;
        for v in self.iter() {
            let p = outer
                .position(v)
                .ok_or_else(|| Error::Domain(format!("{v:?} is not among {outer:?}")))?;
            mask |= 1u64 << p;
        }
        Ok(mask)
    }
}

impl FromIterator<VarId> for VarSet {
    fn from_iter<I: IntoIterator<Item = VarId>>(iter: I) -> Self {
        let mut v: Vec<VarId> = iter.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        VarSet(v)
    }
}

impl<'a> IntoIterator for &'a VarSet {
    type Item = VarId;
    type IntoIter = std::iter::Copied<std::slice::Iter<'a, VarId>>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter().copied()
    }
}

impl fmt::Debug for VarSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.iter()).finish()
    }
}

/// Name registry for variables. Ids are handed out densely in order of
/// first registration.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Variables {
    names: Vec<String>,
    index: HashMap<String, VarId>,
}

impl Variables {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registry holding `names` with ids `0..names.len()`.
    pub fn from_names<S: Into<String>>(names: impl IntoIterator<Item = S>) -> Result<Self> {
        let mut vars = Variables::new();
        for name in names {
            let name = name.into();
            if vars.lookup(&name).is_some() {
                return Err(Error::Domain(format!("duplicate variable name `{name}`")));
            }
            vars.intern(&name);
        }
        Ok(vars)
    }

    pub fn intern(&mut self, name: &str) -> VarId {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = VarId(self.names.len() as u32);
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    pub fn lookup(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, v: VarId) -> Option<&str> {
        self.names.get(v.index()).map(String::as_str)
    }

    /// Name of `v`, falling back to its numeric form.
    pub fn display(&self, v: VarId) -> String {
        self.name(v)
            .map(str::to_string)
            .unwrap_or_else(|| format!("v{}", v.0))
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn all(&self) -> VarSet {
        VarSet::range(self.names.len() as u32)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, &str)> {
        self.names
            .iter()
            .enumerate()
            .map(|(i, n)| (VarId(i as u32), n.as_str()))
    }
}

/// Total assignment over a variable set.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Assignment {
    domain: VarSet,
    values: Vec<bool>,
}

impl Assignment {
    pub fn empty() -> Self {
        Assignment {
            domain: VarSet::empty(),
            values: Vec::new(),
        }
    }

    pub fn new(pairs: impl IntoIterator<Item = (VarId, bool)>) -> Result<Self> {
        let mut pairs: Vec<(VarId, bool)> = pairs.into_iter().collect();
        pairs.sort_by_key(|p| p.0);
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::Domain("variable assigned twice".into()));
        }
        Ok(Assignment {
            domain: pairs.iter().map(|p| p.0).collect(),
            values: pairs.iter().map(|p| p.1).collect(),
        })
    }

    /// Assignment encoded by table index `index` over `domain`
    /// (variable at position `i` is bit `i`).
    pub fn from_index(domain: &VarSet, index: u64) -> Self {
        Assignment {
            domain: domain.clone(),
            values: (0..domain.len()).map(|i| (index >> i) & 1 == 1).collect(),
        }
    }

    pub fn domain(&self) -> &VarSet {
        &self.domain
    }

    pub fn get(&self, v: VarId) -> Result<bool> {
        self.domain
            .position(v)
            .map(|p| self.values[p])
            .ok_or(Error::MissingVar(v))
    }

    pub fn iter(&self) -> impl Iterator<Item = (VarId, bool)> + '_ {
        self.domain.iter().zip(self.values.iter().copied())
    }

    /// Table index of this assignment restricted to `vars` (which must be a
    /// subset of the domain).
    pub fn index_in(&self, vars: &VarSet) -> Result<u64> {
        let mut idx = 0u64;
        for (i, v) in vars.iter().enumerate() {
            if self.get(v)? {
                idx |= 1 << i;
            }
        }
        Ok(idx)
    }

    pub fn restrict(&self, vars: &VarSet) -> Result<Assignment> {
        Assignment::new(
            vars.iter()
                .map(|v| self.get(v).map(|b| (v, b)))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Union with an assignment over a disjoint domain.
    pub fn union(&self, other: &Assignment) -> Result<Assignment> {
        if !self.domain.is_disjoint(&other.domain) {
            return Err(Error::Domain(
                "union of assignments with overlapping domains".into(),
            ));
        }
        Assignment::new(self.iter().chain(other.iter()))
    }
}

impl fmt::Debug for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.iter().map(|(v, b)| (v, b as u8)))
            .finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn varset_is_sorted_and_deduplicated() {
        let s: VarSet = [VarId(3), VarId(1), VarId(3), VarId(2)]
            .into_iter()
            .collect();
        assert_eq!(s.as_slice(), &[VarId(1), VarId(2), VarId(3)]);
        assert_eq!(s.position(VarId(3)), Some(2));
    }

    #[test]
    fn set_algebra() {
        let a = VarSet::range(4);
        let b: VarSet = [VarId(2), VarId(5)].into_iter().collect();
        assert_eq!(a.union(&b).len(), 5);
        assert_eq!(a.intersection(&b).as_slice(), &[VarId(2)]);
        assert_eq!(a.difference(&b).len(), 3);
        assert!(!a.is_disjoint(&b));
        assert_eq!(b.mask_in(&a.union(&b)).unwrap(), 0b10100);
    }

    #[test]
    fn assignment_lookup_outside_domain_fails() {
        let a = Assignment::new([(VarId(0), true)]).unwrap();
        assert!(a.get(VarId(0)).unwrap());
        assert_eq!(a.get(VarId(1)), Err(Error::MissingVar(VarId(1))));
    }

    #[test]
    fn assignment_union_requires_disjoint_domains() {
        let a = Assignment::new([(VarId(0), true)]).unwrap();
        let b = Assignment::new([(VarId(1), false)]).unwrap();
        let c = Assignment::new([(VarId(2), true)]).unwrap();
        let ab_c = a.union(&b).unwrap().union(&c).unwrap();
        let a_bc = a.union(&b.union(&c).unwrap()).unwrap();
        assert_eq!(ab_c, a_bc);
        assert!(a.union(&a).is_err());
    }

    #[test]
    fn index_round_trip() {
        let d = VarSet::range(3);
        let a = Assignment::from_index(&d, 0b101);
        assert_eq!(a.index_in(&d).unwrap(), 0b101);
        assert!(a.get(VarId(0)).unwrap());
        assert!(!a.get(VarId(1)).unwrap());
    }
}
