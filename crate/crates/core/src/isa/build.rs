use std::collections::BTreeMap;

use super::convention::{decode, encode, IsaParams};
use crate::boolfn::{BoolFunc, VarSet, Variables};
use crate::compile::{CompiledForm, FormBuilder, FormKind, Node, NodeId};
use crate::error::Result;
use crate::vtree::{VNodeId, Vtree};

/// The indirect storage function over `y_1..y_k, z_1..z_{2^m}`.
pub fn isa_function(p: IsaParams) -> Result<BoolFunc> {
    let n = p.n();
    BoolFunc::from_index_fn(VarSet::range(n), |idx| {
        let bit = |x: crate::boolfn::VarId| (idx >> x.0) & 1 == 1;
        let i = decode((1..=p.k).map(|t| bit(p.y(t)))) + 1;
        let j = decode((1..=p.m).map(|t| bit(p.z(p.block_index(i, t))))) + 1;
        bit(p.z(j))
    })
}

/// A conjunction of literals on `Z`, keyed by the 1-based `z` index.
type Term = BTreeMap<u32, bool>;

/// What an element at `v_{2^m}` leaves to `z_{2^m}`.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Sub {
    Bot,
    Top,
    Pos,
    Neg,
}

impl Sub {
    /// The sub whose value at `z_{2^m} = 0` is `lo` and at `z_{2^m} = 1` is `hi`.
    fn from_values(lo: bool, hi: bool) -> Sub {
        match (lo, hi) {
            (false, false) => Sub::Bot,
            (false, true) => Sub::Pos,
            (true, false) => Sub::Neg,
            (true, true) => Sub::Top,
        }
    }
}

struct Builder {
    p: IsaParams,
    b: FormBuilder,
    /// `v_j` for `j >= 2`, indexed by `j`.
    v: Vec<VNodeId>,
    /// `w_i`, indexed by `i`.
    w: Vec<VNodeId>,
}

impl Builder {
    fn new(p: IsaParams, t: &Vtree) -> Self {
        let parent_of = |x| {
            t.node(t.leaf_of(x).expect("leaf"))
                .parent()
                .expect("not the root")
        };
        let mut v = vec![usize::MAX; p.z_count() as usize + 1];
        for j in 2..=p.z_count() {
            v[j as usize] = parent_of(p.z(j));
        }
        let mut w = vec![usize::MAX; p.k as usize + 1];
        for i in 1..=p.k {
            w[i as usize] = parent_of(p.y(i));
        }
        Builder {
            p,
            b: FormBuilder::new(),
            v,
            w,
        }
    }

    fn zlit(&mut self, j: u32, positive: bool) -> NodeId {
        self.b.literal(self.p.z(j), positive)
    }

    /// A term as a decision at the node of its last variable: the prefix
    /// matching the term leads to the last literal, every other prefix to ⊥.
    fn term(&mut self, t: &Term) -> NodeId {
        let Some((&last, &value)) = t.iter().next_back() else {
            return self.b.add(Node::Const(true));
        };
        if t.len() == 1 {
            return self.zlit(last, value);
        }
        let prefix: Vec<(u32, bool)> = t.iter().take(t.len() - 1).map(|(&j, &c)| (j, c)).collect();
        let vnode = self.v[last as usize];
        let bot = self.b.add(Node::Const(false));
        let lit = self.zlit(last, value);
        let mut elems = Vec::with_capacity(1 << prefix.len());
        for bits in 0..1u32 << prefix.len() {
            let other: Term = prefix
                .iter()
                .enumerate()
                .map(|(s, &(j, _))| (j, (bits >> s) & 1 == 1))
                .collect();
            let matches = prefix.iter().all(|(j, c)| other[j] == *c);
            let prime = self.term(&other);
            let sub = if matches { lit } else { bot };
            elems.push(self.b.add(Node::And {
                vnode,
                parts: [prime, sub],
            }));
        }
        self.b.add(Node::Or {
            vnode: Some(vnode),
            children: elems,
        })
    }

    /// Elements of the decision at `v_{2^m}` for the cofactor with `y`
    /// selecting block `i`.
    fn elements(&self, i: u32) -> Vec<(Term, Sub)> {
        let p = self.p;
        let (m, last) = (p.m, p.z_count());
        let block: Vec<u32> = (1..=m).map(|t| p.block_index(i, t)).collect();
        let mut out = Vec::new();
        if i == p.blocks() {
            // the block ends in z_{2^m}; fix its first m-1 bits
            for a in 0..1u32 << (m - 1) {
                let base: Term = block[..m as usize - 1]
                    .iter()
                    .copied()
                    .zip(encode(a, m - 1))
                    .collect();
                let (j0, j1) = (2 * a + 1, 2 * a + 2);
                let free: Vec<u32> = [j0, j1]
                    .into_iter()
                    .filter(|j| *j != last && !base.contains_key(j))
                    .collect();
                for bits in 0..1u32 << free.len() {
                    let mut t = base.clone();
                    for (s, &j) in free.iter().enumerate() {
                        t.insert(j, (bits >> s) & 1 == 1);
                    }
                    let lo = t[&j0];
                    let hi = if j1 == last { true } else { t[&j1] };
                    out.push((t, Sub::from_values(lo, hi)));
                }
            }
        } else {
            for b in 0..1u32 << m {
                let t: Term = block.iter().copied().zip(encode(b, m)).collect();
                let j = b + 1;
                if j == last {
                    out.push((t, Sub::Pos));
                } else if let Some(&c) = t.get(&j) {
                    out.push((t, if c { Sub::Top } else { Sub::Bot }));
                } else {
                    for c in [false, true] {
                        let mut t = t.clone();
                        t.insert(j, c);
                        out.push((t, if c { Sub::Top } else { Sub::Bot }));
                    }
                }
            }
        }
        out
    }

    fn cofactor(&mut self, i: u32) -> NodeId {
        let last = self.p.z_count();
        let vnode = self.v[last as usize];
        let mut elems = Vec::new();
        for (t, sub) in self.elements(i) {
            let prime = self.term(&t);
            let s = match sub {
                Sub::Bot => self.b.add(Node::Const(false)),
                Sub::Top => self.b.add(Node::Const(true)),
                Sub::Pos => self.zlit(last, true),
                Sub::Neg => self.zlit(last, false),
            };
            elems.push(self.b.add(Node::And {
                vnode,
                parts: [prime, s],
            }));
        }
        self.b.add(Node::Or {
            vnode: Some(vnode),
            children: elems,
        })
    }

    /// Unreduced decision tree over `y_level..y_k` below the fixed prefix.
    fn upper(&mut self, level: u32, prefix: &mut Vec<bool>) -> NodeId {
        if level > self.p.k {
            return self.cofactor(decode(prefix.iter().copied()) + 1);
        }
        let vnode = self.w[level as usize];
        let mut elems = Vec::with_capacity(2);
        for c in [true, false] {
            prefix.push(c);
            let sub = self.upper(level + 1, prefix);
            prefix.pop();
            let lit = self.b.literal(self.p.y(level), c);
            elems.push(self.b.add(Node::And {
                vnode,
                parts: [lit, sub],
            }));
        }
        self.b.add(Node::Or {
            vnode: Some(vnode),
            children: elems,
        })
    }
}

/// An SDD for the indirect storage function over [`Vtree::isa`]. Primes at
/// the `v_j` nodes are terms on at most `m + 1` variables.
pub fn isa_sdd(p: IsaParams) -> Result<CompiledForm> {
    let t = Vtree::isa(p.k, p.m)?;
    let mut bld = Builder::new(p, &t);
    let root = bld.upper(1, &mut Vec::new());
    let mut form = bld.b.finish(
        FormKind::Sdd { canonical: false },
        Some(t),
        VarSet::range(p.n()),
        root,
    );
    form.set_names(Variables::from_names(p.names())?)?;
    Ok(form)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::Assignment;

    #[test]
    fn worked_value_at_n5() {
        // y1 = 0 selects block 1 = (z1, z2) = (1, 0), which encodes 2, so z3 is read
        let p = IsaParams::new(1, 2).unwrap();
        let f = isa_function(p).unwrap();
        let a = |z3| {
            Assignment::new([
                (p.y(1), false),
                (p.z(1), true),
                (p.z(2), false),
                (p.z(3), z3),
                (p.z(4), false),
            ])
            .unwrap()
        };
        assert!(!f.eval(&a(false)).unwrap());
        assert!(f.eval(&a(true)).unwrap());
    }

    #[test]
    fn constant_storage() {
        let p = IsaParams::new(1, 2).unwrap();
        let f = isa_function(p).unwrap();
        let zmask: u64 = (1..=4).map(|j| 1u64 << p.z(j).0).sum();
        for y in 0..2u64 {
            assert!(!f.get(y));
            assert!(f.get(y | zmask));
        }
    }

    #[test]
    fn small_instance_is_equivalent() {
        let p = IsaParams::new(1, 2).unwrap();
        let form = isa_sdd(p).unwrap();
        assert_eq!(form.to_function().unwrap(), isa_function(p).unwrap());
    }

    #[test]
    fn all_ones_elements_have_forced_cases_merged() {
        // with y = 1..1 and a = 1..1 the pair (z_{2^m - 1}, z_{2^m}) lies in the block
        let p = IsaParams::new(2, 4).unwrap();
        let t = Vtree::isa(2, 4).unwrap();
        let b = Builder::new(p, &t);
        let els = b.elements(4);
        let tail: Vec<_> = els
            .iter()
            .filter(|(t, _)| t.get(&13) == Some(&true) && t.get(&14) == Some(&true))
            .collect();
        assert_eq!(tail.len(), 2);
        assert!(tail.iter().all(|(t, _)| t.len() == 3));
        assert!(els.iter().all(|(t, _)| t.len() <= p.m as usize + 1));
    }
}
