use std::collections::HashMap;

use super::form::{CompiledForm, FormBuilder, FormKind, Node, NodeId};
use crate::boolfn::table::{deposit, extract};
use crate::boolfn::{BoolFunc, FactorPartition, VarSet};
use crate::error::{Error, Result};
use crate::vtree::{Label, VNodeId, Vtree};

/// Factor data of one vtree node.
pub(crate) struct NodeFactors {
    part: FactorPartition,
    /// Witness of each class as a global table index.
    witness: Vec<u64>,
    /// For two-child nodes: class at this node of each (left, right) class pair.
    pair_class: Vec<Vec<u32>>,
}

impl NodeFactors {
    pub fn len(&self) -> usize {
        self.part.len()
    }
}

/// Factor partitions at every node of `t` together with the pair tables
/// that decide implicant membership from one witness per class.
pub(crate) struct FactorTables {
    pub nodes: Vec<NodeFactors>,
}

impl FactorTables {
    pub fn new(f: &BoolFunc, t: &Vtree) -> Result<Self> {
        let mut nodes: Vec<Option<NodeFactors>> = (0..t.len()).map(|_| None).collect();
        for v in t.postorder() {
            let part = FactorPartition::compute(f, t.vars(v))?;
            let mask = part.domain().mask_in(f.vars())?;
            let witness: Vec<u64> = part
                .classes()
                .iter()
                .map(|c| deposit(c.witness, mask))
                .collect();
            let pair_class = match t.children(v) {
                [l, r] => {
                    let (nl, nr) = (nodes[*l].as_ref().unwrap(), nodes[*r].as_ref().unwrap());
                    nl.witness
                        .iter()
                        .map(|&wl| {
                            nr.witness
                                .iter()
                                .map(|&wr| {
                                    let local = extract(wl | wr, mask);
                                    part.class_of(local) as u32
                                })
                                .collect()
                        })
                        .collect()
                }
                _ => Vec::new(),
            };
            nodes[v] = Some(NodeFactors {
                part,
                witness,
                pair_class,
            });
        }
        Ok(FactorTables {
            nodes: nodes.into_iter().map(Option::unwrap).collect(),
        })
    }

    /// Class at the root whose cofactor is the constant 1, if `F` is satisfiable.
    pub fn root_target(&self, t: &Vtree) -> Option<usize> {
        let p = &self.nodes[t.root()].part;
        p.classes().iter().position(|c| c.cofactor.is_ones())
    }

    pub fn factor_count(&self, v: VNodeId) -> usize {
        self.nodes[v].len()
    }
}

fn check_vtree(f: &BoolFunc, t: &Vtree) -> Result<()> {
    if t.dummy_count() > 0 || t.all_vars() != f.vars() {
        return Err(Error::Vtree(
            "compilation needs a vtree over exactly the function's variables; prune it first"
                .into(),
        ));
    }
    Ok(())
}

fn constant_form(kind: FormKind, f: &BoolFunc, t: Option<&Vtree>, value: bool) -> CompiledForm {
    let mut b = FormBuilder::new();
    let root = b.add(Node::Const(value));
    b.finish(kind, t.cloned(), f.vars().clone(), root)
}

/// Compile to the canonical deterministic structured NNF of `f` over `t`.
pub fn compile_dsnnf(f: &BoolFunc, t: &Vtree) -> Result<CompiledForm> {
    check_vtree(f, t)?;
    let kind = FormKind::Dsnnf;
    if f.is_false() || f.is_true() {
        return Ok(constant_form(kind, f, Some(t), f.is_true()));
    }
    let tables = FactorTables::new(f, t)?;
    let mut c = Dsnnf {
        t,
        tables: &tables,
        b: FormBuilder::new(),
        memo: HashMap::new(),
    };
    let target = tables.root_target(t).expect("satisfiable");
    let root = c.build(t.root(), target);
    Ok(c.b.finish(kind, Some(t.clone()), f.vars().clone(), root))
}

struct Dsnnf<'a> {
    t: &'a Vtree,
    tables: &'a FactorTables,
    b: FormBuilder,
    memo: HashMap<(VNodeId, usize), NodeId>,
}

impl Dsnnf<'_> {
    fn build(&mut self, v: VNodeId, h: usize) -> NodeId {
        if let Some(&g) = self.memo.get(&(v, h)) {
            return g;
        }
        let node = self.t.node(v);
        let g = match (node.label(), node.children()) {
            (Some(Label::Var(x)), _) => {
                if self.tables.factor_count(v) == 1 {
                    self.b.add(Node::Const(true))
                } else {
                    // class 0 holds the witness x = 0
                    self.b.literal(x, h == 1)
                }
            }
            (_, [c]) => self.build(*c, h),
            (_, [l, r]) => {
                let (l, r) = (*l, *r);
                let pairs: Vec<(usize, usize)> = self.tables.nodes[v]
                    .pair_class
                    .iter()
                    .enumerate()
                    .flat_map(|(gl, row)| {
                        row.iter()
                            .enumerate()
                            .filter(move |&(_, &hc)| hc as usize == h)
                            .map(move |(gr, _)| (gl, gr))
                    })
                    .collect();
                let mut kids = Vec::with_capacity(pairs.len());
                for (gl, gr) in pairs {
                    let a = self.build(l, gl);
                    let b = self.build(r, gr);
                    kids.push(self.b.add(Node::And {
                        vnode: v,
                        parts: [a, b],
                    }));
                }
                self.b.add(Node::Or {
                    vnode: Some(v),
                    children: kids,
                })
            }
            _ => unreachable!("vtree leaves are labelled"),
        };
        self.memo.insert((v, h), g);
        g
    }
}

/// Compile to the canonical SDD of `f` over `t`.
pub fn compile_sdd(f: &BoolFunc, t: &Vtree) -> Result<CompiledForm> {
    check_vtree(f, t)?;
    let kind = FormKind::Sdd { canonical: true };
    if f.is_false() || f.is_true() {
        return Ok(constant_form(kind, f, Some(t), f.is_true()));
    }
    let tables = FactorTables::new(f, t)?;
    let mut c = Sdd {
        t,
        tables: &tables,
        b: FormBuilder::new(),
        memo: HashMap::new(),
    };
    let target = tables.root_target(t).expect("satisfiable") as u32;
    let root = c.build(t.root(), vec![target]);
    Ok(c.b.finish(kind, Some(t.clone()), f.vars().clone(), root))
}

struct Sdd<'a> {
    t: &'a Vtree,
    tables: &'a FactorTables,
    b: FormBuilder,
    memo: HashMap<(VNodeId, Vec<u32>), NodeId>,
}

impl Sdd<'_> {
    /// `hs` is a sorted set of factor indices at `v`.
    fn build(&mut self, v: VNodeId, hs: Vec<u32>) -> NodeId {
        if hs.is_empty() {
            return self.b.add(Node::Const(false));
        }
        if hs.len() == self.tables.factor_count(v) {
            return self.b.add(Node::Const(true));
        }
        if let Some(&g) = self.memo.get(&(v, hs.clone())) {
            return g;
        }
        let node = self.t.node(v);
        let g = match (node.label(), node.children()) {
            // two factors, one of them selected
            (Some(Label::Var(x)), _) => self.b.literal(x, hs[0] == 1),
            (_, [c]) => self.build(*c, hs.clone()),
            (_, [l, r]) => {
                let (l, r) = (*l, *r);
                let pc = &self.tables.nodes[v].pair_class;
                // group left factors by the set of right factors they pair into hs
                let mut groups: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
                for (gl, row) in pc.iter().enumerate() {
                    let subs: Vec<u32> = row
                        .iter()
                        .enumerate()
                        .filter(|(_, hc)| hs.binary_search(hc).is_ok())
                        .map(|(gr, _)| gr as u32)
                        .collect();
                    match groups.iter_mut().find(|(_, s)| *s == subs) {
                        Some((primes, _)) => primes.push(gl as u32),
                        None => groups.push((vec![gl as u32], subs)),
                    }
                }
                let mut kids = Vec::with_capacity(groups.len());
                for (primes, subs) in groups {
                    let p = self.build(l, primes);
                    let s = self.build(r, subs);
                    kids.push(self.b.add(Node::And {
                        vnode: v,
                        parts: [p, s],
                    }));
                }
                self.b.add(Node::Or {
                    vnode: Some(v),
                    children: kids,
                })
            }
            _ => unreachable!("vtree leaves are labelled"),
        };
        self.memo.insert((v, hs), g);
        g
    }
}

/// The factorized implicants of `h` (a factor of `f` relative to `y ∪ y2`):
/// all pairs of factors relative to `y` and `y2` whose product lies in `h`.
pub fn implicants(
    f: &BoolFunc,
    h: &BoolFunc,
    y: &VarSet,
    y2: &VarSet,
) -> Result<Vec<(BoolFunc, BoolFunc)>> {
    if !y.is_disjoint(y2) {
        return Err(Error::Domain("implicant blocks must be disjoint".into()));
    }
    let whole = FactorPartition::compute(f, &y.union(y2))?;
    let target = whole
        .find(h)
        .ok_or_else(|| Error::NotAFactor(format!("{h:?} is not a factor of the function")))?;
    let p1 = FactorPartition::compute(f, y)?;
    let p2 = FactorPartition::compute(f, y2)?;
    let m1 = p1.domain().mask_in(whole.domain())?;
    let m2 = p2.domain().mask_in(whole.domain())?;
    let mut out = Vec::new();
    for (i, c1) in p1.classes().iter().enumerate() {
        for (j, c2) in p2.classes().iter().enumerate() {
            let local = deposit(c1.witness, m1) | deposit(c2.witness, m2);
            if whole.class_of(local) == target {
                out.push((p1.characteristic(i), p2.characteristic(j)));
            }
        }
    }
    Ok(out)
}
