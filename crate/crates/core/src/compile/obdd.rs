use std::collections::HashMap;

use super::form::{CompiledForm, Node};
use crate::boolfn::{Assignment, VarId};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ObddRef {
    Leaf(bool),
    Node(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct ObddNode {
    level: u32,
    lo: ObddRef,
    hi: ObddRef,
}

/// Reduced ordered BDD: node `(level, lo, hi)` tests `order[level]`.
#[derive(Clone, Debug)]
pub struct Obdd {
    order: Vec<VarId>,
    nodes: Vec<ObddNode>,
    root: ObddRef,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
}

struct Manager {
    nodes: Vec<ObddNode>,
    unique: HashMap<ObddNode, u32>,
    apply_memo: HashMap<(Op, ObddRef, ObddRef), ObddRef>,
    not_memo: HashMap<ObddRef, ObddRef>,
}

impl Manager {
    fn mk(&mut self, level: u32, lo: ObddRef, hi: ObddRef) -> ObddRef {
        if lo == hi {
            return lo;
        }
        let n = ObddNode { level, lo, hi };
        if let Some(&id) = self.unique.get(&n) {
            return ObddRef::Node(id);
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(n);
        self.unique.insert(n, id);
        ObddRef::Node(id)
    }

    fn level(&self, r: ObddRef) -> u32 {
        match r {
            ObddRef::Leaf(_) => u32::MAX,
            ObddRef::Node(i) => self.nodes[i as usize].level,
        }
    }

    fn branch(&self, r: ObddRef, level: u32) -> (ObddRef, ObddRef) {
        match r {
            ObddRef::Node(i) if self.nodes[i as usize].level == level => {
                let n = self.nodes[i as usize];
                (n.lo, n.hi)
            }
            _ => (r, r),
        }
    }

    fn not(&mut self, a: ObddRef) -> ObddRef {
        if let ObddRef::Leaf(b) = a {
            return ObddRef::Leaf(!b);
        }
        if let Some(&r) = self.not_memo.get(&a) {
            return r;
        }
        let lvl = self.level(a);
        let (lo, hi) = self.branch(a, lvl);
        let (lo, hi) = (self.not(lo), self.not(hi));
        let r = self.mk(lvl, lo, hi);
        self.not_memo.insert(a, r);
        r
    }

    fn apply(&mut self, op: Op, a: ObddRef, b: ObddRef) -> ObddRef {
        use ObddRef::Leaf;
        match (op, a, b) {
            (Op::And, Leaf(false), _) | (Op::And, _, Leaf(false)) => return Leaf(false),
            (Op::Or, Leaf(true), _) | (Op::Or, _, Leaf(true)) => return Leaf(true),
            (Op::And, Leaf(true), x) | (Op::And, x, Leaf(true)) => return x,
            (Op::Or, Leaf(false), x) | (Op::Or, x, Leaf(false)) => return x,
            _ if a == b => return a,
            _ => {}
        }
        let key = (op, a, b);
        if let Some(&r) = self.apply_memo.get(&key) {
            return r;
        }
        let lvl = self.level(a).min(self.level(b));
        let (alo, ahi) = self.branch(a, lvl);
        let (blo, bhi) = self.branch(b, lvl);
        let lo = self.apply(op, alo, blo);
        let hi = self.apply(op, ahi, bhi);
        let r = self.mk(lvl, lo, hi);
        self.apply_memo.insert(key, r);
        r
    }
}

/// Turn a form over a linear vtree into the reduced OBDD for the vtree's
/// variable order.
pub fn obdd_export(form: &CompiledForm) -> Result<Obdd> {
    let order: Vec<VarId> = match form.vtree() {
        Some(t) if t.is_linear() => t.leaf_order(),
        Some(_) => return Err(Error::Vtree("OBDD export needs a linear vtree".into())),
        None => Vec::new(),
    };
    let level: HashMap<VarId, u32> = order
        .iter()
        .enumerate()
        .map(|(i, &x)| (x, i as u32))
        .collect();
    let mut m = Manager {
        nodes: Vec::new(),
        unique: HashMap::new(),
        apply_memo: HashMap::new(),
        not_memo: HashMap::new(),
    };
    let mut val: Vec<ObddRef> = Vec::with_capacity(form.size());
    for node in &form.nodes()[..=form.root()] {
        let r = match node {
            Node::Const(b) => ObddRef::Leaf(*b),
            Node::Input(x) => {
                let l = *level
                    .get(x)
                    .ok_or_else(|| Error::Form(format!("{x:?} is not in the vtree")))?;
                m.mk(l, ObddRef::Leaf(false), ObddRef::Leaf(true))
            }
            Node::Not(c) => m.not(val[*c]),
            Node::And { parts, .. } => m.apply(Op::And, val[parts[0]], val[parts[1]]),
            Node::Or { children, .. } => {
                let mut acc = ObddRef::Leaf(false);
                for &c in children {
                    acc = m.apply(Op::Or, acc, val[c]);
                }
                acc
            }
        };
        val.push(r);
    }
    Ok(Obdd::compact(order, &m.nodes, val[form.root()]))
}

impl Obdd {
    fn compact(order: Vec<VarId>, all: &[ObddNode], root: ObddRef) -> Obdd {
        let mut map: HashMap<u32, u32> = HashMap::new();
        let mut nodes = Vec::new();
        fn visit(
            r: ObddRef,
            all: &[ObddNode],
            map: &mut HashMap<u32, u32>,
            out: &mut Vec<ObddNode>,
        ) -> ObddRef {
            let ObddRef::Node(i) = r else { return r };
            if let Some(&j) = map.get(&i) {
                return ObddRef::Node(j);
            }
            let n = all[i as usize];
            let lo = visit(n.lo, all, map, out);
            let hi = visit(n.hi, all, map, out);
            let j = out.len() as u32;
            out.push(ObddNode {
                level: n.level,
                lo,
                hi,
            });
            map.insert(i, j);
            ObddRef::Node(j)
        }
        let root = visit(root, all, &mut map, &mut nodes);
        Obdd { order, nodes, root }
    }

    pub fn order(&self) -> &[VarId] {
        &self.order
    }

    pub fn root(&self) -> ObddRef {
        self.root
    }

    /// Number of decision nodes.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Decision nodes testing each variable of the order.
    pub fn level_widths(&self) -> Vec<usize> {
        let mut w = vec![0; self.order.len()];
        for n in &self.nodes {
            w[n.level as usize] += 1;
        }
        w
    }

    pub fn width(&self) -> usize {
        self.level_widths().into_iter().max().unwrap_or(0)
    }

    /// `(variable, low child, high child)` of a decision node.
    pub fn decision(&self, id: u32) -> (VarId, ObddRef, ObddRef) {
        let n = self.nodes[id as usize];
        (self.order[n.level as usize], n.lo, n.hi)
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        let mut cur = self.root;
        loop {
            match cur {
                ObddRef::Leaf(b) => return Ok(b),
                ObddRef::Node(i) => {
                    let n = self.nodes[i as usize];
                    cur = if a.get(self.order[n.level as usize])? {
                        n.hi
                    } else {
                        n.lo
                    };
                }
            }
        }
    }
}
