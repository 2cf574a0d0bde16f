//! Vtrees: rooted ordered trees whose leaves carry variables.
//!
//! Internal nodes have one or two children. Leaves are labelled either by a
//! real variable or by a dummy label that stands for a variable the
//! function does not mention.

mod io;

use std::collections::HashMap;

use crate::boolfn::{VarId, VarSet};
use crate::circuit::{Circuit, Gate};
use crate::error::{Error, Result};
use crate::treedec::{NiceKind, NiceTreeDecomposition};

pub(crate) use io::parse_vtree_lines;
pub use io::{parse_vtree, write_vtree};

pub type VNodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Var(VarId),
    Dummy(u32),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VNode {
    label: Option<Label>,
    children: Vec<VNodeId>,
    parent: Option<VNodeId>,
    vars: VarSet,
    dummies: usize,
}

impl VNode {
    pub fn label(&self) -> Option<Label> {
        self.label
    }

    pub fn children(&self) -> &[VNodeId] {
        &self.children
    }

    pub fn parent(&self) -> Option<VNodeId> {
        self.parent
    }

    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }

    /// Real variables below this node.
    pub fn vars(&self) -> &VarSet {
        &self.vars
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Vtree {
    nodes: Vec<VNode>,
    root: VNodeId,
}

/// Assembles a vtree bottom-up.
#[derive(Default)]
pub struct VtreeBuilder {
    nodes: Vec<(Option<Label>, Vec<VNodeId>)>,
}

impl VtreeBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn leaf(&mut self, x: VarId) -> VNodeId {
        self.nodes.push((Some(Label::Var(x)), Vec::new()));
        self.nodes.len() - 1
    }

    pub fn dummy(&mut self, tag: u32) -> VNodeId {
        self.nodes.push((Some(Label::Dummy(tag)), Vec::new()));
        self.nodes.len() - 1
    }

    pub fn node(&mut self, left: VNodeId, right: VNodeId) -> VNodeId {
        self.nodes.push((None, vec![left, right]));
        self.nodes.len() - 1
    }

    pub fn unary(&mut self, child: VNodeId) -> VNodeId {
        self.nodes.push((None, vec![child]));
        self.nodes.len() - 1
    }

    /// Validate and finish. Nodes not reachable from `root` are an error.
    pub fn build(self, root: VNodeId) -> Result<Vtree> {
        let n = self.nodes.len();
        if root >= n {
            return Err(Error::Vtree("root does not exist".into()));
        }
        let mut parent: Vec<Option<VNodeId>> = vec![None; n];
        for (i, (label, ch)) in self.nodes.iter().enumerate() {
            if label.is_some() != ch.is_empty() || ch.len() > 2 {
                return Err(Error::Vtree(format!(
                    "node {i} must be a labelled leaf or have 1-2 children"
                )));
            }
            for &c in ch {
                if c >= i || parent[c].is_some() || c == root {
                    return Err(Error::Vtree(format!(
                        "node {c} has several parents or is missing"
                    )));
                }
                parent[c] = Some(i);
            }
        }
        let mut labels: HashMap<Label, VNodeId> = HashMap::new();
        let mut nodes: Vec<VNode> = Vec::with_capacity(n);
        for (i, (label, ch)) in self.nodes.into_iter().enumerate() {
            if let Some(l) = label {
                if labels.insert(l, i).is_some() {
                    return Err(Error::Vtree(format!("label {l:?} used twice")));
                }
            }
            nodes.push(VNode {
                label,
                children: ch,
                parent: parent[i],
                vars: VarSet::empty(),
                dummies: 0,
            });
        }
        let mut t = Vtree { nodes, root };
        let order = t.postorder();
        if order.len() != n {
            return Err(Error::Vtree("some nodes are not below the root".into()));
        }
        for v in order {
            let (vars, dummies) = match t.nodes[v].label {
                Some(Label::Var(x)) => (VarSet::singleton(x), 0),
                Some(Label::Dummy(_)) => (VarSet::empty(), 1),
                None => t.nodes[v]
                    .children
                    .iter()
                    .fold((VarSet::empty(), 0), |(acc, d), &c| {
                        (acc.union(&t.nodes[c].vars), d + t.nodes[c].dummies)
                    }),
            };
            if let [l, r] = t.nodes[v].children[..] {
                if !t.nodes[l].vars.is_disjoint(&t.nodes[r].vars) {
                    return Err(Error::Vtree(format!(
                        "children of node {v} share variables"
                    )));
                }
            }
            t.nodes[v].vars = vars;
            t.nodes[v].dummies = dummies;
        }
        Ok(t)
    }
}

impl Vtree {
    pub fn leaf(x: VarId) -> Vtree {
        let mut b = VtreeBuilder::new();
        let l = b.leaf(x);
        b.build(l).expect("single leaf")
    }

    /// Right-linear vtree whose left leaves follow `order`.
    pub fn linear(order: &[VarId]) -> Result<Vtree> {
        if order.is_empty() {
            return Err(Error::Vtree("linear vtree over no variables".into()));
        }
        let mut b = VtreeBuilder::new();
        let mut cur = b.leaf(*order.last().unwrap());
        for &x in order[..order.len() - 1].iter().rev() {
            let l = b.leaf(x);
            cur = b.node(l, cur);
        }
        b.build(cur)
    }

    /// Balanced vtree with leaves in the given order.
    pub fn balanced(order: &[VarId]) -> Result<Vtree> {
        fn go(b: &mut VtreeBuilder, xs: &[VarId]) -> VNodeId {
            if xs.len() == 1 {
                return b.leaf(xs[0]);
            }
            let mid = xs.len() / 2;
            let l = go(b, &xs[..mid]);
            let r = go(b, &xs[mid..]);
            b.node(l, r)
        }
        if order.is_empty() {
            return Err(Error::Vtree("balanced vtree over no variables".into()));
        }
        let mut b = VtreeBuilder::new();
        let root = go(&mut b, order);
        b.build(root)
    }

    /// The tree of the vtree-from-decomposition construction: the shape of
    /// `ntd`, a dummy leaf on every decomposition leaf, and a real leaf for
    /// each input gate hung as the left child of the node forgetting it.
    pub fn from_nice_td(ntd: &NiceTreeDecomposition, inputs: &[(usize, VarId)]) -> Result<Vtree> {
        let mut attach: HashMap<usize, VarId> = HashMap::new();
        for &(gate, x) in inputs {
            let t = ntd
                .forget_node(gate)
                .ok_or_else(|| Error::Vtree(format!("input gate {gate} is never forgotten")))?;
            attach.insert(t, x);
        }
        let mut b = VtreeBuilder::new();
        let mut made: Vec<VNodeId> = vec![usize::MAX; ntd.len()];
        for t in ntd.postorder() {
            let node = ntd.node(t);
            let kids: Vec<VNodeId> = node.children.iter().map(|&c| made[c]).collect();
            let mut id = match (node.kind, kids.as_slice()) {
                (NiceKind::Leaf, _) => b.dummy(t as u32),
                (_, [c]) => *c,
                (_, [l, r]) => b.node(*l, *r),
                _ => return Err(Error::Vtree(format!("decomposition node {t} is malformed"))),
            };
            if let Some(&x) = attach.get(&t) {
                let leaf = b.leaf(x);
                id = b.node(leaf, id);
            } else if kids.len() == 1 {
                id = b.unary(id);
            }
            made[t] = id;
        }
        b.build(made[ntd.root()])
    }

    /// Derived vtree for a circuit from a nice decomposition of its graph.
    pub fn from_circuit_td(c: &Circuit, ntd: &NiceTreeDecomposition) -> Result<Vtree> {
        let inputs: Vec<(usize, VarId)> = c
            .gates()
            .iter()
            .enumerate()
            .filter_map(|(g, gate)| match gate {
                Gate::Input(x) => Some((g, *x)),
                _ => None,
            })
            .collect();
        Self::from_nice_td(ntd, &inputs)
    }

    pub fn root(&self) -> VNodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn node(&self, v: VNodeId) -> &VNode {
        &self.nodes[v]
    }

    pub fn nodes(&self) -> &[VNode] {
        &self.nodes
    }

    pub fn children(&self, v: VNodeId) -> &[VNodeId] {
        &self.nodes[v].children
    }

    /// `X_v`, the real variables below `v`.
    pub fn vars(&self, v: VNodeId) -> &VarSet {
        &self.nodes[v].vars
    }

    pub fn all_vars(&self) -> &VarSet {
        &self.nodes[self.root].vars
    }

    pub fn dummy_count(&self) -> usize {
        self.nodes[self.root].dummies
    }

    pub fn leaf_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_leaf()).count()
    }

    pub fn leaf_of(&self, x: VarId) -> Option<VNodeId> {
        self.nodes
            .iter()
            .position(|n| n.label == Some(Label::Var(x)))
    }

    /// Children before parents, left before right.
    pub fn postorder(&self) -> Vec<VNodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((v, expanded)) = stack.pop() {
            if expanded {
                out.push(v);
            } else {
                stack.push((v, true));
                for &c in self.nodes[v].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Real leaf variables from left to right.
    pub fn leaf_order(&self) -> Vec<VarId> {
        self.postorder()
            .into_iter()
            .filter_map(|v| match self.nodes[v].label {
                Some(Label::Var(x)) => Some(x),
                _ => None,
            })
            .collect()
    }

    /// Every internal node has two children and a leaf as left child.
    pub fn is_linear(&self) -> bool {
        self.nodes.iter().all(|n| match n.children[..] {
            [] => true,
            [l, _] => self.nodes[l].is_leaf(),
            _ => false,
        })
    }

    pub fn is_ancestor(&self, anc: VNodeId, mut v: VNodeId) -> bool {
        loop {
            if v == anc {
                return true;
            }
            match self.nodes[v].parent {
                Some(p) => v = p,
                None => return false,
            }
        }
    }

    /// Restrict to the variables `x`: other leaves go away and unary chains
    /// are contracted. Also returns, per new node, the node it came from.
    pub fn prune_with_origin(&self, x: &VarSet) -> Result<(Vtree, Vec<VNodeId>)> {
        if x.is_empty() {
            return Err(Error::Vtree(
                "cannot restrict a vtree to no variables".into(),
            ));
        }
        if !x.is_subset(self.all_vars()) {
            return Err(Error::Vtree(format!(
                "variables {:?} are not leaves of the vtree",
                x.difference(self.all_vars())
            )));
        }
        let mut b = VtreeBuilder::new();
        let mut origin = Vec::new();
        let mut made: Vec<Option<VNodeId>> = vec![None; self.nodes.len()];
        for v in self.postorder() {
            let n = &self.nodes[v];
            made[v] = match n.label {
                Some(Label::Var(y)) if x.contains(y) => {
                    origin.push(v);
                    Some(b.leaf(y))
                }
                Some(_) => None,
                None => {
                    let kids: Vec<VNodeId> = n.children.iter().filter_map(|&c| made[c]).collect();
                    match kids[..] {
                        [] => None,
                        [c] => Some(c),
                        [l, r] => {
                            origin.push(v);
                            Some(b.node(l, r))
                        }
                        _ => unreachable!(),
                    }
                }
            };
        }
        let root = made[self.root].expect("x is non-empty");
        Ok((b.build(root)?, origin))
    }

    pub fn prune_to(&self, x: &VarSet) -> Result<Vtree> {
        self.prune_with_origin(x).map(|(t, _)| t)
    }

    /// The vtree used for the indirect-storage construction: a right-linear
    /// spine `w_1..w_k` with left leaves `y_1..y_k` whose last right child is
    /// a left-linear tree `v_{2^m}` over `z_1..z_{2^m}`. Variables are
    /// `y_i = VarId(i-1)` and `z_j = VarId(k+j-1)`.
    pub fn isa(k: u32, m: u32) -> Result<Vtree> {
        if m == 0 || m > 5 || (1u64 << k) * m as u64 != 1u64 << m {
            return Err(Error::Params(format!(
                "need 2^k * m = 2^m, got k={k}, m={m}"
            )));
        }
        let nz = 1u32 << m;
        let mut b = VtreeBuilder::new();
        let mut v = b.leaf(VarId(k));
        for j in 2..=nz {
            let z = b.leaf(VarId(k + j - 1));
            v = b.node(v, z);
        }
        let mut cur = v;
        for i in (0..k).rev() {
            let y = b.leaf(VarId(i));
            cur = b.node(y, cur);
        }
        b.build(cur)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::treedec::{make_nice, min_fill_decompose};

    fn ids(xs: &[u32]) -> Vec<VarId> {
        xs.iter().map(|&i| VarId(i)).collect()
    }

    #[test]
    fn linear_shapes() {
        let t = Vtree::linear(&ids(&[0])).unwrap();
        assert_eq!(t.len(), 1);
        let t = Vtree::linear(&ids(&[0, 1])).unwrap();
        let r = t.root();
        assert_eq!(t.node(t.children(r)[0]).label(), Some(Label::Var(VarId(0))));
        assert_eq!(t.node(t.children(r)[1]).label(), Some(Label::Var(VarId(1))));
        let t = Vtree::linear(&ids(&[0, 1, 2, 3])).unwrap();
        assert_eq!(t.len() - t.leaf_count(), 3);
        assert!(t.is_linear());
        assert_eq!(t.leaf_order(), ids(&[0, 1, 2, 3]));
        assert!(Vtree::linear(&ids(&[0, 0])).is_err());
    }

    #[test]
    fn builder_rejects_overlap() {
        let mut b = VtreeBuilder::new();
        let a = b.leaf(VarId(0));
        let c = b.leaf(VarId(0));
        let r = b.node(a, c);
        assert!(b.build(r).is_err());
    }

    #[test]
    fn prune_drops_dummies() {
        let mut b = VtreeBuilder::new();
        let d = b.dummy(0);
        let x = b.leaf(VarId(0));
        let r = b.node(d, x);
        let t = b.build(r).unwrap();
        let p = t.prune_to(&VarSet::singleton(VarId(0))).unwrap();
        assert_eq!(p, Vtree::leaf(VarId(0)));
        let full = Vtree::balanced(&ids(&[0, 1, 2])).unwrap();
        assert_eq!(full.prune_to(full.all_vars()).unwrap(), full);
        assert!(full.prune_to(&VarSet::empty()).is_err());
    }

    #[test]
    fn prune_origins_keep_variable_blocks() {
        let mut b = VtreeBuilder::new();
        let d1 = b.dummy(1);
        let x = b.leaf(VarId(0));
        let u = b.unary(x);
        let n1 = b.node(d1, u);
        let y = b.leaf(VarId(1));
        let r = b.node(n1, y);
        let t = b.build(r).unwrap();
        let (p, origin) = t.prune_with_origin(t.all_vars()).unwrap();
        assert_eq!(p.len(), 3);
        for v in 0..p.len() {
            assert_eq!(p.vars(v), t.vars(origin[v]));
        }
    }

    #[test]
    fn derived_vtree_for_a_one_input_circuit() {
        let mut cb = CircuitBuilder::new();
        let x = cb.input("x");
        let c = cb.build(x).unwrap();
        let ntd = make_nice(&min_fill_decompose(&c.underlying_graph()));
        let t = Vtree::from_circuit_td(&c, &ntd).unwrap();
        assert_eq!(t.vars(t.root()).len(), 1);
        assert!(t.dummy_count() >= 1);
    }

    #[test]
    fn isa_shapes() {
        let t = Vtree::isa(1, 2).unwrap();
        assert_eq!(t.leaf_count(), 5);
        let root = t.root();
        assert_eq!(
            t.node(t.children(root)[0]).label(),
            Some(Label::Var(VarId(0)))
        );
        let v4 = t.children(root)[1];
        assert_eq!(t.vars(v4).len(), 4);
        assert_eq!(
            t.node(t.children(v4)[1]).label(),
            Some(Label::Var(VarId(4)))
        );
        assert_eq!(Vtree::isa(2, 4).unwrap().leaf_count(), 18);
        assert!(Vtree::isa(2, 3).is_err());
    }
}
