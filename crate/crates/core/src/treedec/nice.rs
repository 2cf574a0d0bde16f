use super::TreeDecomposition;
use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NiceKind {
    Leaf,
    Introduce(usize),
    Forget(usize),
    Join,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NiceNode {
    pub kind: NiceKind,
    pub bag: Vec<usize>,
    pub children: Vec<usize>,
}

/// Nice tree decomposition with an empty root bag. Leaves keep the bag of
/// the original leaf they came from.
#[derive(Clone, Debug)]
pub struct NiceTreeDecomposition {
    nodes: Vec<NiceNode>,
    root: usize,
    forget_of: Vec<Option<usize>>,
}

impl NiceTreeDecomposition {
    pub fn nodes(&self) -> &[NiceNode] {
        &self.nodes
    }

    pub fn node(&self, t: usize) -> &NiceNode {
        &self.nodes[t]
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The node forgetting vertex `v`.
    pub fn forget_node(&self, v: usize) -> Option<usize> {
        self.forget_of.get(v).copied().flatten()
    }

    pub fn width(&self) -> usize {
        self.nodes
            .iter()
            .map(|n| n.bag.len())
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// Nodes in an order where children come before parents.
    pub fn postorder(&self) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![(self.root, false)];
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                out.push(t);
            } else {
                stack.push((t, true));
                for &c in self.nodes[t].children.iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    pub fn to_tree_decomposition(&self) -> TreeDecomposition {
        let mut parent = vec![None; self.nodes.len()];
        for (t, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                parent[c] = Some(t);
            }
        }
        TreeDecomposition::new(self.nodes.iter().map(|n| n.bag.clone()).collect(), parent)
            .expect("nice nodes form a tree")
    }

    /// Check the node-kind rules, the empty root, and validity against `g`.
    pub fn validate(&self, g: &UndirectedGraph) -> Result<()> {
        let bad = |t: usize, why: &str| Err(Error::Decomposition(format!("node {t}: {why}")));
        if !self.nodes[self.root].bag.is_empty() {
            return bad(self.root, "root bag is not empty");
        }
        for (t, n) in self.nodes.iter().enumerate() {
            let child_bag = |i: usize| &self.nodes[n.children[i]].bag;
            match n.kind {
                NiceKind::Leaf if !n.children.is_empty() => return bad(t, "leaf with children"),
                NiceKind::Join => {
                    if n.children.len() != 2 || child_bag(0) != &n.bag || child_bag(1) != &n.bag {
                        return bad(t, "join children must repeat the bag");
                    }
                }
                NiceKind::Introduce(v) | NiceKind::Forget(v) => {
                    if n.children.len() != 1 {
                        return bad(t, "introduce/forget needs one child");
                    }
                    let (big, small) = if let NiceKind::Introduce(_) = n.kind {
                        (&n.bag, child_bag(0))
                    } else {
                        (child_bag(0), &n.bag)
                    };
                    let mut expect = small.clone();
                    expect.push(v);
                    expect.sort_unstable();
                    if small.contains(&v) || &expect != big {
                        return bad(t, "bag does not change by exactly the named vertex");
                    }
                }
                NiceKind::Leaf => {}
            }
        }
        for v in 0..g.vertex_count() {
            let forgets = self
                .nodes
                .iter()
                .filter(|n| n.kind == NiceKind::Forget(v))
                .count();
            if forgets != 1 {
                return Err(Error::Decomposition(format!(
                    "vertex {v} forgotten {forgets} times"
                )));
            }
        }
        self.to_tree_decomposition().validate(g)
    }
}

/// Convert to nice form. On every tree edge the vertices leaving the bag are
/// forgotten first and the new ones introduced afterwards, so no bag grows
/// beyond its endpoints; joins are binary chains; the root bag is emptied by
/// forgetting in ascending vertex order.
pub fn make_nice(td: &TreeDecomposition) -> NiceTreeDecomposition {
    let mut nodes: Vec<NiceNode> = Vec::new();
    let children = td.children();
    let mut top: Vec<usize> = vec![usize::MAX; td.len()];

    let push = |nodes: &mut Vec<NiceNode>, kind, bag: Vec<usize>, children| {
        nodes.push(NiceNode {
            kind,
            bag,
            children,
        });
        nodes.len() - 1
    };

    for t in td.postorder() {
        let bag = td.bag(t).to_vec();
        let mut lifted = Vec::new();
        for &c in &children[t] {
            let mut cur = top[c];
            let mut cur_bag = td.bag(c).to_vec();
            for &v in td.bag(c) {
                if bag.binary_search(&v).is_err() {
                    cur_bag.retain(|&u| u != v);
                    cur = push(&mut nodes, NiceKind::Forget(v), cur_bag.clone(), vec![cur]);
                }
            }
            for &v in &bag {
                if cur_bag.binary_search(&v).is_err() {
                    let at = cur_bag.binary_search(&v).unwrap_err();
                    cur_bag.insert(at, v);
                    cur = push(
                        &mut nodes,
                        NiceKind::Introduce(v),
                        cur_bag.clone(),
                        vec![cur],
                    );
                }
            }
            lifted.push(cur);
        }
        top[t] = match lifted.len() {
            0 => push(&mut nodes, NiceKind::Leaf, bag, vec![]),
            _ => {
                let mut acc = lifted[0];
                for &other in &lifted[1..] {
                    acc = push(&mut nodes, NiceKind::Join, bag.clone(), vec![acc, other]);
                }
                acc
            }
        };
    }

    let mut root = top[td.root()];
    let mut bag = td.bag(td.root()).to_vec();
    for v in td.bag(td.root()).to_vec() {
        bag.retain(|&u| u != v);
        root = push(&mut nodes, NiceKind::Forget(v), bag.clone(), vec![root]);
    }

    let nverts = nodes
        .iter()
        .flat_map(|n| n.bag.iter().copied())
        .max()
        .map_or(0, |m| m + 1);
    let mut forget_of = vec![None; nverts];
    for (t, n) in nodes.iter().enumerate() {
        if let NiceKind::Forget(v) = n.kind {
            forget_of[v] = Some(t);
        }
    }
    NiceTreeDecomposition {
        nodes,
        root,
        forget_of,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treedec::min_fill_decompose;
    use proptest::prelude::*;

    #[test]
    fn single_bag_becomes_forget_chain() {
        let g = UndirectedGraph::from_edges(2, [(0, 1)]);
        let td = TreeDecomposition::new(vec![vec![0, 1]], vec![None]).unwrap();
        let nice = make_nice(&td);
        nice.validate(&g).unwrap();
        let root = nice.node(nice.root());
        assert_eq!(root.kind, NiceKind::Forget(1));
        let mid = nice.node(root.children[0]);
        assert_eq!(mid.kind, NiceKind::Forget(0));
        assert_eq!(nice.node(mid.children[0]).kind, NiceKind::Leaf);
        assert_eq!(nice.node(mid.children[0]).bag, vec![0, 1]);
    }

    #[test]
    fn joins_are_binary() {
        let g = UndirectedGraph::from_edges(4, [(0, 1), (0, 2), (0, 3)]);
        let td = TreeDecomposition::new(
            vec![vec![0], vec![0, 1], vec![0, 2], vec![0, 3]],
            vec![None, Some(0), Some(0), Some(0)],
        )
        .unwrap();
        let nice = make_nice(&td);
        nice.validate(&g).unwrap();
        let joins = nice
            .nodes()
            .iter()
            .filter(|n| n.kind == NiceKind::Join)
            .count();
        assert_eq!(joins, 2);
        assert_eq!(nice.width(), td.width());
    }

    proptest! {
        #[test]
        fn nice_form_preserves_width(n in 1usize..12, es in prop::collection::vec((0usize..12, 0usize..12), 0..30)) {
            let g = UndirectedGraph::from_edges(n, es.into_iter().filter(|&(a, b)| a < n && b < n));
            let td = min_fill_decompose(&g);
            let nice = make_nice(&td);
            prop_assert!(nice.validate(&g).is_ok());
            prop_assert_eq!(nice.width(), td.width());
            for v in 0..n {
                prop_assert!(nice.forget_node(v).is_some());
            }
        }
    }
}
