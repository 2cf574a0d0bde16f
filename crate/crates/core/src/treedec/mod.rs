//! Tree decompositions of undirected graphs.

mod nice;
mod pace;

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;

pub use nice::{make_nice, NiceKind, NiceNode, NiceTreeDecomposition};
pub use pace::{parse_pace, write_pace};

/// Default vertex limit for [`exact_treewidth`].
pub const EXACT_LIMIT: usize = 14;

/// A rooted tree decomposition. Bags are sorted vertex lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeDecomposition {
    bags: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    root: usize,
}

impl TreeDecomposition {
    /// Build from bags and a parent array. Exactly one node may lack a parent.
    pub fn new(mut bags: Vec<Vec<usize>>, parent: Vec<Option<usize>>) -> Result<Self> {
        if bags.is_empty() || bags.len() != parent.len() {
            return Err(Error::Decomposition("need one parent entry per bag".into()));
        }
        let roots: Vec<usize> = (0..bags.len()).filter(|&i| parent[i].is_none()).collect();
        let [root] = roots.as_slice() else {
            return Err(Error::Decomposition(format!(
                "expected one root, found {}",
                roots.len()
            )));
        };
        for b in &mut bags {
            b.sort_unstable();
            b.dedup();
        }
        // every node must reach the root
        for start in 0..bags.len() {
            let mut cur = start;
            let mut steps = 0;
            while let Some(p) = parent[cur] {
                if p >= bags.len() || steps > bags.len() {
                    return Err(Error::Decomposition(
                        "parent pointers do not form a tree".into(),
                    ));
                }
                cur = p;
                steps += 1;
            }
        }
        Ok(TreeDecomposition {
            bags,
            parent,
            root: *root,
        })
    }

    pub fn len(&self) -> usize {
        self.bags.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn bag(&self, t: usize) -> &[usize] {
        &self.bags[t]
    }

    pub fn bags(&self) -> &[Vec<usize>] {
        &self.bags
    }

    pub fn parent(&self, t: usize) -> Option<usize> {
        self.parent[t]
    }

    pub fn children(&self) -> Vec<Vec<usize>> {
        let mut ch = vec![Vec::new(); self.bags.len()];
        for (t, p) in self.parent.iter().enumerate() {
            if let Some(p) = p {
                ch[*p].push(t);
            }
        }
        ch
    }

    /// Largest bag size minus one (0 for an all-empty decomposition).
    pub fn width(&self) -> usize {
        self.bags
            .iter()
            .map(Vec::len)
            .max()
            .unwrap_or(0)
            .saturating_sub(1)
    }

    /// Nodes listed so that children precede parents.
    pub fn postorder(&self) -> Vec<usize> {
        let ch = self.children();
        let mut out = Vec::with_capacity(self.len());
        let mut stack = vec![(self.root, false)];
        while let Some((t, expanded)) = stack.pop() {
            if expanded {
                out.push(t);
            } else {
                stack.push((t, true));
                for &c in ch[t].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        out
    }

    /// Check vertex coverage, edge coverage and connectivity against `g`.
    pub fn validate(&self, g: &UndirectedGraph) -> Result<()> {
        let n = g.vertex_count();
        let mut count = vec![0usize; n];
        let mut tops = vec![0usize; n];
        for (t, bag) in self.bags.iter().enumerate() {
            for &v in bag {
                if v >= n {
                    return Err(Error::Decomposition(format!(
                        "bag {t} holds unknown vertex {v}"
                    )));
                }
                count[v] += 1;
                let parent_has =
                    self.parent[t].is_some_and(|p| self.bags[p].binary_search(&v).is_ok());
                if !parent_has {
                    tops[v] += 1;
                }
            }
        }
        if let Some(v) = (0..n).find(|&v| count[v] == 0) {
            return Err(Error::Decomposition(format!("vertex {v} is in no bag")));
        }
        if let Some(v) = (0..n).find(|&v| tops[v] != 1) {
            return Err(Error::Decomposition(format!(
                "bags containing vertex {v} are not connected"
            )));
        }
        for (u, v) in g.edges() {
            let covered = self
                .bags
                .iter()
                .any(|b| b.binary_search(&u).is_ok() && b.binary_search(&v).is_ok());
            if !covered {
                return Err(Error::Decomposition(format!("edge {u}-{v} is not covered")));
            }
        }
        Ok(())
    }

    /// Decomposition induced by eliminating vertices in `order`.
    pub fn from_elimination_order(g: &UndirectedGraph, order: &[usize]) -> Result<Self> {
        let n = g.vertex_count();
        if n == 0 {
            return TreeDecomposition::new(vec![Vec::new()], vec![None]);
        }
        let mut pos = vec![usize::MAX; n];
        for (i, &v) in order.iter().enumerate() {
            if v >= n || pos[v] != usize::MAX {
                return Err(Error::Decomposition("order is not a permutation".into()));
            }
            pos[v] = i;
        }
        if order.len() != n {
            return Err(Error::Decomposition("order is not a permutation".into()));
        }
        let mut adj: Vec<BTreeSet<usize>> = (0..n)
            .map(|v| g.neighbors(v).filter(|&u| u != v).collect())
            .collect();
        let mut bags = Vec::with_capacity(n);
        let mut parent = vec![None; n];
        for (i, &v) in order.iter().enumerate() {
            let later: Vec<usize> = adj[v].iter().copied().collect();
            eliminate(&mut adj, v);
            let mut bag = later.clone();
            bag.push(v);
            bags.push(bag);
            parent[i] = later.iter().map(|&u| pos[u]).min();
        }
        chain_roots(&mut parent);
        TreeDecomposition::new(bags, parent)
    }
}

fn eliminate(adj: &mut [BTreeSet<usize>], v: usize) {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    for &a in &nbrs {
        adj[a].remove(&v);
        for &b in &nbrs {
            if a != b {
                adj[a].insert(b);
            }
        }
    }
    adj[v].clear();
}

/// Make a forest into a tree by hanging each root below the next one.
fn chain_roots(parent: &mut [Option<usize>]) {
    let roots: Vec<usize> = (0..parent.len()).filter(|&i| parent[i].is_none()).collect();
    for w in roots.windows(2) {
        parent[w[0]] = Some(w[1]);
    }
}

/// Min-fill elimination ordering; ties broken by degree, then vertex id.
pub fn min_fill_order(g: &UndirectedGraph) -> Vec<usize> {
    let n = g.vertex_count();
    let mut adj: Vec<BTreeSet<usize>> = (0..n)
        .map(|v| g.neighbors(v).filter(|&u| u != v).collect())
        .collect();
    let mut alive = vec![true; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let best = (0..n)
            .filter(|&v| alive[v])
            .min_by_key(|&v| (fill_in(&adj, v), adj[v].len(), v))
            .unwrap();
        order.push(best);
        alive[best] = false;
        eliminate(&mut adj, best);
    }
    order
}

fn fill_in(adj: &[BTreeSet<usize>], v: usize) -> usize {
    let nbrs: Vec<usize> = adj[v].iter().copied().collect();
    let mut fill = 0;
    for (i, &a) in nbrs.iter().enumerate() {
        for &b in &nbrs[i + 1..] {
            if !adj[a].contains(&b) {
                fill += 1;
            }
        }
    }
    fill
}

pub fn min_fill_decompose(g: &UndirectedGraph) -> TreeDecomposition {
    TreeDecomposition::from_elimination_order(g, &min_fill_order(g))
        .expect("min-fill yields a permutation")
}

/// Exact treewidth together with an optimal elimination order.
pub fn exact_elimination_order(g: &UndirectedGraph, limit: usize) -> Result<(usize, Vec<usize>)> {
    let n = g.vertex_count();
    if n > limit || n > 24 {
        return Err(Error::Params(format!(
            "exact treewidth limited to {} vertices, graph has {n}",
            limit.min(24)
        )));
    }
    if n == 0 {
        return Ok((0, Vec::new()));
    }
    let nbr: Vec<u32> = (0..n)
        .map(|v| {
            g.neighbors(v)
                .filter(|&u| u != v)
                .fold(0u32, |m, u| m | 1 << u)
        })
        .collect();
    // q(s, v): vertices outside s ∪ {v} reachable from v through s
    let q = |s: u32, v: usize| -> u32 {
        let mut seen = 1u32 << v;
        let mut frontier = 1u32 << v;
        let mut out = 0u32;
        while frontier != 0 {
            let u = frontier.trailing_zeros() as usize;
            frontier &= frontier - 1;
            let fresh = nbr[u] & !seen;
            seen |= fresh;
            out |= fresh & !s;
            frontier |= fresh & s;
        }
        out.count_ones()
    };
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut tw = vec![u8::MAX; 1usize << n];
    tw[0] = 0;
    for s in 1..=full {
        let mut best = u8::MAX;
        let mut rest = s;
        while rest != 0 {
            let v = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let prev = s & !(1 << v);
            let cand = tw[prev as usize].max(q(prev, v) as u8);
            best = best.min(cand);
        }
        tw[s as usize] = best;
    }
    let mut order = Vec::with_capacity(n);
    let mut s = full;
    while s != 0 {
        let target = tw[s as usize];
        let v = (0..n)
            .find(|&v| {
                s & (1 << v) != 0
                    && tw[(s & !(1 << v)) as usize].max(q(s & !(1 << v), v) as u8) == target
            })
            .unwrap();
        order.push(v);
        s &= !(1 << v);
    }
    order.reverse();
    Ok((tw[full as usize] as usize, order))
}

pub fn exact_treewidth(g: &UndirectedGraph, limit: usize) -> Result<usize> {
    exact_elimination_order(g, limit).map(|(w, _)| w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn heuristic_widths() {
        assert_eq!(min_fill_decompose(&UndirectedGraph::path(5)).width(), 1);
        assert_eq!(min_fill_decompose(&UndirectedGraph::complete(4)).width(), 3);
        let grid = UndirectedGraph::grid(3, 3);
        let td = min_fill_decompose(&grid);
        td.validate(&grid).unwrap();
        assert!(td.width() <= 4);
        assert!(td.width() >= exact_treewidth(&grid, EXACT_LIMIT).unwrap());
    }

    #[test]
    fn exact_widths() {
        let tree = UndirectedGraph::from_edges(6, [(0, 1), (0, 2), (2, 3), (2, 4), (4, 5)]);
        assert_eq!(exact_treewidth(&tree, EXACT_LIMIT).unwrap(), 1);
        assert_eq!(
            exact_treewidth(&UndirectedGraph::cycle(5), EXACT_LIMIT).unwrap(),
            2
        );
        assert_eq!(
            exact_treewidth(&UndirectedGraph::complete(5), EXACT_LIMIT).unwrap(),
            4
        );
        assert_eq!(
            exact_treewidth(&UndirectedGraph::grid(3, 3), EXACT_LIMIT).unwrap(),
            3
        );
        assert!(exact_treewidth(&UndirectedGraph::path(20), EXACT_LIMIT).is_err());
    }

    #[test]
    fn exact_order_realizes_width() {
        let g = UndirectedGraph::grid(3, 4);
        let (w, order) = exact_elimination_order(&g, EXACT_LIMIT).unwrap();
        let td = TreeDecomposition::from_elimination_order(&g, &order).unwrap();
        td.validate(&g).unwrap();
        assert_eq!(td.width(), w);
    }

    #[test]
    fn disconnected_and_empty_graphs() {
        let g = UndirectedGraph::from_edges(5, [(0, 1), (3, 4)]);
        let td = min_fill_decompose(&g);
        td.validate(&g).unwrap();
        assert_eq!(td.width(), 1);
        let empty = UndirectedGraph::new(0);
        assert_eq!(min_fill_decompose(&empty).len(), 1);
    }

    #[test]
    fn validator_catches_broken_decompositions() {
        let g = UndirectedGraph::path(3);
        let missing_edge =
            TreeDecomposition::new(vec![vec![0, 1], vec![2]], vec![None, Some(0)]).unwrap();
        assert!(missing_edge.validate(&g).is_err());
        let disconnected = TreeDecomposition::new(
            vec![vec![0, 1], vec![1, 2], vec![0]],
            vec![None, Some(0), Some(1)],
        )
        .unwrap();
        assert!(disconnected.validate(&g).is_err());
    }

    fn arb_graph() -> impl Strategy<Value = UndirectedGraph> {
        (1usize..11).prop_flat_map(|n| {
            prop::collection::vec((0..n, 0..n), 0..3 * n)
                .prop_map(move |es| UndirectedGraph::from_edges(n, es))
        })
    }

    proptest! {
        #[test]
        fn min_fill_is_valid_and_not_below_exact(g in arb_graph()) {
            let td = min_fill_decompose(&g);
            prop_assert!(td.validate(&g).is_ok());
            prop_assert!(exact_treewidth(&g, EXACT_LIMIT).unwrap() <= td.width());
        }
    }
}
