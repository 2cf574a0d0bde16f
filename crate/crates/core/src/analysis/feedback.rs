use std::collections::BTreeSet;

use crate::compile::{CompiledForm, Node};
use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;
use crate::treedec::TreeDecomposition;

/// Tree decomposition of a structured form's underlying graph, shaped like
/// its vtree.
#[derive(Clone, Debug)]
pub struct FeedbackDecomposition {
    /// The reachable part of the form, whose gates are the graph's vertices.
    pub form: CompiledForm,
    pub graph: UndirectedGraph,
    pub td: TreeDecomposition,
}

/// The bag at vtree node `v` holds the closed neighbourhoods of the And gates
/// structured by `v`; a leaf's bag holds its literal gates. Edges not covered
/// that way, and gates shared by distant bags (constants mostly), are patched
/// in along tree paths so the result is always a valid decomposition.
pub fn feedback_decomposition(form: &CompiledForm) -> Result<FeedbackDecomposition> {
    let form = form.compacted();
    let n = form.size();
    let graph = UndirectedGraph::from_edges(
        n,
        form.nodes()
            .iter()
            .enumerate()
            .flat_map(|(g, node)| node.children().iter().map(move |&c| (g, c))),
    );
    let Some(t) = form
        .vtree()
        .filter(|_| form.nodes().iter().any(|n| matches!(n, Node::And { .. })))
    else {
        let td = TreeDecomposition::new(vec![(0..n).collect()], vec![None])?;
        return Ok(FeedbackDecomposition { form, graph, td });
    };

    let mut bags: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); t.len()];
    let mut home: Vec<Option<usize>> = vec![None; n];
    for (g, node) in form.nodes().iter().enumerate() {
        match node {
            Node::And { vnode, .. } => {
                bags[*vnode].insert(g);
                bags[*vnode].extend(graph.neighbors(g));
                home[g] = Some(*vnode);
            }
            Node::Input(x) => {
                let leaf = t
                    .leaf_of(*x)
                    .ok_or_else(|| Error::Vtree(format!("no leaf for {x:?}")))?;
                bags[leaf].insert(g);
                home[g] = Some(leaf);
            }
            Node::Not(c) => {
                if let Node::Input(x) = form.node(*c) {
                    if let Some(leaf) = t.leaf_of(*x) {
                        bags[leaf].insert(g);
                        home[g] = Some(leaf);
                    }
                }
            }
            _ => {}
        }
    }

    let mut holders: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (v, bag) in bags.iter().enumerate() {
        for &g in bag {
            holders[g].push(v);
        }
    }
    for g in 0..n {
        if holders[g].is_empty() {
            let v = form
                .node(g)
                .children()
                .iter()
                .find_map(|&c| holders[c].first().copied())
                .unwrap_or(t.root());
            bags[v].insert(g);
            holders[g].push(v);
        }
    }
    // edges whose endpoints never share a bag
    for (a, b) in graph.edges() {
        if !holders[a].iter().any(|v| bags[*v].contains(&b)) {
            let v = home[a].or(home[b]).unwrap_or(holders[a][0]);
            for x in [a, b] {
                if bags[v].insert(x) {
                    holders[x].push(v);
                }
            }
        }
    }
    // connect each gate's occurrences through their common ancestor
    let depth: Vec<usize> = (0..t.len())
        .map(|mut v| {
            let mut d = 0;
            while let Some(p) = t.node(v).parent() {
                v = p;
                d += 1;
            }
            d
        })
        .collect();
    for g in 0..n {
        let mut at = holders[g].clone();
        at.sort_unstable_by_key(|v| std::cmp::Reverse(depth[*v]));
        let mut frontier: BTreeSet<usize> = at.iter().copied().collect();
        while frontier.len() > 1 {
            let deepest = *frontier.iter().max_by_key(|v| (depth[**v], **v)).unwrap();
            frontier.remove(&deepest);
            let p = t
                .node(deepest)
                .parent()
                .expect("several nodes below the root");
            bags[p].insert(g);
            frontier.insert(p);
        }
    }

    let parent = (0..t.len()).map(|v| t.node(v).parent()).collect();
    let td = TreeDecomposition::new(
        bags.into_iter().map(|b| b.into_iter().collect()).collect(),
        parent,
    )?;
    Ok(FeedbackDecomposition { form, graph, td })
}
