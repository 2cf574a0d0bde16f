use std::collections::HashMap;

use crate::boolfn::{check_cap, Assignment, BoolFunc, TruthTable, VarId, VarSet, Variables};
use crate::error::{Error, Result};
use crate::vtree::{VNodeId, Vtree};

pub type NodeId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FormKind {
    /// Deterministic structured NNF.
    Dsnnf,
    /// SDD; `canonical` promises pairwise distinct subs in every decision.
    Sdd { canonical: bool },
}

impl FormKind {
    pub fn is_sdd(self) -> bool {
        matches!(self, FormKind::Sdd { .. })
    }

    pub fn token(self) -> &'static str {
        match self {
            FormKind::Dsnnf => "dsnnf",
            FormKind::Sdd { canonical: true } => "sdd",
            FormKind::Sdd { canonical: false } => "sdd-noncanonical",
        }
    }

    pub fn from_token(s: &str) -> Option<FormKind> {
        match s {
            "dsnnf" => Some(FormKind::Dsnnf),
            "sdd" => Some(FormKind::Sdd { canonical: true }),
            "sdd-noncanonical" => Some(FormKind::Sdd { canonical: false }),
            _ => None,
        }
    }
}

/// A gate of a compiled form. `Not` only ever negates an `Input`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Node {
    Const(bool),
    Input(VarId),
    Not(NodeId),
    /// Fanin-2 conjunction structured by `vnode`: `parts[0]` draws from the
    /// left block, `parts[1]` from the right one.
    And {
        vnode: VNodeId,
        parts: [NodeId; 2],
    },
    /// Disjunction; `vnode` is the scope it was built for, if known.
    Or {
        vnode: Option<VNodeId>,
        children: Vec<NodeId>,
    },
}

impl Node {
    pub fn children(&self) -> &[NodeId] {
        match self {
            Node::Const(_) | Node::Input(_) => &[],
            Node::Not(c) => std::slice::from_ref(c),
            Node::And { parts, .. } => parts,
            Node::Or { children, .. } => children,
        }
    }
}

/// A compiled circuit: gates in children-first order, the vtree it respects
/// and the variables of the function it represents.
#[derive(Clone, Debug)]
pub struct CompiledForm {
    kind: FormKind,
    vtree: Option<Vtree>,
    vars: VarSet,
    names: Variables,
    nodes: Vec<Node>,
    root: NodeId,
}

/// Hash-consing gate table used by the compilers.
pub(crate) struct FormBuilder {
    nodes: Vec<Node>,
    unique: HashMap<Node, NodeId>,
}

impl FormBuilder {
    pub fn new() -> Self {
        FormBuilder {
            nodes: Vec::new(),
            unique: HashMap::new(),
        }
    }

    pub fn add(&mut self, n: Node) -> NodeId {
        if let Some(&id) = self.unique.get(&n) {
            return id;
        }
        let id = self.nodes.len();
        self.nodes.push(n.clone());
        self.unique.insert(n, id);
        id
    }

    pub fn literal(&mut self, x: VarId, positive: bool) -> NodeId {
        let i = self.add(Node::Input(x));
        if positive {
            i
        } else {
            self.add(Node::Not(i))
        }
    }

    pub fn finish(
        self,
        kind: FormKind,
        vtree: Option<Vtree>,
        vars: VarSet,
        root: NodeId,
    ) -> CompiledForm {
        CompiledForm {
            kind,
            vtree,
            names: default_names(&vars),
            vars,
            nodes: self.nodes,
            root,
        }
    }
}

fn default_names(vars: &VarSet) -> Variables {
    let top = vars.iter().map(|v| v.0 + 1).max().unwrap_or(0);
    Variables::from_names((0..top).map(|i| format!("v{i}"))).expect("distinct")
}

impl CompiledForm {
    /// Assemble a form from raw parts, checking references and gate order.
    pub fn from_parts(
        kind: FormKind,
        vtree: Option<Vtree>,
        vars: VarSet,
        names: Variables,
        nodes: Vec<Node>,
        root: NodeId,
    ) -> Result<Self> {
        if root >= nodes.len() {
            return Err(Error::Form("root gate does not exist".into()));
        }
        for (i, n) in nodes.iter().enumerate() {
            if n.children().iter().any(|&c| c >= i) {
                return Err(Error::Form(format!(
                    "gate {i} refers to a later or missing gate"
                )));
            }
            match n {
                Node::Input(x) if !vars.contains(*x) => {
                    return Err(Error::Form(format!(
                        "gate {i} reads {x:?} outside the variable set"
                    )))
                }
                Node::Not(c) if !matches!(nodes[*c], Node::Input(_)) => {
                    return Err(Error::Form(format!("gate {i} negates a non-input gate")))
                }
                Node::And { vnode, .. }
                | Node::Or {
                    vnode: Some(vnode), ..
                } => {
                    if vtree.as_ref().map_or(true, |t| *vnode >= t.len()) {
                        return Err(Error::Form(format!("gate {i} names a missing vtree node")));
                    }
                }
                _ => {}
            }
        }
        if let Some(t) = &vtree {
            if !t.all_vars().is_subset(&vars) {
                return Err(Error::Form(
                    "vtree mentions variables outside the form".into(),
                ));
            }
        }
        if let Some(x) = vars.iter().find(|x| names.name(*x).is_none()) {
            return Err(Error::Form(format!("variable {x:?} has no name")));
        }
        Ok(CompiledForm {
            kind,
            vtree,
            vars,
            names,
            nodes,
            root,
        })
    }

    pub fn kind(&self) -> FormKind {
        self.kind
    }

    pub fn vtree(&self) -> Option<&Vtree> {
        self.vtree.as_ref()
    }

    /// Variables of the represented function (possibly more than the gates read).
    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn names(&self) -> &Variables {
        &self.names
    }

    pub fn set_names(&mut self, names: Variables) -> Result<()> {
        if let Some(x) = self.vars.iter().find(|x| names.name(*x).is_none()) {
            return Err(Error::Form(format!("variable {x:?} has no name")));
        }
        self.names = names;
        Ok(())
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, g: NodeId) -> &Node {
        &self.nodes[g]
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    /// Total gate count.
    pub fn size(&self) -> usize {
        self.nodes.len()
    }

    /// Gates reachable from the root.
    pub fn reachable(&self) -> Vec<bool> {
        let mut seen = vec![false; self.nodes.len()];
        seen[self.root] = true;
        for g in (0..=self.root).rev() {
            if seen[g] {
                for &c in self.nodes[g].children() {
                    seen[c] = true;
                }
            }
        }
        seen
    }

    /// Number of distinct reachable And gates structured by each vtree node.
    pub fn and_counts(&self) -> Vec<usize> {
        let n = self.vtree.as_ref().map_or(0, Vtree::len);
        let mut counts = vec![0; n];
        for (g, r) in self.reachable().into_iter().enumerate() {
            if let (true, Node::And { vnode, .. }) = (r, &self.nodes[g]) {
                counts[*vnode] += 1;
            }
        }
        counts
    }

    /// Variables read below each gate.
    pub fn gate_vars(&self) -> Vec<VarSet> {
        let mut out: Vec<VarSet> = Vec::with_capacity(self.nodes.len());
        for n in &self.nodes {
            let vs = match n {
                Node::Const(_) => VarSet::empty(),
                Node::Input(x) => VarSet::singleton(*x),
                _ => n
                    .children()
                    .iter()
                    .fold(VarSet::empty(), |acc, &c| acc.union(&out[c])),
            };
            out.push(vs);
        }
        out
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        let mut val = vec![false; self.nodes.len()];
        for (g, n) in self.nodes.iter().enumerate() {
            val[g] = match n {
                Node::Const(b) => *b,
                Node::Input(x) => a.get(*x)?,
                Node::Not(c) => !val[*c],
                Node::And { parts, .. } => val[parts[0]] && val[parts[1]],
                Node::Or { children, .. } => children.iter().any(|&c| val[c]),
            };
            if g == self.root {
                break;
            }
        }
        Ok(val[self.root])
    }

    /// Truth table of every gate up to the root, over all form variables.
    pub(crate) fn gate_tables(&self) -> Result<Vec<TruthTable>> {
        check_cap(self.vars.len())?;
        let n = self.vars.len() as u32;
        let mut out: Vec<TruthTable> = Vec::with_capacity(self.root + 1);
        for node in &self.nodes[..=self.root] {
            let t = match node {
                Node::Const(true) => TruthTable::ones(n),
                Node::Const(false) => TruthTable::zeros(n),
                Node::Input(x) => TruthTable::projection(n, self.vars.position(*x).unwrap() as u32),
                Node::Not(c) => out[*c].not(),
                Node::And { parts, .. } => out[parts[0]].and(&out[parts[1]]),
                Node::Or { children, .. } => {
                    let mut t = TruthTable::zeros(n);
                    for &c in children {
                        t.or_assign(&out[c]);
                    }
                    t
                }
            };
            out.push(t);
        }
        Ok(out)
    }

    /// The function at the root, over the form's variables.
    pub fn to_function(&self) -> Result<BoolFunc> {
        let mut tables = self.gate_tables()?;
        BoolFunc::from_table(self.vars.clone(), tables.swap_remove(self.root))
    }

    /// Reachable gates renumbered in children-first order, so that structurally
    /// equal forms compare equal.
    pub fn canonical_gates(&self) -> Vec<Node> {
        let reach = self.reachable();
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut out = Vec::new();
        for (g, n) in self.nodes.iter().enumerate() {
            if !reach[g] {
                continue;
            }
            let remap = |c: &NodeId| map[*c];
            let m = match n {
                Node::Not(c) => Node::Not(remap(c)),
                Node::And { vnode, parts } => Node::And {
                    vnode: *vnode,
                    parts: [remap(&parts[0]), remap(&parts[1])],
                },
                Node::Or { vnode, children } => Node::Or {
                    vnode: *vnode,
                    children: children.iter().map(remap).collect(),
                },
                other => other.clone(),
            };
            map[g] = out.len();
            out.push(m);
        }
        out
    }

    /// The form with the variables of `a` fixed: their literals become
    /// constants, everything else is kept, including the vtree and variable
    /// set. Subs may coincide afterwards, so SDDs are marked non-canonical.
    pub fn condition(&self, a: &Assignment) -> Result<CompiledForm> {
        if !a.domain().is_subset(&self.vars) {
            return Err(Error::Domain(format!(
                "conditioning on {:?} outside {:?}",
                a.domain(),
                self.vars
            )));
        }
        let value = |x: VarId| a.domain().contains(x).then(|| a.get(x).unwrap());
        let nodes = self
            .nodes
            .iter()
            .map(|n| match n {
                Node::Input(x) => value(*x).map_or(n.clone(), Node::Const),
                Node::Not(c) => match self.nodes[*c] {
                    Node::Input(x) => value(x).map_or(n.clone(), |b| Node::Const(!b)),
                    _ => n.clone(),
                },
                _ => n.clone(),
            })
            .collect();
        let kind = match self.kind {
            FormKind::Sdd { .. } => FormKind::Sdd { canonical: false },
            k => k,
        };
        Ok(CompiledForm {
            kind,
            vtree: self.vtree.clone(),
            vars: self.vars.clone(),
            names: self.names.clone(),
            nodes,
            root: self.root,
        })
    }

    /// Same form with unreachable gates dropped.
    pub fn compacted(&self) -> CompiledForm {
        let nodes = self.canonical_gates();
        CompiledForm {
            kind: self.kind,
            vtree: self.vtree.clone(),
            vars: self.vars.clone(),
            names: self.names.clone(),
            root: nodes.len() - 1,
            nodes,
        }
    }
}
