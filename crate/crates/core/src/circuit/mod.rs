//! Gate DAGs over the standard basis, their semantics and underlying graph.

mod parse;

use crate::boolfn::{check_cap, Assignment, BoolFunc, TruthTable, VarId, VarSet, Variables};
use crate::error::{Error, Result};
use crate::graph::UndirectedGraph;

pub use parse::{parse_circuit, parse_dimacs};

pub type GateId = usize;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Gate {
    Input(VarId),
    Const(bool),
    Not(GateId),
    And(Vec<GateId>),
    Or(Vec<GateId>),
}

impl Gate {
    pub fn children(&self) -> &[GateId] {
        match self {
            Gate::Input(_) | Gate::Const(_) => &[],
            Gate::Not(c) => std::slice::from_ref(c),
            Gate::And(cs) | Gate::Or(cs) => cs,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Circuit {
    gates: Vec<Gate>,
    output: GateId,
    names: Variables,
    vars: VarSet,
    topo: Vec<GateId>,
}

impl Circuit {
    /// Validate and wrap a gate list. `names` must know every input variable.
    pub fn new(gates: Vec<Gate>, output: GateId, names: Variables) -> Result<Self> {
        let n = gates.len();
        if output >= n {
            return Err(Error::Circuit(format!(
                "output gate {output} does not exist"
            )));
        }
        let mut seen = VarSet::empty();
        for (i, g) in gates.iter().enumerate() {
            for &c in g.children() {
                if c >= n {
                    return Err(Error::Circuit(format!(
                        "gate {i} refers to missing gate {c}"
                    )));
                }
            }
            if let Gate::Input(x) = g {
                if !seen.insert(*x) {
                    return Err(Error::Circuit(format!(
                        "variable {x:?} has two input gates"
                    )));
                }
                if x.index() >= names.len() {
                    return Err(Error::Circuit(format!("variable {x:?} has no name")));
                }
            }
        }
        let topo = topological_order(&gates)
            .map_err(|g| Error::Circuit(format!("cycle through gate {g}")))?;
        Ok(Circuit {
            gates,
            output,
            names,
            vars: seen,
            topo,
        })
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn gate(&self, g: GateId) -> &Gate {
        &self.gates[g]
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn output(&self) -> GateId {
        self.output
    }

    /// Variables carried by input gates.
    pub fn vars(&self) -> &VarSet {
        &self.vars
    }

    pub fn names(&self) -> &Variables {
        &self.names
    }

    /// Gates with every child before its parent.
    pub fn topological_order(&self) -> &[GateId] {
        &self.topo
    }

    pub fn wire_count(&self) -> usize {
        self.gates.iter().map(|g| g.children().len()).sum()
    }

    /// Input gate of `x`, if present.
    pub fn input_gate(&self, x: VarId) -> Option<GateId> {
        self.gates.iter().position(|g| *g == Gate::Input(x))
    }

    pub fn eval(&self, a: &Assignment) -> Result<bool> {
        let mut val = vec![false; self.gates.len()];
        for &g in &self.topo {
            val[g] = match &self.gates[g] {
                Gate::Input(x) => a.get(*x)?,
                Gate::Const(b) => *b,
                Gate::Not(c) => !val[*c],
                Gate::And(cs) => cs.iter().all(|&c| val[c]),
                Gate::Or(cs) => cs.iter().any(|&c| val[c]),
            };
        }
        Ok(val[self.output])
    }

    /// The function computed at the output, over all input variables.
    pub fn to_function(&self) -> Result<BoolFunc> {
        self.function_at(self.output)
    }

    /// The function computed at gate `root`, over all input variables.
    pub fn function_at(&self, root: GateId) -> Result<BoolFunc> {
        check_cap(self.vars.len())?;
        let n = self.vars.len() as u32;
        let mut tables: Vec<Option<TruthTable>> = vec![None; self.gates.len()];
        let needed = self.reachable_from(root);
        for &g in &self.topo {
            if !needed[g] {
                continue;
            }
            let t = match &self.gates[g] {
                Gate::Input(x) => TruthTable::projection(n, self.vars.position(*x).unwrap() as u32),
                Gate::Const(b) => {
                    if *b {
                        TruthTable::ones(n)
                    } else {
                        TruthTable::zeros(n)
                    }
                }
                Gate::Not(c) => tables[*c].as_ref().unwrap().not(),
                Gate::And(cs) => {
                    let mut t = TruthTable::ones(n);
                    for &c in cs {
                        t.and_assign(tables[c].as_ref().unwrap());
                    }
                    t
                }
                Gate::Or(cs) => {
                    let mut t = TruthTable::zeros(n);
                    for &c in cs {
                        t.or_assign(tables[c].as_ref().unwrap());
                    }
                    t
                }
            };
            tables[g] = Some(t);
        }
        BoolFunc::from_table(self.vars.clone(), tables[root].take().unwrap())
    }

    fn reachable_from(&self, root: GateId) -> Vec<bool> {
        let mut seen = vec![false; self.gates.len()];
        let mut stack = vec![root];
        while let Some(g) = stack.pop() {
            if !std::mem::replace(&mut seen[g], true) {
                stack.extend_from_slice(self.gates[g].children());
            }
        }
        seen
    }

    /// `var(C_g)` for every gate `g`.
    pub fn subcircuit_vars(&self) -> Vec<VarSet> {
        let mut out = vec![VarSet::empty(); self.gates.len()];
        for &g in &self.topo {
            out[g] = match &self.gates[g] {
                Gate::Input(x) => VarSet::singleton(*x),
                Gate::Const(_) => VarSet::empty(),
                g => g
                    .children()
                    .iter()
                    .fold(VarSet::empty(), |acc, &c| acc.union(&out[c])),
            };
        }
        out
    }

    /// One vertex per gate and one edge per wire (parallel wires collapse).
    pub fn underlying_graph(&self) -> UndirectedGraph {
        UndirectedGraph::from_edges(
            self.gates.len(),
            self.gates
                .iter()
                .enumerate()
                .flat_map(|(g, gate)| gate.children().iter().map(move |&c| (g, c))),
        )
    }

    /// Render in the `.bc` text format.
    pub fn to_bc_string(&self) -> String {
        use std::fmt::Write;
        let mut s = format!("v {}\n", self.vars.len());
        let list = |cs: &[GateId]| cs.iter().map(|c| format!(" g{c}")).collect::<String>();
        for &g in &self.topo {
            let _ = match &self.gates[g] {
                Gate::Input(x) => writeln!(s, "g{g} input {}", self.names.display(*x)),
                Gate::Const(b) => writeln!(s, "g{g} const {}", *b as u8),
                Gate::Not(c) => writeln!(s, "g{g} not g{c}"),
                Gate::And(cs) => writeln!(s, "g{g} and{}", list(cs)),
                Gate::Or(cs) => writeln!(s, "g{g} or{}", list(cs)),
            };
        }
        let _ = writeln!(s, "out g{}", self.output);
        s
    }
}

/// Children-first order, or a gate lying on a cycle.
pub(crate) fn topological_order(gates: &[Gate]) -> std::result::Result<Vec<GateId>, GateId> {
    // 0 = unvisited, 1 = on stack, 2 = done
    let mut state = vec![0u8; gates.len()];
    let mut order = Vec::with_capacity(gates.len());
    for start in 0..gates.len() {
        if state[start] != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state[start] = 1;
        while let Some(&mut (g, ref mut next)) = stack.last_mut() {
            let cs = gates[g].children();
            if *next < cs.len() {
                let c = cs[*next];
                *next += 1;
                match state[c] {
                    0 => {
                        state[c] = 1;
                        stack.push((c, 0));
                    }
                    1 => return Err(c),
                    _ => {}
                }
            } else {
                state[g] = 2;
                order.push(g);
                stack.pop();
            }
        }
    }
    Ok(order)
}

/// Incremental construction of circuits in code.
#[derive(Default)]
pub struct CircuitBuilder {
    gates: Vec<Gate>,
    names: Variables,
}

impl CircuitBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builder whose registry already holds `names` (ids fixed in order).
    pub fn with_names(names: Variables) -> Self {
        CircuitBuilder {
            gates: Vec::new(),
            names,
        }
    }

    /// Input gate for the variable called `name`, registering it if new.
    pub fn input(&mut self, name: &str) -> GateId {
        let x = self.names.intern(name);
        self.input_var(x)
    }

    /// Input gate for an already registered variable; reuses an existing gate.
    pub fn input_var(&mut self, x: VarId) -> GateId {
        if let Some(g) = self.gates.iter().position(|g| *g == Gate::Input(x)) {
            return g;
        }
        self.push(Gate::Input(x))
    }

    pub fn constant(&mut self, b: bool) -> GateId {
        self.push(Gate::Const(b))
    }

    pub fn not(&mut self, c: GateId) -> GateId {
        self.push(Gate::Not(c))
    }

    pub fn and(&mut self, cs: Vec<GateId>) -> GateId {
        self.push(Gate::And(cs))
    }

    pub fn or(&mut self, cs: Vec<GateId>) -> GateId {
        self.push(Gate::Or(cs))
    }

    pub fn push(&mut self, g: Gate) -> GateId {
        self.gates.push(g);
        self.gates.len() - 1
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn build(self, output: GateId) -> Result<Circuit> {
        Circuit::new(self.gates, output, self.names)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn implication() -> Circuit {
        let mut b = CircuitBuilder::new();
        let x = b.input("x");
        let y = b.input("y");
        let nx = b.not(x);
        let o = b.or(vec![nx, y]);
        b.build(o).unwrap()
    }

    #[test]
    fn implication_semantics() {
        let c = implication();
        assert_eq!(c.to_function().unwrap().model_count(), 3);
        assert_eq!(c.wire_count(), 3);
        assert_eq!(c.underlying_graph().edge_count(), 3);
    }

    #[test]
    fn constant_circuit() {
        let mut b = CircuitBuilder::new();
        let t = b.constant(true);
        let f = b.build(t).unwrap().to_function().unwrap();
        assert_eq!(f, BoolFunc::top());
    }

    #[test]
    fn tautology() {
        let mut b = CircuitBuilder::new();
        let x = b.input("x");
        let nx = b.not(x);
        let o = b.or(vec![x, nx]);
        let f = b.build(o).unwrap().to_function().unwrap();
        assert!(f.is_true());
        assert_eq!(f.arity(), 1);
    }

    #[test]
    fn chain_graph_is_a_path() {
        let mut b = CircuitBuilder::new();
        let x = b.input("x");
        let n1 = b.not(x);
        let n2 = b.not(n1);
        let g = b.build(n2).unwrap().underlying_graph();
        assert_eq!(g, UndirectedGraph::path(3));
    }

    #[test]
    fn and_is_a_star() {
        let mut b = CircuitBuilder::new();
        let x = b.input("x");
        let y = b.input("y");
        let a = b.and(vec![x, y]);
        let g = b.build(a).unwrap().underlying_graph();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degree(a), 2);
    }

    #[test]
    fn subcircuit_vars_by_gate_kind() {
        let mut b = CircuitBuilder::new();
        let x = b.input("x");
        let y = b.input("y");
        let k = b.constant(false);
        let o = b.or(vec![x, y, k]);
        let c = b.build(o).unwrap();
        let vs = c.subcircuit_vars();
        assert_eq!(vs[o], *c.vars());
        assert_eq!(vs[x], VarSet::singleton(VarId(0)));
        assert!(vs[k].is_empty());
    }

    #[test]
    fn rejects_cycles_and_duplicates() {
        let names = Variables::from_names(["x"]).unwrap();
        let cyc = vec![Gate::Input(VarId(0)), Gate::And(vec![0, 2]), Gate::Not(1)];
        assert!(matches!(
            Circuit::new(cyc, 1, names.clone()),
            Err(Error::Circuit(_))
        ));
        let dup = vec![
            Gate::Input(VarId(0)),
            Gate::Input(VarId(0)),
            Gate::Or(vec![0, 1]),
        ];
        assert!(Circuit::new(dup, 2, names.clone()).is_err());
        let dangling = vec![Gate::Not(5)];
        assert!(Circuit::new(dangling, 0, names).is_err());
    }

    #[test]
    fn function_invariant_under_child_order() {
        let mut b = CircuitBuilder::new();
        let x = b.input("x");
        let y = b.input("y");
        let z = b.input("z");
        let a = b.and(vec![x, y]);
        let o1 = b.or(vec![a, z]);
        let a2 = b.and(vec![y, x]);
        let o2 = b.or(vec![z, a2]);
        let c = b.build(o1).unwrap();
        assert_eq!(c.function_at(o1).unwrap(), c.function_at(o2).unwrap());
    }

    #[test]
    fn bc_round_trip() {
        let c = implication();
        let again = parse_circuit(&c.to_bc_string()).unwrap();
        assert_eq!(again.to_function().unwrap(), c.to_function().unwrap());
    }
}
