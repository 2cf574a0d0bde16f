use serde::Serialize;

use crate::boolfn::{Assignment, BoolFunc, TruthTable, VarSet};
use crate::compile::{CompiledForm, FormKind, Node, NodeId};
use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Property {
    Decomposability,
    Structuredness,
    Determinism,
    /// SDD decision shape: an Or whose children are Ands of one vtree node.
    DecisionShape,
    /// SD1: primes cover every assignment of the left block.
    ExhaustivePrimes,
    /// SD2: primes are pairwise inconsistent.
    ExclusivePrimes,
    /// SD3: subs are pairwise inequivalent (canonical SDDs only).
    DistinctSubs,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub property: Property,
    pub gate: NodeId,
    /// Assignment exhibiting the failure, where one exists.
    #[serde(serialize_with = "ser_witness")]
    pub witness: Option<Assignment>,
    pub detail: String,
}

fn ser_witness<S: serde::Serializer>(
    w: &Option<Assignment>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match w {
        None => s.serialize_none(),
        Some(a) => s.collect_map(a.iter().map(|(v, b)| (v.to_string(), b as u8))),
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct VerifyReport {
    pub checked_gates: usize,
    pub decisions: usize,
    pub violations: Vec<Violation>,
}

impl VerifyReport {
    pub fn ok(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn holds(&self, p: Property) -> bool {
        self.violations.iter().all(|v| v.property != p)
    }
}

/// Per-gate functions, each over the variables read below the gate.
pub(crate) struct GateFunctions {
    pub vars: Vec<VarSet>,
    pub funcs: Vec<BoolFunc>,
}

impl GateFunctions {
    pub fn new(form: &CompiledForm) -> Result<Self> {
        let vars = form.gate_vars();
        let reach = form.reachable();
        let mut funcs: Vec<BoolFunc> = Vec::with_capacity(form.size());
        for (g, n) in form.nodes().iter().enumerate() {
            if !reach[g] {
                funcs.push(BoolFunc::bottom());
                continue;
            }
            let f = match n {
                Node::Const(b) => {
                    if *b {
                        BoolFunc::top()
                    } else {
                        BoolFunc::bottom()
                    }
                }
                Node::Input(x) => BoolFunc::var(*x),
                Node::Not(c) => funcs[*c].not(),
                Node::And { parts, .. } => funcs[parts[0]].and(&funcs[parts[1]])?,
                Node::Or { children, .. } => {
                    let mut t = TruthTable::zeros(vars[g].len() as u32);
                    for &c in children {
                        t.or_assign(funcs[c].extend(&vars[g])?.table());
                    }
                    BoolFunc::from_table(vars[g].clone(), t)?
                }
            };
            funcs.push(f);
        }
        Ok(GateFunctions { vars, funcs })
    }
}

/// A shared model of `a` and `b`, as an assignment of their joint variables.
fn common_model(a: &BoolFunc, b: &BoolFunc) -> Result<Option<Assignment>> {
    let vars = a.vars().union(b.vars());
    let t = a.extend(&vars)?.table().and(b.extend(&vars)?.table());
    Ok(t.first_one().map(|i| Assignment::from_index(&vars, i)))
}

/// Check decomposability, structuredness and determinism of every reachable
/// gate, plus the sentential-decision conditions when the form is an SDD.
pub fn verify(form: &CompiledForm) -> Result<VerifyReport> {
    let gf = GateFunctions::new(form)?;
    let reach = form.reachable();
    let mut rep = VerifyReport::default();
    let vt = form.vtree();
    for (g, node) in form.nodes().iter().enumerate() {
        if !reach[g] {
            continue;
        }
        rep.checked_gates += 1;
        match node {
            Node::And { vnode, parts } => {
                let [a, b] = *parts;
                let shared = gf.vars[a].intersection(&gf.vars[b]);
                if !shared.is_empty() {
                    let w = Assignment::new(shared.iter().map(|x| (x, false)))?;
                    fail(
                        &mut rep,
                        Property::Decomposability,
                        g,
                        Some(w),
                        format!("operands share {shared:?}"),
                    );
                }
                let ok = vt.is_some_and(|t| match t.children(*vnode) {
                    [l, r] => gf.vars[a].is_subset(t.vars(*l)) && gf.vars[b].is_subset(t.vars(*r)),
                    _ => false,
                });
                if !ok {
                    fail(
                        &mut rep,
                        Property::Structuredness,
                        g,
                        None,
                        format!("operands do not fit the blocks of vtree node {vnode}"),
                    );
                }
            }
            Node::Or { children, .. } => {
                check_determinism(form, &gf, g, children, &mut rep)?;
                if form.kind().is_sdd() {
                    check_decision(form, &gf, g, children, &mut rep)?;
                }
            }
            _ => {}
        }
    }
    Ok(rep)
}

fn fail(
    rep: &mut VerifyReport,
    property: Property,
    gate: NodeId,
    witness: Option<Assignment>,
    detail: String,
) {
    rep.violations.push(Violation {
        property,
        gate,
        witness,
        detail,
    })
}

/// Whether the left operands of both Ands avoid the variables of both right operands.
fn split_cleanly(gf: &GateFunctions, pa: &[NodeId; 2], pb: &[NodeId; 2]) -> bool {
    let left = gf.vars[pa[0]].union(&gf.vars[pb[0]]);
    left.is_disjoint(&gf.vars[pa[1]].union(&gf.vars[pb[1]]))
}

fn check_determinism(
    form: &CompiledForm,
    gf: &GateFunctions,
    g: NodeId,
    children: &[NodeId],
    rep: &mut VerifyReport,
) -> Result<()> {
    for (i, &a) in children.iter().enumerate() {
        for &b in &children[i + 1..] {
            // two Ands over the same vtree node overlap iff both halves do
            let overlap = match (form.node(a), form.node(b)) {
                (
                    Node::And {
                        vnode: va,
                        parts: pa,
                    },
                    Node::And {
                        vnode: vb,
                        parts: pb,
                    },
                ) if va == vb && split_cleanly(gf, pa, pb) => {
                    match (
                        common_model(&gf.funcs[pa[0]], &gf.funcs[pb[0]])?,
                        common_model(&gf.funcs[pa[1]], &gf.funcs[pb[1]])?,
                    ) {
                        (Some(l), Some(r)) => Some(l.union(&r)?),
                        _ => None,
                    }
                }
                _ => common_model(&gf.funcs[a], &gf.funcs[b])?,
            };
            if let Some(w) = overlap {
                fail(
                    rep,
                    Property::Determinism,
                    g,
                    Some(w),
                    format!("children {a} and {b} share a model"),
                );
                return Ok(());
            }
        }
    }
    Ok(())
}

fn check_decision(
    form: &CompiledForm,
    gf: &GateFunctions,
    g: NodeId,
    children: &[NodeId],
    rep: &mut VerifyReport,
) -> Result<()> {
    let Some(t) = form.vtree() else {
        fail(
            rep,
            Property::DecisionShape,
            g,
            None,
            "SDD without a vtree".into(),
        );
        return Ok(());
    };
    let mut elems = Vec::with_capacity(children.len());
    let mut node = None;
    for &c in children {
        match form.node(c) {
            Node::And { vnode, parts } if node.is_none() || node == Some(*vnode) => {
                node = Some(*vnode);
                elems.push(*parts);
            }
            _ => {
                fail(
                    rep,
                    Property::DecisionShape,
                    g,
                    None,
                    format!("element {c} is not an And of the decision's node"),
                );
                return Ok(());
            }
        }
    }
    let Some(v) = node else {
        fail(
            rep,
            Property::DecisionShape,
            g,
            None,
            "empty decision".into(),
        );
        return Ok(());
    };
    rep.decisions += 1;
    if let Node::Or { vnode: Some(w), .. } = form.node(g) {
        if *w != v {
            fail(
                rep,
                Property::DecisionShape,
                g,
                None,
                format!("decision labelled {w} holds elements of {v}"),
            );
        }
    }
    let [l, r] = t.children(v) else {
        return Ok(());
    };
    let (left, right) = (t.vars(*l), t.vars(*r));
    if elems
        .iter()
        .any(|e| !gf.vars[e[0]].is_subset(left) || !gf.vars[e[1]].is_subset(right))
    {
        // already reported as a structuredness violation
        return Ok(());
    }

    // SD2 first; with exclusive primes, SD1 reduces to a model count
    let mut exclusive = true;
    for (i, a) in elems.iter().enumerate() {
        for b in &elems[i + 1..] {
            if let Some(w) = common_model(&gf.funcs[a[0]], &gf.funcs[b[0]])? {
                fail(
                    rep,
                    Property::ExclusivePrimes,
                    g,
                    Some(w),
                    format!("primes {} and {} overlap", a[0], b[0]),
                );
                exclusive = false;
            }
        }
    }
    let total: u128 = elems
        .iter()
        .map(|e| {
            let p = &gf.funcs[e[0]];
            (p.model_count() as u128) << (left.len() - p.arity())
        })
        .sum();
    if exclusive && total != 1u128 << left.len() {
        let mut acc = TruthTable::zeros(left.len() as u32);
        for e in &elems {
            acc.or_assign(gf.funcs[e[0]].extend(left)?.table());
        }
        let w = acc
            .not()
            .first_one()
            .map(|i| Assignment::from_index(left, i));
        fail(
            rep,
            Property::ExhaustivePrimes,
            g,
            w,
            "primes do not cover the left block".into(),
        );
    }
    if let FormKind::Sdd { canonical: true } = form.kind() {
        for (i, a) in elems.iter().enumerate() {
            for b in &elems[i + 1..] {
                let (sa, sb) = (gf.funcs[a[1]].extend(right)?, gf.funcs[b[1]].extend(right)?);
                if sa == sb {
                    fail(
                        rep,
                        Property::DistinctSubs,
                        g,
                        None,
                        format!("subs {} and {} are equivalent", a[1], b[1]),
                    );
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::boolfn::{VarId, Variables};
    use crate::compile::{compile_dsnnf, compile_sdd};
    use crate::vtree::Vtree;

    fn hand_built(nodes: Vec<Node>, vtree: Option<Vtree>) -> CompiledForm {
        let names = Variables::from_names(["x", "y"]).unwrap();
        let root = nodes.len() - 1;
        CompiledForm::from_parts(FormKind::Dsnnf, vtree, VarSet::range(2), names, nodes, root)
            .unwrap()
    }

    #[test]
    fn compiled_forms_pass() {
        let f = BoolFunc::from_index_fn(VarSet::range(4), |i| i % 3 == 1).unwrap();
        let t = Vtree::balanced(&[VarId(0), VarId(1), VarId(2), VarId(3)]).unwrap();
        assert!(verify(&compile_dsnnf(&f, &t).unwrap()).unwrap().ok());
        let rep = verify(&compile_sdd(&f, &t).unwrap()).unwrap();
        assert!(rep.ok(), "{:?}", rep.violations);
        assert!(rep.decisions > 0);
    }

    #[test]
    fn overlapping_or_fails_determinism() {
        // Or(x, Or(x, y))
        let nodes = vec![
            Node::Input(VarId(0)),
            Node::Input(VarId(1)),
            Node::Or {
                vnode: None,
                children: vec![0, 1],
            },
            Node::Or {
                vnode: None,
                children: vec![0, 2],
            },
        ];
        let rep = verify(&hand_built(nodes, None)).unwrap();
        assert!(!rep.holds(Property::Determinism));
        // x ∨ y itself overlaps at x = y = 1
        let v = rep.violations.iter().find(|v| v.gate == 3).unwrap();
        assert_eq!(v.property, Property::Determinism);
        assert!(v.witness.as_ref().unwrap().get(VarId(0)).unwrap());
    }

    #[test]
    fn repeated_operand_fails_decomposability() {
        let t = Vtree::linear(&[VarId(0), VarId(1)]).unwrap();
        let root = t.root();
        let nodes = vec![
            Node::Input(VarId(0)),
            Node::And {
                vnode: root,
                parts: [0, 0],
            },
        ];
        let rep = verify(&hand_built(nodes, Some(t))).unwrap();
        assert!(!rep.holds(Property::Decomposability));
        assert!(!rep.holds(Property::Structuredness));
    }
}
