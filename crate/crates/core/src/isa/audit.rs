use serde::Serialize;

use super::build::{isa_function, isa_sdd};
use super::convention::IsaParams;
use crate::analysis::verify;
use crate::compile::{CompiledForm, Node};
use crate::error::Result;

/// Gate counts of the indirect storage SDD against the counting bounds of
/// its construction.
#[derive(Clone, Debug, Serialize)]
pub struct IsaAudit {
    pub k: u32,
    pub m: u32,
    pub n: u32,
    pub size: usize,
    /// And gates at the `y` spine nodes `w_i`.
    pub ands_w: usize,
    /// And gates at the `z` nodes `v_j`.
    pub ands_v: usize,
    pub ors: usize,
    /// Literal and constant gates.
    pub inputs: usize,
    /// Most distinct variables in one prime at a `v_j` node.
    pub max_prime_vars: usize,
    pub bound_ands_w: u64,
    pub bound_ands_v: u64,
    pub bound_inputs: u64,
    /// Total bound `B(n)`, counting at most one Or gate per And gate.
    pub bound_total: u64,
    /// `B(n) / n^{13/5}`.
    pub constant: f64,
    pub equivalent: bool,
    pub verified: bool,
    pub pass: bool,
}

/// Build the SDD, check it against the function exhaustively, verify it and
/// compare its gate counts with the bounds.
pub fn isa_size_audit(p: IsaParams) -> Result<IsaAudit> {
    let form = isa_sdd(p)?;
    let equivalent = form.to_function()? == isa_function(p)?;
    let verified = verify(&form)?.ok();
    Ok(audit_form(p, &form, equivalent, verified))
}

pub(crate) fn audit_form(
    p: IsaParams,
    form: &CompiledForm,
    equivalent: bool,
    verified: bool,
) -> IsaAudit {
    let t = form.vtree().expect("isa forms carry their vtree");
    let is_w = |v: usize| {
        t.children(v).first().is_some_and(|&l| {
            t.node(l).is_leaf() && t.vars(l).iter().next().is_some_and(|x| x.0 < p.k)
        })
    };
    let gate_vars = form.gate_vars();
    let reach = form.reachable();
    let (mut ands_w, mut ands_v, mut ors, mut inputs, mut max_prime_vars) = (0, 0, 0, 0, 0);
    for (g, node) in form.nodes().iter().enumerate() {
        if !reach[g] {
            continue;
        }
        match node {
            Node::And { vnode, parts } => {
                if is_w(*vnode) {
                    ands_w += 1;
                } else {
                    ands_v += 1;
                    max_prime_vars = max_prime_vars.max(gate_vars[parts[0]].len());
                }
            }
            Node::Or { .. } => ors += 1,
            _ => inputs += 1,
        }
    }
    let n = p.n() as u64;
    let bound_ands_v = (3u64.pow(p.m + 1) + 1) * (2 * n + 2);
    let bound_ands_w = (1u64 << (p.k + 1)) - 2;
    let bound_inputs = 2 * n + 2;
    let bound_total = 2 * (bound_ands_v + bound_ands_w) + bound_inputs;
    let size = reach.iter().filter(|r| **r).count();
    let pass = equivalent
        && verified
        && max_prime_vars <= p.m as usize + 1
        && ands_v as u64 <= bound_ands_v
        && ands_w as u64 <= bound_ands_w
        && inputs as u64 <= bound_inputs
        && ors <= ands_v + ands_w
        && size as u64 <= bound_total;
    IsaAudit {
        k: p.k,
        m: p.m,
        n: p.n(),
        size,
        ands_w,
        ands_v,
        ors,
        inputs,
        max_prime_vars,
        bound_ands_w,
        bound_ands_v,
        bound_inputs,
        bound_total,
        constant: bound_total as f64 / (n as f64).powf(2.6),
        equivalent,
        verified,
        pass,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smallest_instance_passes() {
        let a = isa_size_audit(IsaParams::new(1, 2).unwrap()).unwrap();
        assert!(a.pass, "{a:?}");
        assert_eq!(a.ands_w, 2);
        assert!(a.max_prime_vars <= 3);
    }
}
