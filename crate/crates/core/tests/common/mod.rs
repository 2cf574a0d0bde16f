#![allow(dead_code)]

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use twsdd_core::boolfn::BoolFunc;
use twsdd_core::circuit::{Circuit, CircuitBuilder};
use twsdd_core::treedec::{make_nice, min_fill_decompose};
use twsdd_core::{Assignment, VarId, VarSet, Vtree, VtreeBuilder};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random circuit on `1..=max_vars` inputs with at most `max_gates` gates.
pub fn random_circuit(rng: &mut ChaCha8Rng, max_vars: u32, max_gates: usize) -> Circuit {
    let n = rng.gen_range(1..=max_vars);
    let mut b = CircuitBuilder::new();
    let mut gates: Vec<usize> = (1..=n).map(|i| b.input(&format!("x{i}"))).collect();
    let extra = rng.gen_range(1..=max_gates - n as usize);
    for _ in 0..extra {
        let pick = |rng: &mut ChaCha8Rng, gates: &[usize]| {
            // favour recent gates so that the output reaches most of the circuit
            let lo = gates.len().saturating_sub(8);
            if rng.gen_bool(0.7) {
                gates[rng.gen_range(lo..gates.len())]
            } else {
                gates[rng.gen_range(0..gates.len())]
            }
        };
        let g = match rng.gen_range(0..20) {
            0 => b.constant(rng.gen_bool(0.5)),
            1..=4 => {
                let c = pick(rng, &gates);
                b.not(c)
            }
            k => {
                let arity = rng.gen_range(2..=3);
                let cs: Vec<usize> = (0..arity).map(|_| pick(rng, &gates)).collect();
                if k % 2 == 0 {
                    b.and(cs)
                } else {
                    b.or(cs)
                }
            }
        };
        gates.push(g);
    }
    let out = *gates.last().unwrap();
    b.build(out).unwrap()
}

pub fn derived_vtree(c: &Circuit, f: &BoolFunc) -> Vtree {
    full_derived_vtree(c).prune_to(f.vars()).unwrap()
}

/// Vtree from a nice min-fill decomposition, before pruning dummies.
pub fn full_derived_vtree(c: &Circuit) -> Vtree {
    let ntd = make_nice(&min_fill_decompose(&c.underlying_graph()));
    Vtree::from_circuit_td(c, &ntd).unwrap()
}

pub fn linear_vtree(f: &BoolFunc) -> Vtree {
    Vtree::linear(f.vars().as_slice()).unwrap()
}

pub fn random_vtree(rng: &mut ChaCha8Rng, vars: &VarSet) -> Vtree {
    fn go(rng: &mut ChaCha8Rng, b: &mut VtreeBuilder, xs: &[VarId]) -> usize {
        if xs.len() == 1 {
            return b.leaf(xs[0]);
        }
        let cut = rng.gen_range(1..xs.len());
        let l = go(rng, b, &xs[..cut]);
        let r = go(rng, b, &xs[cut..]);
        b.node(l, r)
    }
    let mut xs: Vec<VarId> = vars.iter().collect();
    xs.shuffle(rng);
    let mut b = VtreeBuilder::new();
    let root = go(rng, &mut b, &xs);
    b.build(root).unwrap()
}

/// The three vtree kinds used throughout the suite.
pub fn vtrees(rng: &mut ChaCha8Rng, c: &Circuit, f: &BoolFunc) -> Vec<(&'static str, Vtree)> {
    vec![
        ("derived", derived_vtree(c, f)),
        ("linear", linear_vtree(f)),
        ("random", random_vtree(rng, f.vars())),
    ]
}

/// All assignments of `vars`, by explicit enumeration.
pub fn assignments(vars: &VarSet) -> impl Iterator<Item = Assignment> + '_ {
    (0..1u64 << vars.len()).map(move |idx| {
        Assignment::new(
            vars.iter()
                .enumerate()
                .map(|(i, x)| (x, (idx >> i) & 1 == 1)),
        )
        .unwrap()
    })
}

/// Number of distinct cofactors of `f` over assignments of `y ∩ vars(f)`,
/// computed pointwise.
pub fn brute_factor_count(f: &BoolFunc, y: &VarSet) -> usize {
    let y = y.intersection(f.vars());
    let rest = f.vars().difference(&y);
    let mut seen = HashSet::new();
    for a in assignments(&y) {
        let row: Vec<bool> = assignments(&rest)
            .map(|b| f.eval(&a.union(&b).unwrap()).unwrap())
            .collect();
        seen.insert(row);
    }
    seen.len()
}

/// A corpus of random circuits with the functions they compute. Circuits
/// whose function has no variables are skipped.
pub fn corpus(seed: u64, count: usize) -> Vec<(Circuit, BoolFunc)> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let c = random_circuit(&mut r, 10, 40);
        let f = c.to_function().unwrap();
        if !f.vars().is_empty() {
            out.push((c, f));
        }
    }
    out
}
