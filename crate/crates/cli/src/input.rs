//! Loading circuits, forms and vtrees named on the command line.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use twsdd_core::circuit::{parse_circuit, parse_dimacs};
use twsdd_core::compile::{parse_form, CompiledForm};
use twsdd_core::treedec::{make_nice, min_fill_decompose};
use twsdd_core::vtree::{parse_vtree, write_vtree};
use twsdd_core::{Circuit, Error, VNodeId, VarId, Variables, Vtree, VtreeBuilder};

/// Malformed command-line values. Reported with exit code 1 like parse errors.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

pub fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

/// A `.bc` circuit, or DIMACS CNF when the file ends in `.cnf`/`.dimacs`.
pub fn load_circuit(path: &Path) -> Result<Circuit> {
    let text = read(path)?;
    let dimacs = matches!(
        path.extension().and_then(|e| e.to_str()),
        Some("cnf" | "dimacs")
    );
    let c = if dimacs {
        parse_dimacs(&text)
    } else {
        parse_circuit(&text)
    };
    c.with_context(|| format!("in {}", path.display()))
}

pub fn load_form(path: &Path) -> Result<CompiledForm> {
    parse_form(&read(path)?).with_context(|| format!("in {}", path.display()))
}

/// Where the vtree of a compilation comes from.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VtreeSource {
    Derive,
    Linear(Vec<String>),
    Balanced,
    Random,
    Isa(u32, u32),
    File(String),
}

impl std::str::FromStr for VtreeSource {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let names = |rest: &str| {
            rest.split(',')
                .map(|x| x.trim().to_string())
                .filter(|x| !x.is_empty())
                .collect()
        };
        Ok(match s {
            "derive" => VtreeSource::Derive,
            "balanced" => VtreeSource::Balanced,
            "random" => VtreeSource::Random,
            "linear" => VtreeSource::Linear(Vec::new()),
            _ => {
                if let Some(rest) = s.strip_prefix("linear:") {
                    VtreeSource::Linear(names(rest))
                } else if let Some(rest) = s.strip_prefix("isa:") {
                    let (k, m) = rest.split_once(',').ok_or("expected isa:<k>,<m>")?;
                    let k = k.trim().parse().map_err(|_| format!("bad k `{k}`"))?;
                    let m = m.trim().parse().map_err(|_| format!("bad m `{m}`"))?;
                    VtreeSource::Isa(k, m)
                } else {
                    VtreeSource::File(s.to_string())
                }
            }
        })
    }
}

/// A vtree over exactly the circuit's variables, and the width of the tree
/// decomposition it was derived from, if any.
pub fn vtree_for(c: &Circuit, src: &VtreeSource, seed: u64) -> Result<(Vtree, Option<usize>)> {
    let vars: Vec<VarId> = c.vars().iter().collect();
    if vars.is_empty() {
        bail!(usage(
            "the circuit has no variables; a vtree needs at least one"
        ));
    }
    let names = c.names();
    let lookup = |name: &str| {
        names
            .lookup(name)
            .ok_or_else(|| usage(format!("unknown variable `{name}`")))
    };
    let (t, width) = match src {
        VtreeSource::Derive => {
            let td = min_fill_decompose(&c.underlying_graph());
            let t = Vtree::from_circuit_td(c, &make_nice(&td))?;
            (t, Some(td.width()))
        }
        VtreeSource::Balanced => (Vtree::balanced(&vars)?, None),
        VtreeSource::Linear(order) if order.is_empty() => (Vtree::linear(&vars)?, None),
        VtreeSource::Linear(order) => {
            let order = order
                .iter()
                .map(|n| lookup(n))
                .collect::<Result<Vec<_>>>()?;
            (Vtree::linear(&order)?, None)
        }
        VtreeSource::Random => (random_vtree(&vars, seed)?, None),
        VtreeSource::Isa(k, m) => {
            let p = twsdd_core::isa::IsaParams::new(*k, *m)?;
            let own = Variables::from_names(p.names())?;
            let text = write_vtree(&Vtree::isa(*k, *m)?, &own);
            (
                parse_vtree(&text, names).map_err(|e| usage(format!("isa vtree: {e}")))?,
                None,
            )
        }
        VtreeSource::File(path) => {
            let path = Path::new(path);
            let t = parse_vtree(&read(path)?, names)
                .with_context(|| format!("in {}", path.display()))?;
            (t, None)
        }
    };
    if let Some(x) = c.vars().iter().find(|x| !t.all_vars().contains(*x)) {
        bail!(usage(format!(
            "the vtree has no leaf for `{}`",
            names.display(x)
        )));
    }
    Ok((t.prune_to(c.vars())?, width))
}

/// Uniformly random shape: shuffle, then split at random points.
pub fn random_vtree(vars: &[VarId], seed: u64) -> twsdd_core::Result<Vtree> {
    fn go(b: &mut VtreeBuilder, xs: &[VarId], rng: &mut ChaCha8Rng) -> VNodeId {
        if xs.len() == 1 {
            return b.leaf(xs[0]);
        }
        let mid = rng.gen_range(1..xs.len());
        let l = go(b, &xs[..mid], rng);
        let r = go(b, &xs[mid..], rng);
        b.node(l, r)
    }
    if vars.is_empty() {
        return Err(Error::Vtree("random vtree over no variables".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut xs = vars.to_vec();
    xs.shuffle(&mut rng);
    let mut b = VtreeBuilder::new();
    let root = go(&mut b, &xs, &mut rng);
    b.build(root)
}

/// `a,b,c` or `a..b` (inclusive).
pub fn parse_list(s: &str) -> Result<Vec<u32>> {
    if let Some((a, b)) = s.split_once("..") {
        let a: u32 = a
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad range `{s}`")))?;
        let b: u32 = b
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad range `{s}`")))?;
        return Ok((a..=b).collect());
    }
    s.split(',')
        .map(|x| {
            x.trim()
                .parse()
                .map_err(|_| anyhow!(usage(format!("bad number `{x}` in `{s}`"))))
        })
        .collect()
}
