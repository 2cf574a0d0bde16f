use serde::Serialize;

use crate::analysis::cover_lower_bound_check;
use crate::boolfn::{BoolFunc, VarId, VarSet, Variables};
use crate::circuit::{Circuit, CircuitBuilder};
use crate::compile::compile_sdd;
use crate::error::{Error, Result};
use crate::vtree::{VNodeId, Vtree, VtreeBuilder};

/// Variable layout of the family for given `k` and `n`:
/// `x_l = l-1`, `y_m = n+m-1`, `z^i_{l,m} = 2n + (i-1)n² + (l-1)n + (m-1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct HLayout {
    pub k: u32,
    pub n: u32,
}

impl HLayout {
    pub fn new(k: u32, n: u32) -> Result<Self> {
        if k == 0 || n == 0 {
            return Err(Error::Params(format!("need k, n >= 1, got k={k}, n={n}")));
        }
        Ok(HLayout { k, n })
    }

    pub fn x(&self, l: u32) -> VarId {
        VarId(l - 1)
    }

    pub fn y(&self, m: u32) -> VarId {
        VarId(self.n + m - 1)
    }

    pub fn z(&self, i: u32, l: u32, m: u32) -> VarId {
        let n = self.n;
        VarId(2 * n + (i - 1) * n * n + (l - 1) * n + (m - 1))
    }

    pub fn var_count(&self) -> u32 {
        2 * self.n + self.k * self.n * self.n
    }

    pub fn xs(&self) -> VarSet {
        (1..=self.n).map(|l| self.x(l)).collect()
    }

    pub fn ys(&self) -> VarSet {
        (1..=self.n).map(|m| self.y(m)).collect()
    }

    pub fn zs(&self, i: u32) -> VarSet {
        let n = self.n;
        (1..=n)
            .flat_map(|l| (1..=n).map(move |m| (l, m)))
            .map(|(l, m)| self.z(i, l, m))
            .collect()
    }

    pub fn names(&self) -> Variables {
        let n = self.n;
        let mut names: Vec<String> = (1..=n).map(|l| format!("x{l}")).collect();
        names.extend((1..=n).map(|m| format!("y{m}")));
        for i in 1..=self.k {
            for l in 1..=n {
                names.extend((1..=n).map(|m| format!("z{i}_{l}_{m}")));
            }
        }
        Variables::from_names(names).expect("distinct")
    }

    /// The two blocks read by `H^i`.
    pub fn blocks(&self, i: u32) -> Result<(VarSet, VarSet)> {
        if i > self.k {
            return Err(Error::Params(format!(
                "need i <= k, got i={i}, k={}",
                self.k
            )));
        }
        Ok(if i == 0 {
            (self.xs(), self.zs(1))
        } else if i == self.k {
            (self.zs(i), self.ys())
        } else {
            (self.zs(i), self.zs(i + 1))
        })
    }

    /// The `n²` conjunctive terms of `H^i`.
    fn terms(&self, i: u32) -> Vec<(VarId, VarId)> {
        let n = self.n;
        let mut out = Vec::new();
        for l in 1..=n {
            for m in 1..=n {
                out.push(if i == 0 {
                    (self.x(l), self.z(1, l, m))
                } else if i == self.k {
                    (self.z(i, l, m), self.y(m))
                } else {
                    (self.z(i, l, m), self.z(i + 1, l, m))
                });
            }
        }
        out
    }
}

/// `H^i_{k,n}` as a function over the variables it reads.
pub fn h_family(k: u32, n: u32, i: u32) -> Result<BoolFunc> {
    let lay = HLayout::new(k, n)?;
    let (a, b) = lay.blocks(i)?;
    let vars = a.union(&b);
    let pos = |x: VarId| vars.position(x).unwrap();
    let terms: Vec<u64> = lay
        .terms(i)
        .into_iter()
        .map(|(u, v)| (1u64 << pos(u)) | (1u64 << pos(v)))
        .collect();
    BoolFunc::from_index_fn(vars, |idx| terms.iter().any(|&t| idx & t == t))
}

/// `H^i_{k,n}` as a monotone circuit over all `2n + kn²` variables.
pub fn h_family_circuit(k: u32, n: u32, i: u32) -> Result<Circuit> {
    let lay = HLayout::new(k, n)?;
    lay.blocks(i)?;
    let mut b = CircuitBuilder::with_names(lay.names());
    let inputs: Vec<usize> = (0..lay.var_count())
        .map(|v| b.input_var(VarId(v)))
        .collect();
    let ands: Vec<usize> = lay
        .terms(i)
        .into_iter()
        .map(|(u, v)| b.and(vec![inputs[u.index()], inputs[v.index()]]))
        .collect();
    let out = b.or(ands);
    b.build(out)
}

fn balanced_in(b: &mut VtreeBuilder, vars: &[VarId]) -> VNodeId {
    match vars {
        [x] => b.leaf(*x),
        _ => {
            let (l, r) = vars.split_at(vars.len() / 2);
            let (l, r) = (balanced_in(b, l), balanced_in(b, r));
            b.node(l, r)
        }
    }
}

/// The adversarial vtree: the X block in one subtree, every Z block and then
/// the Y block in its sibling, each block balanced on its own.
pub fn separating_vtree(k: u32, n: u32) -> Result<Vtree> {
    let lay = HLayout::new(k, n)?;
    let mut b = VtreeBuilder::new();
    let x = balanced_in(&mut b, lay.xs().as_slice());
    let mut blocks: Vec<VNodeId> = (1..=k)
        .map(|i| balanced_in(&mut b, lay.zs(i).as_slice()))
        .collect();
    blocks.push(balanced_in(&mut b, lay.ys().as_slice()));
    // combine Z^1..Z^k, Y pairwise, keeping the order
    while blocks.len() > 1 {
        let mut next = Vec::new();
        for pair in blocks.chunks(2) {
            next.push(match pair {
                [l, r] => b.node(*l, *r),
                [one] => *one,
                _ => unreachable!(),
            });
        }
        blocks = next;
    }
    let root = b.node(x, blocks[0]);
    b.build(root)
}

/// A vtree node whose variables, restricted to `vars`, are exactly `block`.
pub fn node_with_vars(t: &Vtree, block: &VarSet) -> Option<VNodeId> {
    (0..t.len()).find(|&v| t.vars(v) == block)
}

/// Nodes of `t` holding between `2n/5` and `4n/5` of the X ∪ Y variables.
pub fn balanced_nodes(t: &Vtree, lay: &HLayout) -> Vec<VNodeId> {
    let xy = lay.xs().union(&lay.ys());
    let n = lay.n as usize;
    t.postorder()
        .into_iter()
        .filter(|&v| {
            let c = t.vars(v).intersection(&xy).len();
            5 * c >= 2 * n && 5 * c <= 4 * n
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum VtreeMode {
    /// The X block separated from the Z blocks.
    Separating,
    /// A balanced vtree in variable order, cut at the first node in the
    /// balance window.
    Auto,
}

#[derive(Clone, Debug, Serialize)]
pub struct HardnessRow {
    pub n: u32,
    pub i: u32,
    pub vars: usize,
    pub size: usize,
    /// Variables on the measured side of the cut.
    pub cut: usize,
    pub cover_size: usize,
    pub rank: usize,
    /// `2^{n'} - 1` where `n'` is the number of term groups split by the cut.
    pub floor: Option<u64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct HardnessReport {
    pub k: u32,
    pub mode: VtreeMode,
    pub rows: Vec<HardnessRow>,
}

impl HardnessReport {
    pub fn pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,i,vars,size,cut,cover_size,rank,floor,pass\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                r.n,
                r.i,
                r.vars,
                r.size,
                r.cut,
                r.cover_size,
                r.rank,
                r.floor.map_or(String::new(), |f| f.to_string()),
                r.pass
            ));
        }
        s
    }
}

/// Compile every `H^i_{k,n}` under a shared vtree and check the rank floor at
/// the cut separating the two blocks the function reads.
pub fn hardness_experiment(
    k: u32,
    ns: impl IntoIterator<Item = u32>,
    mode: VtreeMode,
) -> Result<HardnessReport> {
    let mut rows = Vec::new();
    for n in ns {
        let lay = HLayout::new(k, n)?;
        let full = match mode {
            VtreeMode::Separating => separating_vtree(k, n)?,
            VtreeMode::Auto => {
                Vtree::balanced(&(0..lay.var_count()).map(VarId).collect::<Vec<_>>())?
            }
        };
        let cut =
            match mode {
                VtreeMode::Separating => None,
                VtreeMode::Auto => Some(*balanced_nodes(&full, &lay).first().ok_or_else(|| {
                    Error::Vtree(format!("no node in the balance window for n={n}"))
                })?),
            };
        for i in 0..=k {
            let f = h_family(k, n, i)?;
            let t = full.prune_to(f.vars())?;
            let (first, _) = lay.blocks(i)?;
            let side = match cut {
                None => first.clone(),
                Some(v) => full.vars(v).intersection(f.vars()),
            };
            let form = compile_sdd(&f, &t)?;
            let Some(v) = node_with_vars(&t, &side) else {
                rows.push(HardnessRow {
                    n,
                    i,
                    vars: f.arity(),
                    size: form.size(),
                    cut: side.len(),
                    cover_size: 0,
                    rank: 0,
                    floor: None,
                    pass: side.is_empty(),
                });
                continue;
            };
            let rep = cover_lower_bound_check(&form, v)?;
            let floor = match mode {
                VtreeMode::Separating => {
                    let groups = if i == 0 || i == k { n } else { n * n };
                    Some((1u64 << groups.min(63)) - 1)
                }
                VtreeMode::Auto => None,
            };
            let above = |x: usize| floor.map_or(true, |fl| x as u64 >= fl);
            rows.push(HardnessRow {
                n,
                i,
                vars: f.arity(),
                size: form.size(),
                cut: side.len(),
                cover_size: rep.cover_size,
                rank: rep.rank,
                floor,
                pass: rep.pass && above(rep.rank) && above(form.size()),
            });
        }
    }
    Ok(HardnessReport { k, mode, rows })
}
