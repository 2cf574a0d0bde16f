use std::collections::HashSet;

use serde::Serialize;

use super::cover::{extract_cover, verify_cover};
use crate::boolfn::table::submasks;
use crate::boolfn::{BoolFunc, VarId, VarSet};
use crate::compile::CompiledForm;
use crate::error::{Error, Result};
use crate::vtree::VNodeId;

/// Default bound on the smaller side of the deduplicated matrix.
pub const RANK_LIMIT: usize = 1024;

/// Dense 0/1 matrix with rows and columns indexed by assignment indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CommMatrix {
    pub x1: VarSet,
    pub x2: VarSet,
    rows: Vec<Vec<u64>>,
    ncols: usize,
}

impl CommMatrix {
    pub fn new(f: &BoolFunc, x1: &VarSet, x2: &VarSet) -> Result<Self> {
        if !x1.is_disjoint(x2) || &x1.union(x2) != f.vars() {
            return Err(Error::Domain(format!(
                "{x1:?} and {x2:?} do not partition {:?}",
                f.vars()
            )));
        }
        let (m1, m2) = (x1.mask_in(f.vars())?, x2.mask_in(f.vars())?);
        let ncols = 1usize << x2.len();
        let words = ncols.div_ceil(64);
        let rows = submasks(m1)
            .map(|r| {
                let mut row = vec![0u64; words];
                for (j, c) in submasks(m2).enumerate() {
                    if f.get(r | c) {
                        row[j >> 6] |= 1 << (j & 63);
                    }
                }
                row
            })
            .collect();
        Ok(CommMatrix {
            x1: x1.clone(),
            x2: x2.clone(),
            rows,
            ncols,
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Entry for row assignment index `i` over X1 and column index `j` over X2.
    pub fn get(&self, i: usize, j: usize) -> bool {
        (self.rows[i][j >> 6] >> (j & 63)) & 1 == 1
    }

    /// Distinct nonzero rows, then distinct nonzero columns, as a small dense matrix.
    fn reduced(&self) -> Vec<Vec<u8>> {
        let mut seen = HashSet::new();
        let rows: Vec<&Vec<u64>> = self
            .rows
            .iter()
            .filter(|r| r.iter().any(|&w| w != 0) && seen.insert(*r))
            .collect();
        let mut seen = HashSet::new();
        let cols: Vec<Vec<u8>> = (0..self.ncols)
            .map(|j| {
                rows.iter()
                    .map(|r| ((r[j >> 6] >> (j & 63)) & 1) as u8)
                    .collect::<Vec<u8>>()
            })
            .filter(|c| c.iter().any(|&b| b != 0) && seen.insert(c.clone()))
            .collect();
        // transpose back so that rows are the shorter side
        if cols.len() <= rows.len() {
            cols
        } else {
            (0..rows.len())
                .map(|i| cols.iter().map(|c| c[i]).collect())
                .collect()
        }
    }
}

fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, p);
        }
        base = mul_mod(base, base, p);
        e >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for b in BASES {
        if n % b == 0 {
            return n == b;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    'outer: for b in BASES {
        let mut x = pow_mod(b, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Primes below 2^61 in decreasing order.
fn primes() -> impl Iterator<Item = u64> {
    let mut c = (1u64 << 61) - 1;
    std::iter::from_fn(move || {
        while !is_prime(c) {
            c -= 2;
        }
        let p = c;
        c -= 2;
        Some(p)
    })
}

fn rank_mod(m: &[Vec<u8>], p: u64) -> usize {
    let mut a: Vec<Vec<u64>> = m
        .iter()
        .map(|r| r.iter().map(|&b| b as u64).collect())
        .collect();
    let ncols = a.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..a.len()).find(|&r| a[r][col] != 0) else {
            continue;
        };
        a.swap(rank, piv);
        let iv = pow_mod(a[rank][col], p - 2, p);
        let (top, rest) = a.split_at_mut(rank + 1);
        let pivot = &top[rank];
        for row in rest {
            if row[col] != 0 {
                let factor = mul_mod(row[col], iv, p);
                for c in col..ncols {
                    let sub = mul_mod(factor, pivot[c], p);
                    row[c] = if row[c] >= sub {
                        row[c] - sub
                    } else {
                        row[c] + p - sub
                    };
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Exact rank over the rationals. The rank mod any prime is a lower bound.
/// If `r` is the largest rank seen over primes whose product exceeds the
/// Hadamard bound `(r+1)^{(r+1)/2}` on a 0/1 minor of order `r+1`, every such
/// minor is zero, so `r` is exact.
fn rank_exact(m: &[Vec<u8>]) -> usize {
    let full = m.len().min(m.first().map_or(0, Vec::len));
    let mut r = 0;
    let mut log_product = 0.0f64;
    for p in primes() {
        let rp = rank_mod(m, p);
        if rp > r {
            r = rp;
        }
        if r == full {
            return r;
        }
        log_product += (p as f64).log2();
        let k = (r + 1) as f64;
        // one spare bit against rounding in the float estimate
        if log_product > k / 2.0 * k.log2() + 1.0 {
            return r;
        }
    }
    unreachable!("the prime sequence is unbounded")
}

/// Fraction-free elimination over the integers.
#[cfg(test)]
fn rank_bareiss(m: &[Vec<u8>]) -> usize {
    use num_bigint::BigInt;
    use num_traits::Zero;
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .map(|r| r.iter().map(|&b| BigInt::from(b)).collect())
        .collect();
    let ncols = a.first().map_or(0, Vec::len);
    let mut prev = BigInt::from(1);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(piv) = (rank..a.len()).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        for r in rank + 1..a.len() {
            for c in col + 1..ncols {
                let v = &a[rank][col] * &a[r][c] - &a[r][col] * &a[rank][c];
                a[r][c] = v / &prev;
            }
            a[r][col] = BigInt::zero();
        }
        prev = a[rank][col].clone();
        rank += 1;
    }
    rank
}

/// Rank over the rationals of the communication matrix of `f` for `(x1, x2)`.
pub fn comm_rank(f: &BoolFunc, x1: &VarSet, x2: &VarSet) -> Result<usize> {
    comm_rank_with_limit(f, x1, x2, RANK_LIMIT)
}

pub fn comm_rank_with_limit(f: &BoolFunc, x1: &VarSet, x2: &VarSet, limit: usize) -> Result<usize> {
    let m = CommMatrix::new(f, x1, x2)?.reduced();
    if m.len() > limit {
        return Err(Error::Capacity {
            needed: m.len(),
            cap: limit,
        });
    }
    Ok(rank_exact(&m))
}

/// `⋀_i (¬x_i ∨ ¬y_i)` with `x_i = VarId(i)` and `y_i = VarId(n + i)`.
pub fn disjointness(n: u32) -> Result<BoolFunc> {
    let low = (1u64 << n) - 1;
    BoolFunc::from_index_fn(VarSet::range(2 * n), |i| (i & low) & (i >> n) == 0)
}

/// The two halves `X_n`, `Y_n` of [`disjointness`].
pub fn disjointness_blocks(n: u32) -> (VarSet, VarSet) {
    (VarSet::range(n), (n..2 * n).map(VarId).collect())
}

#[derive(Clone, Debug, Serialize)]
pub struct LowerBoundReport {
    pub node: VNodeId,
    pub cover_size: usize,
    pub cover_verified: bool,
    pub rank: usize,
    pub form_size: usize,
    pub pass: bool,
}

/// Extract a cover at `v`, verify it, and compare its size with the rank
/// of the communication matrix for the same partition and with the form size.
pub fn cover_lower_bound_check(form: &CompiledForm, v: VNodeId) -> Result<LowerBoundReport> {
    let f = form.to_function()?;
    let cover = extract_cover(form, v)?;
    let check = verify_cover(&cover, &f)?;
    let rank = comm_rank(&f, &cover.x1, &cover.x2)?;
    let pass = check.ok() && rank <= cover.len() && cover.len() <= form.size();
    Ok(LowerBoundReport {
        node: v,
        cover_size: cover.len(),
        cover_verified: check.ok(),
        rank,
        form_size: form.size(),
        pass,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::compile_sdd;
    use crate::vtree::Vtree;
    use proptest::prelude::*;

    #[test]
    fn small_disjointness() {
        assert_eq!(disjointness(1).unwrap().model_count(), 3);
        assert_eq!(disjointness(2).unwrap().model_count(), 9);
        assert!(disjointness(3).unwrap().get(0));
        let (x, y) = disjointness_blocks(1);
        assert_eq!(comm_rank(&disjointness(1).unwrap(), &x, &y).unwrap(), 2);
    }

    #[test]
    fn constants_and_bad_partitions() {
        let top = BoolFunc::constant(VarSet::range(4), true).unwrap();
        let (x, y) = disjointness_blocks(2);
        assert_eq!(comm_rank(&top, &x, &y).unwrap(), 1);
        let bot = BoolFunc::constant(VarSet::range(4), false).unwrap();
        assert_eq!(comm_rank(&bot, &x, &y).unwrap(), 0);
        assert!(comm_rank(&top, &x, &VarSet::range(1)).is_err());
    }

    #[test]
    fn limit_applies_after_deduplication() {
        let f = disjointness(3).unwrap();
        let (x, y) = disjointness_blocks(3);
        assert!(comm_rank_with_limit(&f, &x, &y, 4)
            .unwrap_err()
            .is_capacity());
        // 2^12 columns, but only two distinct rows
        let g = BoolFunc::from_index_fn(VarSet::range(13), |i| i & 1 == 1).unwrap();
        let rest: VarSet = (1..13).map(VarId).collect();
        assert_eq!(
            comm_rank_with_limit(&g, &VarSet::range(1), &rest, 4).unwrap(),
            1
        );
    }

    #[test]
    fn bareiss_on_a_singular_matrix() {
        let m = vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 2, 1]];
        assert_eq!(rank_bareiss(&m), 2);
        assert_eq!(rank_exact(&m), 2);
        let m = vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]];
        assert_eq!(rank_bareiss(&m), 3);
        assert_eq!(rank_exact(&m), 3);
        // regular over the rationals but singular mod 2
        assert_eq!(rank_mod(&m, 2), 2);
    }

    #[test]
    fn lower_bound_on_compiled_disjointness() {
        let f = disjointness(3).unwrap();
        let (x, y) = disjointness_blocks(3);
        let order: Vec<VarId> = x.iter().chain(y.iter()).collect();
        let t = Vtree::balanced(&order).unwrap();
        let form = compile_sdd(&f, &t).unwrap();
        let left = t.children(t.root())[0];
        assert_eq!(t.vars(left), &x);
        let rep = cover_lower_bound_check(&form, left).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.rank, 8);
        assert!(form.size() >= 8);
    }

    #[test]
    fn primes_are_prime() {
        let ps: Vec<u64> = primes().take(3).collect();
        assert_eq!(ps[0], (1u64 << 61) - 1);
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert!(is_prime(97) && !is_prime(91) && !is_prime(1));
    }

    #[test]
    fn complement_of_disjointness_loses_one() {
        // J - D has rank 2^n - 1
        let f = disjointness(4).unwrap().not();
        let (x, y) = disjointness_blocks(4);
        assert_eq!(comm_rank(&f, &x, &y).unwrap(), 15);
        assert_eq!(rank_by_bareiss(&f, &x, &y), 15);
    }

    fn rank_by_bareiss(f: &BoolFunc, x1: &VarSet, x2: &VarSet) -> usize {
        let m = CommMatrix::new(f, x1, x2).unwrap();
        let dense: Vec<Vec<u8>> = (0..m.nrows())
            .map(|i| (0..m.ncols()).map(|j| m.get(i, j) as u8).collect())
            .collect();
        rank_bareiss(&dense)
    }

    proptest! {
        #[test]
        fn rank_is_symmetric_and_exact(bits in any::<u64>(), split in 1u32..5) {
            let f = BoolFunc::from_index_fn(VarSet::range(6), |i| (bits >> i) & 1 == 1).unwrap();
            let x1 = VarSet::range(split);
            let x2 = VarSet::range(6).difference(&x1);
            let r = comm_rank(&f, &x1, &x2).unwrap();
            prop_assert_eq!(r, comm_rank(&f, &x2, &x1).unwrap());
            prop_assert_eq!(r, rank_by_bareiss(&f, &x1, &x2));
        }
    }
}
