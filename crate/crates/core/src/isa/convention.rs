//! Variable layout and bit order for the indirect storage function.
//!
//! `y_i = VarId(i-1)` for `i in 1..=k` and `z_j = VarId(k+j-1)` for
//! `j in 1..=2^m`. Block `i` is `x_{i,t} = z_{(i-1)m+t}`. Addresses are read
//! most significant bit first: `(a_1..a_k)` encodes `i-1` with `a_1` high.

use crate::boolfn::VarId;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
pub struct IsaParams {
    pub k: u32,
    pub m: u32,
}

impl IsaParams {
    /// Requires `2^k * m = 2^m`.
    pub fn new(k: u32, m: u32) -> Result<Self> {
        if k == 0 || m == 0 || m > 5 || (1u64 << k) * m as u64 != 1u64 << m {
            return Err(Error::Params(format!(
                "need k, m >= 1 with 2^k * m = 2^m, got k={k}, m={m}"
            )));
        }
        Ok(IsaParams { k, m })
    }

    /// `k + 2^m`.
    pub fn n(&self) -> u32 {
        self.k + self.z_count()
    }

    pub fn z_count(&self) -> u32 {
        1 << self.m
    }

    pub fn blocks(&self) -> u32 {
        1 << self.k
    }

    /// `y_i`, 1-based.
    pub fn y(&self, i: u32) -> VarId {
        VarId(i - 1)
    }

    /// `z_j`, 1-based.
    pub fn z(&self, j: u32) -> VarId {
        VarId(self.k + j - 1)
    }

    /// 1-based index `j` of `z_j` at position `t` of block `i`.
    pub fn block_index(&self, i: u32, t: u32) -> u32 {
        (i - 1) * self.m + t
    }

    pub fn names(&self) -> Vec<String> {
        let ys = (1..=self.k).map(|i| format!("y{i}"));
        ys.chain((1..=self.z_count()).map(|j| format!("z{j}")))
            .collect()
    }
}

/// Value of a bit string read most significant bit first.
pub fn decode(bits: impl IntoIterator<Item = bool>) -> u32 {
    bits.into_iter().fold(0, |acc, b| (acc << 1) | b as u32)
}

/// `width` bits of `value`, most significant first.
pub fn encode(value: u32, width: u32) -> Vec<bool> {
    (0..width).rev().map(|s| (value >> s) & 1 == 1).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn params() {
        assert_eq!(IsaParams::new(1, 2).unwrap().n(), 5);
        assert_eq!(IsaParams::new(2, 4).unwrap().n(), 18);
        assert!(IsaParams::new(2, 3).is_err());
        assert!(IsaParams::new(0, 1).is_err());
    }

    #[test]
    fn bit_order() {
        assert_eq!(decode([true, false]), 2);
        assert_eq!(encode(2, 3), vec![false, true, false]);
        for v in 0..16 {
            assert_eq!(decode(encode(v, 4)), v);
        }
        let p = IsaParams::new(2, 4).unwrap();
        assert_eq!(p.z(p.block_index(4, 4)), VarId(17));
    }
}
