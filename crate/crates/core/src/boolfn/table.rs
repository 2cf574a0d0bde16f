//! Packed truth tables and the index bit-twiddling shared by every module.
//!
//! Index convention: for a function over the ordered variable set
//! `{v_0 < v_1 < ... < v_{n-1}}`, the assignment `b` lives at index
//! `sum_i b(v_i) << i` (least significant bit = smallest variable id).

use std::fmt;

/// Scatter the low bits of `src` into the set positions of `mask`.
#[inline]
pub fn deposit(mut src: u64, mut mask: u64) -> u64 {
    let mut out = 0;
    while mask != 0 {
        let low = mask & mask.wrapping_neg();
        if src & 1 == 1 {
            out |= low;
        }
        src >>= 1;
        mask &= mask - 1;
    }
    out
}

/// Gather the bits of `src` at the set positions of `mask` into the low bits.
#[inline]
pub fn extract(src: u64, mut mask: u64) -> u64 {
    let mut out = 0;
    let mut bit = 0;
    while mask != 0 {
        let low = mask & mask.wrapping_neg();
        if src & low != 0 {
            out |= 1 << bit;
        }
        bit += 1;
        mask &= mask - 1;
    }
    out
}

/// Iterate over all submasks of `mask` in increasing order, which is the
/// order of `deposit(0..2^popcount, mask)`.
pub fn submasks(mask: u64) -> impl Iterator<Item = u64> {
    let mut next = Some(0u64);
    std::iter::from_fn(move || {
        let cur = next?;
        let succ = cur.wrapping_sub(mask) & mask;
        next = if succ == 0 { None } else { Some(succ) };
        Some(cur)
    })
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruthTable {
    nvars: u32,
    words: Vec<u64>,
}

fn word_count(nvars: u32) -> usize {
    if nvars <= 6 {
        1
    } else {
        1 << (nvars - 6)
    }
}

fn tail_mask(nvars: u32) -> u64 {
    if nvars >= 6 {
        !0
    } else {
        (1u64 << (1u32 << nvars)) - 1
    }
}

impl TruthTable {
    pub fn zeros(nvars: u32) -> Self {
        TruthTable {
            nvars,
            words: vec![0; word_count(nvars)],
        }
    }

    pub fn ones(nvars: u32) -> Self {
        let mut t = TruthTable {
            nvars,
            words: vec![!0; word_count(nvars)],
        };
        t.normalize();
        t
    }

    /// Table of the projection onto the variable at position `pos`.
    pub fn projection(nvars: u32, pos: u32) -> Self {
        const PATTERNS: [u64; 6] = [
            0xAAAA_AAAA_AAAA_AAAA,
            0xCCCC_CCCC_CCCC_CCCC,
            0xF0F0_F0F0_F0F0_F0F0,
            0xFF00_FF00_FF00_FF00,
            0xFFFF_0000_FFFF_0000,
            0xFFFF_FFFF_0000_0000,
        ];
        assert!(pos < nvars);
        let mut t = TruthTable::zeros(nvars);
        if pos < 6 {
            t.words.iter_mut().for_each(|w| *w = PATTERNS[pos as usize]);
        } else {
            let stride = 1usize << (pos - 6);
            for (i, w) in t.words.iter_mut().enumerate() {
                if (i / stride) % 2 == 1 {
                    *w = !0;
                }
            }
        }
        t.normalize();
        t
    }

    pub fn from_fn(nvars: u32, mut f: impl FnMut(u64) -> bool) -> Self {
        let mut t = TruthTable::zeros(nvars);
        for i in 0..(1u64 << nvars) {
            if f(i) {
                t.set(i, true);
            }
        }
        t
    }

    pub fn nvars(&self) -> u32 {
        self.nvars
    }

    pub fn len(&self) -> u64 {
        1u64 << self.nvars
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    #[inline]
    pub fn get(&self, idx: u64) -> bool {
        (self.words[(idx >> 6) as usize] >> (idx & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, idx: u64, value: bool) {
        let w = &mut self.words[(idx >> 6) as usize];
        if value {
            *w |= 1 << (idx & 63);
        } else {
            *w &= !(1 << (idx & 63));
        }
    }

    fn normalize(&mut self) {
        let m = tail_mask(self.nvars);
        if let Some(last) = self.words.last_mut() {
            *last &= m;
        }
    }

    pub fn count_ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn is_ones(&self) -> bool {
        *self == TruthTable::ones(self.nvars)
    }

    pub fn not(&self) -> Self {
        let mut t = TruthTable {
            nvars: self.nvars,
            words: self.words.iter().map(|w| !w).collect(),
        };
        t.normalize();
        t
    }

    pub fn and(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a & b)
    }

    pub fn or(&self, other: &Self) -> Self {
        self.zip(other, |a, b| a | b)
    }

    pub fn and_assign(&mut self, other: &Self) {
        assert_eq!(self.nvars, other.nvars);
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a &= b);
    }

    pub fn or_assign(&mut self, other: &Self) {
        assert_eq!(self.nvars, other.nvars);
        self.words
            .iter_mut()
            .zip(&other.words)
            .for_each(|(a, b)| *a |= b);
    }

    pub fn intersects(&self, other: &Self) -> bool {
        assert_eq!(self.nvars, other.nvars);
        self.words.iter().zip(&other.words).any(|(a, b)| a & b != 0)
    }

    fn zip(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.nvars, other.nvars, "table arity mismatch");
        TruthTable {
            nvars: self.nvars,
            words: self
                .words
                .iter()
                .zip(&other.words)
                .map(|(&a, &b)| op(a, b))
                .collect(),
        }
    }

    /// First index holding a one.
    pub fn first_one(&self) -> Option<u64> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| ((i as u64) << 6) | w.trailing_zeros() as u64)
    }

    pub fn ones_iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as u64;
                w &= w - 1;
                Some(((i as u64) << 6) | b)
            })
        })
    }

    /// Re-express this table over `target_nvars` variables, where the
    /// variable at position `i` here sits at position `positions[i]` there.
    /// Positions must be increasing.
    pub fn lift(&self, target_nvars: u32, positions: &[u32]) -> Self {
        assert_eq!(positions.len(), self.nvars as usize);
        debug_assert!(positions.windows(2).all(|w| w[0] < w[1]));
        if target_nvars == self.nvars {
            return self.clone();
        }
        let mask: u64 = positions.iter().map(|&p| 1u64 << p).sum();
        let free = ((1u64 << target_nvars) - 1) & !mask;
        let mut out = TruthTable::zeros(target_nvars);
        for (s, placed) in submasks(mask).enumerate() {
            if self.get(s as u64) {
                for f in submasks(free) {
                    out.set(placed | f, true);
                }
            }
        }
        out
    }

    /// The subtable obtained by fixing the positions in `fixed_mask` to the
    /// bits of `fixed_bits` (given in place, i.e. already deposited).
    pub fn restrict(&self, fixed_mask: u64, fixed_bits: u64) -> Self {
        let free_mask = ((1u64 << self.nvars) - 1) & !fixed_mask;
        let free = free_mask.count_ones();
        let mut out = TruthTable::zeros(free);
        for (i, sub) in submasks(free_mask).enumerate() {
            if self.get(fixed_bits | sub) {
                out.set(i as u64, true);
            }
        }
        out
    }
}

impl fmt::Debug for TruthTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.nvars <= 6 {
            let bits: String = (0..self.len())
                .rev()
                .map(|i| if self.get(i) { '1' } else { '0' })
                .collect();
            write!(f, "TT[{}]({})", self.nvars, bits)
        } else {
            write!(f, "TT[{}]({} ones)", self.nvars, self.count_ones())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn projection_matches_index_bits() {
        for n in 1..9u32 {
            for p in 0..n {
                let t = TruthTable::projection(n, p);
                for i in 0..(1u64 << n) {
                    assert_eq!(t.get(i), (i >> p) & 1 == 1, "n={n} p={p} i={i}");
                }
            }
        }
    }

    #[test]
    fn ones_and_zeros() {
        assert_eq!(TruthTable::ones(3).count_ones(), 8);
        assert_eq!(TruthTable::ones(0).count_ones(), 1);
        assert!(TruthTable::zeros(9).is_zero());
        assert!(TruthTable::ones(2).not().is_zero());
    }

    #[test]
    fn submasks_follow_deposit_order() {
        let mask = 0b1011_0100u64;
        let subs: Vec<u64> = submasks(mask).collect();
        assert_eq!(subs.len(), 16);
        for (i, s) in subs.iter().enumerate() {
            assert_eq!(*s, deposit(i as u64, mask));
        }
    }

    proptest! {
        #[test]
        fn deposit_extract_inverse(src in any::<u64>(), mask in any::<u64>()) {
            let k = mask.count_ones();
            let low = if k == 64 { src } else { src & ((1u64 << k) - 1) };
            prop_assert_eq!(extract(deposit(low, mask), mask), low);
        }

        #[test]
        fn lift_agrees_with_extract(bits in any::<u16>(), pos in prop::sample::subsequence(vec![0u32, 1, 2, 3, 4, 5, 6], 4)) {
            let t = TruthTable::from_fn(4, |i| (bits >> i) & 1 == 1);
            let lifted = t.lift(7, &pos);
            let mask: u64 = pos.iter().map(|&p| 1u64 << p).sum();
            for i in 0..128u64 {
                prop_assert_eq!(lifted.get(i), t.get(extract(i, mask)));
            }
        }

        #[test]
        fn restrict_agrees_with_pointwise(bits in prop::collection::vec(any::<bool>(), 32), fixed in 0u64..32, vals in 0u64..32) {
            let t = TruthTable::from_fn(5, |i| bits[i as usize]);
            let fixed_bits = vals & fixed;
            let r = t.restrict(fixed, fixed_bits);
            let free = 0b11111 & !fixed;
            for i in 0..r.len() {
                prop_assert_eq!(r.get(i), t.get(fixed_bits | deposit(i, free)));
            }
        }
    }
}
