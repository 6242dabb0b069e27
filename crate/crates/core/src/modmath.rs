//! Reference arithmetic for the moduli `2^n - 1`, `2^n + 1` and `2^{2n} - 1`.
//!
//! Everything in this module is plain integer arithmetic with no circuit
//! structure, so it can serve as the independent oracle for every netlist
//! built elsewhere in the crate: the residue of a bit vector, the
//! diminished-1 encoding, the periodicity of `|2^k|` and the complement
//! identity used to fold negated blocks into corrections.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Which of the three supported modulus shapes a [`Modulus`] denotes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModKind {
    /// `2^n - 1`
    MersenneLike,
    /// `2^n + 1`
    FermatLike,
    /// `2^{2n} - 1`, the product of the conjugate pair
    DoubleMersenne,
}

/// A modulus `2^n - 1`, `2^n + 1` or `2^{2n} - 1` parameterized by `n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Modulus {
    n: u32,
    kind: ModKind,
}

impl Modulus {
    /// `2^n - 1`, requires `n >= 2`.
    pub fn mersenne(n: u32) -> Result<Self> {
        Self::new(n, ModKind::MersenneLike)
    }

    /// `2^n + 1`, requires `n >= 2`.
    pub fn fermat(n: u32) -> Result<Self> {
        Self::new(n, ModKind::FermatLike)
    }

    /// `2^{2n} - 1`, requires `n >= 1`.
    pub fn double_mersenne(n: u32) -> Result<Self> {
        Self::new(n, ModKind::DoubleMersenne)
    }

    pub fn new(n: u32, kind: ModKind) -> Result<Self> {
        let min_n = match kind {
            ModKind::DoubleMersenne => 1,
            _ => 2,
        };
        if n < min_n || n > 31 {
            return Err(Error::InvalidParams(format!(
                "modulus parameter n={n} outside supported range {min_n}..=31"
            )));
        }
        Ok(Self { n, kind })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn kind(&self) -> ModKind {
        self.kind
    }

    /// The numeric value of the modulus.
    pub fn value(&self) -> u64 {
        match self.kind {
            ModKind::MersenneLike => (1u64 << self.n) - 1,
            ModKind::FermatLike => (1u64 << self.n) + 1,
            ModKind::DoubleMersenne => (1u64 << (2 * self.n)) - 1,
        }
    }

    /// Period of the weight classes: `n`, except `2n` for `2^{2n} - 1`.
    pub fn width(&self) -> u32 {
        match self.kind {
            ModKind::DoubleMersenne => 2 * self.n,
            _ => self.n,
        }
    }

    /// Whether bits of odd-numbered blocks flip sign (only mod `2^n + 1`).
    pub fn alternating(&self) -> bool {
        self.kind == ModKind::FermatLike
    }
}

impl std::fmt::Display for Modulus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.kind {
            ModKind::MersenneLike => write!(f, "2^{}-1", self.n),
            ModKind::FermatLike => write!(f, "2^{}+1", self.n),
            ModKind::DoubleMersenne => write!(f, "2^{}-1", 2 * self.n),
        }
    }
}

/// Diminished-1 encoding of a value in `[0, 2^n]`: a zero-indication flag
/// plus the n-bit magnitude `X - 1` when `X != 0`.
///
/// The canonical form forces `magnitude = 0` whenever `zero` is set, so two
/// equal values always compare bitwise equal.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct D1Value {
    pub zero: bool,
    pub magnitude: u64,
}

impl D1Value {
    /// True iff the value is canonical for width `n`.
    pub fn is_canonical(&self, n: u32) -> bool {
        if self.zero {
            self.magnitude == 0
        } else {
            self.magnitude < (1u64 << n)
        }
    }
}

/// Residue of a little-endian bit vector modulo `m`, computed by plain
/// integer arithmetic (wide accumulation, no circuit structure).
pub fn oracle_residue(bits: &[bool], m: Modulus) -> u64 {
    let modulus = m.value();
    let mut weight = 1u64; // |2^i|_m for the current position
    let mut acc = 0u64;
    for &bit in bits {
        if bit {
            acc = (acc + weight) % modulus;
        }
        weight = (weight * 2) % modulus;
    }
    acc
}

/// Residue of an integer input of `p` bits, convenience over [`oracle_residue`].
pub fn oracle_residue_value(x: u128, p: usize, m: Modulus) -> u64 {
    let bits: Vec<bool> = (0..p).map(|i| (x >> i) & 1 == 1).collect();
    oracle_residue(&bits, m)
}

/// Encode `x` in `[0, 2^n]` into its diminished-1 form.
pub fn d1_encode(x: u64, n: u32) -> Result<D1Value> {
    if x > (1u64 << n) {
        return Err(Error::OutOfRange { value: x, n });
    }
    Ok(if x == 0 {
        D1Value { zero: true, magnitude: 0 }
    } else {
        D1Value { zero: false, magnitude: x - 1 }
    })
}

/// Decode a canonical diminished-1 value back to `[0, 2^n]`.
pub fn d1_decode(v: D1Value, n: u32) -> Result<u64> {
    if v.zero && v.magnitude != 0 {
        return Err(Error::NonCanonicalD1 { magnitude: v.magnitude });
    }
    if v.magnitude >= (1u64 << n) {
        return Err(Error::OutOfRange { value: v.magnitude, n });
    }
    Ok(if v.zero { 0 } else { v.magnitude + 1 })
}

/// The residue weight of a power of two, expressed as a weight class within
/// the modulus period plus a sign: `|2^k|_m = ±2^{k mod width}`.
///
/// The sign is only ever negative mod `2^n + 1`, where odd periods flip it;
/// builders use the flag to decide where to place signal inversions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BitWeight {
    pub class: u32,
    pub negated: bool,
}

impl BitWeight {
    /// The signed weight evaluated as a residue: `|±2^class|_m`.
    pub fn residue(&self, m: Modulus) -> u64 {
        let v = (1u64 << self.class) % m.value();
        if self.negated {
            (m.value() - v) % m.value()
        } else {
            v
        }
    }
}

/// Weight of bit position `k` under the periodicity of `|2^k|_m`.
pub fn pow2_mod(k: u32, m: Modulus) -> BitWeight {
    let width = m.width();
    let class = k % width;
    let negated = m.alternating() && (k / width) % 2 == 1;
    BitWeight { class, negated }
}

/// Complement identity mod `2^n + 1`: `|-B| = |B̄ + 2|` for an n-bit block.
///
/// Returns the bitwise complement of `b` together with the correction
/// constant (always 2) that must be added alongside it.
pub fn neg_block_identity(b: u64, n: u32) -> (u64, u64) {
    debug_assert!(b < (1u64 << n));
    let complement = ((1u64 << n) - 1) ^ b;
    (complement, 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn bits_of(x: u128, p: usize) -> Vec<bool> {
        (0..p).map(|i| (x >> i) & 1 == 1).collect()
    }

    #[test]
    fn modulus_values() {
        assert_eq!(Modulus::mersenne(3).unwrap().value(), 7);
        assert_eq!(Modulus::fermat(3).unwrap().value(), 9);
        assert_eq!(Modulus::double_mersenne(3).unwrap().value(), 63);
        assert_eq!(Modulus::fermat(2).unwrap().width(), 2);
        assert_eq!(Modulus::double_mersenne(4).unwrap().width(), 8);
        assert!(Modulus::mersenne(1).is_err());
        assert!(Modulus::fermat(0).is_err());
        assert!(Modulus::mersenne(40).is_err());
    }

    #[test]
    fn oracle_basics() {
        let m9 = Modulus::fermat(3).unwrap();
        assert_eq!(oracle_residue(&[false; 24], m9), 0);
        // 2^3 = |-1|_9 = 8
        assert_eq!(oracle_residue(&bits_of(1 << 3, 4), m9), 8);
        // even period: 2^6 = 1 mod 9
        assert_eq!(oracle_residue(&bits_of(1 << 6, 7), m9), 1);
        assert_eq!(oracle_residue_value(0xBEEF, 16, m9), 0xBEEF % 9);
    }

    #[test]
    fn d1_encode_examples() {
        assert_eq!(d1_encode(0, 4).unwrap(), D1Value { zero: true, magnitude: 0 });
        assert_eq!(d1_encode(1, 4).unwrap(), D1Value { zero: false, magnitude: 0 });
        assert_eq!(d1_encode(16, 4).unwrap(), D1Value { zero: false, magnitude: 0b1111 });
        assert!(d1_encode(17, 4).is_err());
    }

    #[test]
    fn d1_decode_examples() {
        assert_eq!(d1_decode(D1Value { zero: true, magnitude: 0 }, 3).unwrap(), 0);
        assert_eq!(d1_decode(D1Value { zero: false, magnitude: 0 }, 3).unwrap(), 1);
        assert_eq!(d1_decode(D1Value { zero: false, magnitude: 0b111 }, 3).unwrap(), 8);
        assert!(d1_decode(D1Value { zero: true, magnitude: 3 }, 3).is_err());
        assert!(d1_decode(D1Value { zero: false, magnitude: 8 }, 3).is_err());
    }

    #[test]
    fn d1_round_trip_exhaustive() {
        for n in 2..=8u32 {
            for x in 0..=(1u64 << n) {
                let v = d1_encode(x, n).unwrap();
                assert!(v.is_canonical(n));
                assert_eq!(d1_decode(v, n).unwrap(), x);
            }
        }
    }

    #[test]
    fn pow2_mod_period_cases() {
        let m7 = Modulus::mersenne(3).unwrap();
        let m9 = Modulus::fermat(3).unwrap();
        for j in 0..5 {
            let w = pow2_mod(j * 3, m7);
            assert_eq!((w.class, w.negated), (0, false));
        }
        // odd period mod 2^n+1: 2^(jn) = -1
        let w = pow2_mod(3, m9);
        assert_eq!((w.class, w.negated), (0, true));
        assert_eq!(w.residue(m9), 8);
        assert_eq!(pow2_mod(0, m9), BitWeight { class: 0, negated: false });
    }

    #[test]
    fn pow2_mod_agrees_with_oracle() {
        for n in 2..=5u32 {
            for m in [Modulus::mersenne(n).unwrap(), Modulus::fermat(n).unwrap()] {
                for k in 0..(8 * n) {
                    let expect = oracle_residue(&bits_of(1u128 << k, (8 * n + 1) as usize), m);
                    assert_eq!(pow2_mod(k, m).residue(m), expect, "n={n} m={m} k={k}");
                }
            }
        }
    }

    #[test]
    fn neg_block_examples() {
        // |-B|_9 computed directly as the oracle for the identity
        let m9 = 9i64;
        for (b, expect_comp) in [(0u64, 7u64), (5, 2), (7, 0)] {
            let (comp, cor) = neg_block_identity(b, 3);
            assert_eq!(comp, expect_comp);
            assert_eq!(cor, 2);
            let lhs = (-(b as i64)).rem_euclid(m9) as u64;
            assert_eq!(lhs, (comp + cor) % 9);
        }
    }

    #[test]
    fn neg_block_identity_exhaustive() {
        for n in 2..=8u32 {
            let m = (1i64 << n) + 1;
            for b in 0..(1u64 << n) {
                let (comp, cor) = neg_block_identity(b, n);
                assert_eq!((-(b as i64)).rem_euclid(m) as u64, (comp + cor) % m as u64);
            }
        }
    }

    #[test]
    fn nested_moduli_identity() {
        // |X|_{2^n±1} factors through |X|_{2^{2n}-1}
        for n in 2..=4u32 {
            let dm = Modulus::double_mersenne(n).unwrap();
            for m in [Modulus::mersenne(n).unwrap(), Modulus::fermat(n).unwrap()] {
                for x in 0u128..(1u128 << 16) {
                    let inner = oracle_residue_value(x, 16, dm);
                    assert_eq!(inner % m.value(), oracle_residue_value(x, 16, m));
                }
            }
        }
    }

    proptest! {
        #[test]
        fn oracle_matches_wide_arithmetic(x in any::<u64>(), n in 2u32..=10) {
            for m in [Modulus::mersenne(n).unwrap(), Modulus::fermat(n).unwrap()] {
                let got = oracle_residue_value(x as u128, 64, m);
                prop_assert_eq!(got, x % m.value());
            }
        }

        #[test]
        fn d1_round_trip(n in 2u32..=16, x in any::<u64>()) {
            let x = x % ((1u64 << n) + 1);
            let v = d1_encode(x, n).unwrap();
            prop_assert_eq!(d1_decode(v, n).unwrap(), x);
        }
    }
}
