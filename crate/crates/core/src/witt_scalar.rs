//! Truncated Witt vectors of the prime field, `W_m(F_p) = Z/p^m`.

use std::fmt;

use crate::error::{Error, Result};

/// `p^m`, or a precision error if it does not fit comfortably in an `i64`.
pub fn modulus(p: u64, m: u32) -> Result<u64> {
    let mut acc: u64 = 1;
    for _ in 0..m {
        acc = acc
            .checked_mul(p)
            .filter(|v| *v < (1u64 << 62))
            .ok_or(Error::Precision { level: m })?;
    }
    Ok(acc)
}

/// p-adic valuation of a nonzero integer.
pub fn val_p(p: u64, mut x: u64) -> u32 {
    debug_assert!(x != 0);
    let mut v = 0;
    while x.is_multiple_of(p) {
        x /= p;
        v += 1;
    }
    v
}

/// A valuation that may be infinite (the valuation of zero).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(u32),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => write!(f, "inf"),
        }
    }
}

/// An element of `W_m(F_p)`, stored as its residue in `[0, p^m)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct WittScalar {
    value: u64,
    level: u32,
    prime: u64,
}

impl WittScalar {
    /// Reduces an arbitrary integer into `W_m(F_p)`.
    pub fn new(value: i128, level: u32, prime: u64) -> Result<Self> {
        if level == 0 {
            return Err(Error::LevelUnderflow { level, needed: 1 });
        }
        let q = modulus(prime, level)? as i128;
        Ok(WittScalar {
            value: value.rem_euclid(q) as u64,
            level,
            prime,
        })
    }

    pub fn zero(level: u32, prime: u64) -> Result<Self> {
        Self::new(0, level, prime)
    }

    pub fn one(level: u32, prime: u64) -> Result<Self> {
        Self::new(1, level, prime)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn modulus(&self) -> u64 {
        // Checked at construction.
        self.prime.pow(self.level)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.prime != other.prime {
            return Err(Error::PrimeMismatch(self.prime, other.prime));
        }
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Self::new(self.value as i128 + other.value as i128, self.level, self.prime)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Self::new(self.value as i128 - other.value as i128, self.level, self.prime)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Self::new(self.value as i128 * other.value as i128, self.level, self.prime)
    }

    pub fn neg(&self) -> Self {
        Self::new(-(self.value as i128), self.level, self.prime).expect("level already valid")
    }

    /// Frobenius: the identity of `Z_p`, so truncation to level `m - 1`.
    pub fn frobenius(&self) -> Result<Self> {
        if self.level < 2 {
            return Err(Error::LevelUnderflow {
                level: self.level,
                needed: 2,
            });
        }
        Self::new(self.value as i128, self.level - 1, self.prime)
    }

    /// Verschiebung: multiplication by `p`, landing in level `m + 1`.
    pub fn verschiebung(&self) -> Result<Self> {
        Self::new(self.value as i128 * self.prime as i128, self.level + 1, self.prime)
    }

    /// Restriction `W_m -> W_{m-1}`.
    pub fn restrict(&self) -> Result<Self> {
        self.frobenius()
    }

    /// Teichmüller lift of `a mod p`.
    pub fn teichmuller(a: u64, level: u32, prime: u64) -> Result<Self> {
        let q = modulus(prime, level)?;
        let mut base = (a % prime) as u128;
        let mut acc: u128 = 1;
        // a^(p^(m-1)) mod p^m
        let mut e = prime.pow(level - 1);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base % q as u128;
            }
            base = base * base % q as u128;
            e >>= 1;
        }
        Self::new(acc as i128, level, prime)
    }

    /// Largest `t <= m` with `p^t | value`; infinite for zero.
    pub fn ord_p(&self) -> Valuation {
        if self.value == 0 {
            Valuation::Infinite
        } else {
            Valuation::Finite(val_p(self.prime, self.value))
        }
    }
}

impl fmt::Display for WittScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(v: i128, m: u32, p: u64) -> WittScalar {
        WittScalar::new(v, m, p).unwrap()
    }

    #[test]
    fn examples() {
        assert_eq!(w(4, 2, 3).add(&w(5, 2, 3)).unwrap().value(), 0);
        assert_eq!(w(7, 3, 2).add(&w(1, 3, 2)).unwrap().value(), 0);
        assert_eq!(w(3, 2, 3).mul(&w(3, 2, 3)).unwrap().value(), 0);
        assert_eq!(w(3, 3, 2).mul(&w(5, 3, 2)).unwrap().value(), 7);
        let f = w(10, 3, 3).frobenius().unwrap();
        assert_eq!((f.value(), f.level()), (1, 2));
        let v = w(2, 1, 3).verschiebung().unwrap();
        assert_eq!((v.value(), v.level()), (6, 2));
        assert_eq!(WittScalar::teichmuller(2, 2, 3).unwrap().value(), 8);
        assert_eq!(WittScalar::teichmuller(0, 2, 3).unwrap().value(), 0);
        assert_eq!(w(6, 2, 3).ord_p(), Valuation::Finite(1));
        assert_eq!(w(0, 2, 3).ord_p(), Valuation::Infinite);
        assert_eq!(w(1, 2, 3).ord_p(), Valuation::Finite(0));
    }

    #[test]
    fn errors() {
        assert!(w(1, 1, 3).frobenius().is_err());
        assert!(w(1, 2, 3).add(&w(1, 3, 3)).is_err());
        assert!(w(1, 2, 3).add(&w(1, 2, 2)).is_err());
        assert!(WittScalar::new(1, 80, 3).is_err());
    }

    #[test]
    fn exhaustive_ring_axioms_and_fv() {
        for p in [2u64, 3] {
            for m in 1..=3u32 {
                let q = p.pow(m) as i128;
                let all: Vec<_> = (0..q).map(|v| w(v, m, p)).collect();
                for a in &all {
                    let fv = a.verschiebung().unwrap().frobenius().unwrap();
                    assert_eq!(fv, a.mul(&w(p as i128, m, p)).unwrap());
                    for b in &all {
                        assert_eq!(a.add(b).unwrap(), b.add(a).unwrap());
                        assert_eq!(a.mul(b).unwrap(), b.mul(a).unwrap());
                        assert_eq!(a.sub(b).unwrap().add(b).unwrap(), *a);
                        for c in &all {
                            let l = a.mul(&b.add(c).unwrap()).unwrap();
                            let r = a.mul(b).unwrap().add(&a.mul(c).unwrap()).unwrap();
                            assert_eq!(l, r);
                            let l = a.mul(b).unwrap().mul(c).unwrap();
                            let r = a.mul(&b.mul(c).unwrap()).unwrap();
                            assert_eq!(l, r);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn teichmuller_is_multiplicative_root_of_unity() {
        for p in [2u64, 3, 5] {
            for m in 1..=3 {
                for a in 0..p {
                    let ta = WittScalar::teichmuller(a, m, p).unwrap();
                    assert_eq!(ta.value() % p, a);
                    // (p-1)-st root of unity or zero
                    let mut pw = WittScalar::one(m, p).unwrap();
                    for _ in 0..p {
                        pw = pw.mul(&ta).unwrap();
                    }
                    assert_eq!(pw, ta);
                    for b in 0..p {
                        let tb = WittScalar::teichmuller(b, m, p).unwrap();
                        let tab = WittScalar::teichmuller(a * b, m, p).unwrap();
                        assert_eq!(ta.mul(&tb).unwrap(), tab);
                    }
                }
            }
        }
    }

    #[test]
    fn ord_is_additive_below_level() {
        for p in [2u64, 3] {
            let m = 4;
            let q = p.pow(m) as i128;
            for a in 1..q {
                for b in 1..q {
                    let (x, y) = (w(a, m, p), w(b, m, p));
                    let (Valuation::Finite(oa), Valuation::Finite(ob)) = (x.ord_p(), y.ord_p()) else {
                        unreachable!()
                    };
                    if oa + ob < m {
                        assert_eq!(x.mul(&y).unwrap().ord_p(), Valuation::Finite(oa + ob));
                    }
                }
            }
        }
    }
}
