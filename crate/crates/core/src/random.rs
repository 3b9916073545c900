//! Seeded random elements for property checks.

use num_bigint::BigInt;
use num_rational::Rational64;
use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;

use crate::drw::{BasisKey, DrwElement, Factor, Word};
use crate::error::Result;
use crate::poly::Poly;
use crate::weights::{enumerate_partitions, Entry, LocalModel, Weight};
use crate::witt_poly::WittVectorPoly;

/// Bounds for random weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bounds {
    /// Largest numerator of a weight entry.
    pub max_num: u64,
    /// Largest p-exponent of a denominator.
    pub max_den: u32,
    /// Largest number of terms of a random element.
    pub max_terms: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            max_num: 4,
            max_den: 2,
            max_terms: 3,
        }
    }
}

/// A random valid weight; `poles` allows pole entries at log positions.
pub fn weight<R: Rng + ?Sized>(model: &LocalModel, rng: &mut R, b: &Bounds, poles: bool) -> Weight {
    let p = model.p as i64;
    let mut entries: Vec<Entry> = (0..model.n)
        .map(|i| {
            let r: f64 = rng.gen();
            if poles && i < model.e && r < 0.2 {
                Entry::Pole
            } else if r < 0.45 {
                Entry::int(0)
            } else {
                let t = rng.gen_range(0..=b.max_den);
                let a = rng.gen_range(1..=b.max_num.max(1)) as i64;
                Entry::Val(Rational64::new(a, p.pow(t)))
            }
        })
        .collect();
    if model.d > 0 && entries[..model.d].iter().all(|x| !x.plus().is_zero()) {
        let i = rng.gen_range(0..model.d);
        entries[i] = Entry::int(0);
    }
    Weight(entries)
}

/// A random basis key whose weight is alive at `level`.
pub fn key<R: Rng + ?Sized>(model: &LocalModel, level: u32, rng: &mut R, b: &Bounds) -> BasisKey {
    let b2 = Bounds {
        max_den: b.max_den.min(level - 1),
        ..*b
    };
    let k = weight(model, rng, &b2, true);
    let parts = enumerate_partitions(&k, model.p);
    let part = parts.choose(rng).expect("at least one partition").clone();
    let j = (0..model.f).filter(|_| rng.gen_bool(0.4)).collect();
    BasisKey::new(k, part, j)
}

/// A random element of `W_m Lambda` with up to `b.max_terms` terms.
pub fn element<R: Rng + ?Sized>(
    model: &LocalModel,
    level: u32,
    rng: &mut R,
    b: &Bounds,
) -> Result<DrwElement> {
    let q = model.p.pow(level);
    let n = rng.gen_range(1..=b.max_terms.max(1));
    let terms: Vec<(BasisKey, BigInt)> = (0..n)
        .map(|_| {
            let k = key(model, level, rng, b);
            let pu = model.p.pow(k.u(model.p));
            let c = rng.gen_range(1..q / pu + 1) * pu;
            (k, BigInt::from(c))
        })
        .collect();
    DrwElement::from_terms(model, level, terms)
}

/// A random element concentrated in one degree.
pub fn homogeneous<R: Rng + ?Sized>(
    model: &LocalModel,
    level: u32,
    deg: usize,
    rng: &mut R,
    b: &Bounds,
) -> Result<DrwElement> {
    for _ in 0..64 {
        let x = element(model, level, rng, b)?.homogeneous_part(deg);
        if !x.is_zero() {
            return Ok(x);
        }
    }
    DrwElement::zero(model, level)
}

/// A random degree-zero element.
pub fn degree_zero<R: Rng + ?Sized>(
    model: &LocalModel,
    level: u32,
    rng: &mut R,
    b: &Bounds,
) -> Result<DrwElement> {
    let q = model.p.pow(level);
    let n = rng.gen_range(1..=b.max_terms.max(1));
    let b2 = Bounds {
        max_den: b.max_den.min(level - 1),
        ..*b
    };
    let terms: Vec<(BasisKey, BigInt)> = (0..n)
        .map(|_| {
            let k = weight(model, rng, &b2, false);
            let part = crate::weights::Partition {
                minus_inf: vec![],
                i0: k.ordered_plus_support(model.p),
                blocks: vec![],
            };
            let pu = model.p.pow(k.u_of(model.p));
            let c = rng.gen_range(1..q / pu + 1) * pu;
            (BasisKey::new(k, part, vec![]), BigInt::from(c))
        })
        .collect();
    DrwElement::from_terms(model, level, terms)
}

/// A random Witt vector of length `len` over `F_p[T_1..T_n]`.
pub fn witt_vector<R: Rng + ?Sized>(
    p: u64,
    nvars: usize,
    len: usize,
    rng: &mut R,
    max_deg: u32,
    max_monomials: usize,
) -> Result<WittVectorPoly> {
    let coords = (0..len)
        .map(|_| {
            let mut f = Poly::zero(nvars);
            for _ in 0..rng.gen_range(0..=max_monomials) {
                let e: Vec<u32> = (0..nvars).map(|_| rng.gen_range(0..=max_deg)).collect();
                f.add_term(e, BigInt::from(rng.gen_range(1..p)));
            }
            f.reduce_mod(&BigInt::from(p))
        })
        .collect();
    WittVectorPoly::new(p, nvars, coords)
}

/// A random word of Teichmüller monomials, `V`, `dV`, `F^s d` and `dlog` factors.
pub fn word<R: Rng + ?Sized>(model: &LocalModel, level: u32, rng: &mut R, factors: usize) -> Word {
    let mut out = Vec::new();
    let kappa = |rng: &mut R| -> Vec<u64> {
        let mut v: Vec<u64> = (0..model.n).map(|_| rng.gen_range(0..3)).collect();
        if model.d > 0 && v[..model.d].iter().all(|x| *x > 0) {
            v[rng.gen_range(0..model.d)] = 0;
        }
        v
    };
    for _ in 0..factors {
        let f = match rng.gen_range(0..5) {
            0 if model.e > 0 => Factor::DlogX(rng.gen_range(0..model.e)),
            1 if model.f > 0 => Factor::DlogC(rng.gen_range(0..model.f)),
            2 => Factor::DV {
                u: rng.gen_range(0..level),
                eta: BigInt::from(rng.gen_range(1..model.p * model.p)),
                kappa: kappa(rng),
            },
            3 => Factor::FD {
                s: rng.gen_range(0..2),
                kappa: kappa(rng),
            },
            _ => Factor::V {
                u: rng.gen_range(0..level),
                eta: BigInt::from(rng.gen_range(1..model.p * model.p)),
                kappa: kappa(rng),
            },
        };
        out.push(f);
    }
    Word::new(rng.gen_range(1..model.p.pow(level)), out)
}
