//! Gauss norms and pseudovaluations of finitely supported elements.
//!
//! All values are exact rationals; `+inf` is the norm of zero.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{Signed, Zero};

use crate::drw::DrwElement;
use crate::error::{Error, Result};
use crate::filtration_ss::filtration_level;
use crate::poly::Poly;
use crate::witt_poly::WittVectorPoly;
use crate::witt_scalar::val_p;

/// A rational number or one of the two infinities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ExtendedValue {
    NegInf,
    Finite(Rational64),
    PosInf,
}

impl ExtendedValue {
    pub fn finite(self) -> Option<Rational64> {
        match self {
            ExtendedValue::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// Sum, with `+inf` absorbing; `NegInf + PosInf` is not used by callers and
    /// returns `NegInf`.
    pub fn add(self, other: Self) -> Self {
        use ExtendedValue::*;
        match (self, other) {
            (NegInf, _) | (_, NegInf) => NegInf,
            (PosInf, _) | (_, PosInf) => PosInf,
            (Finite(a), Finite(b)) => Finite(a + b),
        }
    }
}

impl From<Rational64> for ExtendedValue {
    fn from(v: Rational64) -> Self {
        ExtendedValue::Finite(v)
    }
}

impl fmt::Display for ExtendedValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedValue::NegInf => write!(f, "-inf"),
            ExtendedValue::PosInf => write!(f, "+inf"),
            ExtendedValue::Finite(v) => write!(f, "{v}"),
        }
    }
}

/// Parses `a`, `a/b`, `+inf`, `inf` or `-inf`.
impl FromStr for ExtendedValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "+inf" | "inf" => Ok(ExtendedValue::PosInf),
            "-inf" => Ok(ExtendedValue::NegInf),
            t => parse_rational(t).map(ExtendedValue::Finite),
        }
    }
}

/// Parses `a` or `a/b` into a rational.
pub fn parse_rational(s: &str) -> Result<Rational64> {
    let bad = || Error::Malformed(format!("bad rational {s}"));
    match s.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0 {
                return Err(bad());
            }
            Ok(Rational64::new(a, b))
        }
        None => s.trim().parse::<i64>().map(Rational64::from_integer).map_err(|_| bad()),
    }
}

fn check_eps(eps: Rational64) -> Result<()> {
    if eps <= Rational64::zero() {
        return Err(Error::OutOfRange(format!("epsilon must be positive, got {eps}")));
    }
    Ok(())
}

/// `gamma_eps(omega) = min over terms of ord_p(xi) - eps |k+|`.
pub fn gauss_norm(omega: &DrwElement, eps: Rational64) -> Result<ExtendedValue> {
    check_eps(eps)?;
    let p = omega.model().p;
    Ok(omega
        .terms()
        .iter()
        .map(|(key, v)| {
            let ord = Rational64::from_integer(val_p(p, *v) as i64);
            ExtendedValue::Finite(ord - eps * key.k.abs_plus())
        })
        .min()
        .unwrap_or(ExtendedValue::PosInf))
}

fn total_degree(exps: &[u32]) -> i64 {
    exps.iter().map(|e| *e as i64).sum()
}

fn ord_big(p: u64, c: &BigInt) -> i64 {
    let p = BigInt::from(p);
    let mut c = c.abs();
    let mut v = 0;
    while c.is_multiple_of(&p) {
        c /= &p;
        v += 1;
    }
    v
}

/// `mu_eps(sum c_k T^k) = min ord_p(c_k) - eps |k|` for integer coefficients.
pub fn pseudoval(f: &Poly, p: u64, eps: Rational64) -> Result<ExtendedValue> {
    check_eps(eps)?;
    Ok(f.terms()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| ExtendedValue::Finite(Rational64::from_integer(ord_big(p, c)) - eps * total_degree(k)))
        .min()
        .unwrap_or(ExtendedValue::PosInf))
}

/// The characteristic `p` variant `min -eps |k|` over the monomials that survive
/// reduction mod `p`.
pub fn pseudoval_mod_p(f: &Poly, p: u64, eps: Rational64) -> Result<ExtendedValue> {
    check_eps(eps)?;
    let q = BigInt::from(p);
    Ok(f.terms()
        .filter(|(_, c)| !c.mod_floor(&q).is_zero())
        .map(|(k, _)| ExtendedValue::Finite(-eps * total_degree(k)))
        .min()
        .unwrap_or(ExtendedValue::PosInf))
}

/// `min over s of s + mu_{eps/p^s}(a_s)` on the Witt coordinates.
pub fn gauss_from_coords(a: &WittVectorPoly, eps: Rational64) -> Result<ExtendedValue> {
    check_eps(eps)?;
    let p = a.prime() as i64;
    let mut out = ExtendedValue::PosInf;
    for (s, c) in a.coords().iter().enumerate() {
        let e = eps / p.pow(s as u32);
        let mu = pseudoval_mod_p(c, a.prime(), e)?;
        out = out.min(mu.add(ExtendedValue::Finite(Rational64::from_integer(s as i64))));
    }
    Ok(out)
}

/// Whether `(eps, c)` witnesses overconvergence: `gamma_eps(omega) >= c`.
pub fn is_overconvergent_sample(omega: &DrwElement, eps: Rational64, c: Rational64) -> Result<bool> {
    Ok(gauss_norm(omega, eps)? >= ExtendedValue::Finite(c))
}

/// Whether every term of `omega` has exactly `j` pole factors.
pub fn overconv_gr_characterization(omega: &DrwElement, j: usize) -> bool {
    omega.terms().keys().all(|k| filtration_level(k) == j)
}

/// The two bounds read off from the termwise action of `F` and `V`:
/// `gamma_eps(F omega) >= gamma_{p eps}(omega) - 1` and
/// `gamma_eps(V omega) >= 1 + gamma_{eps/p}(omega)`.
pub fn frobenius_verschiebung_bounds(omega: &DrwElement, eps: Rational64) -> Result<(bool, bool)> {
    let p = omega.model().p as i64;
    let one = ExtendedValue::Finite(Rational64::from_integer(1));
    let minus_one = ExtendedValue::Finite(Rational64::from_integer(-1));
    let f_ok = if omega.level() >= 2 {
        gauss_norm(&omega.frobenius()?, eps)? >= gauss_norm(omega, eps * p)?.add(minus_one)
    } else {
        true
    };
    let v_ok = gauss_norm(&omega.verschiebung()?, eps)? >= gauss_norm(omega, eps / p)?.add(one);
    Ok((f_ok, v_ok))
}

/// Largest `u(k+)` over the terms of either factor.
fn max_u(a: &DrwElement, b: &DrwElement) -> u32 {
    let p = a.model().p;
    a.terms().keys().chain(b.terms().keys()).map(|k| k.u(p)).max().unwrap_or(0)
}

/// The product estimate `gamma(ab) >= gamma(a) + gamma(b) - u`, where `u` is zero
/// for two degree-zero factors and the largest `u(k+)` of a factor term otherwise.
///
/// The correction is needed: `V(3[T_2]) d[T_1] * dV[T_2]` over `p = 2` loses one
/// power of `p` against the plain sum of norms.
pub fn product_bound_holds(a: &DrwElement, b: &DrwElement, eps: Rational64) -> Result<bool> {
    let degree_zero = a.degrees().iter().chain(b.degrees().iter()).all(|d| *d == 0);
    let u = if degree_zero { 0 } else { max_u(a, b) };
    let bound = gauss_norm(a, eps)?
        .add(gauss_norm(b, eps)?)
        .add(ExtendedValue::Finite(Rational64::from_integer(-(u as i64))));
    Ok(gauss_norm(&a.multiply(b)?, eps)? >= bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drw::BasisKey;
    use crate::filtration_ss::{residue, wedge_from_stratum};
    use crate::random::{self, Bounds};
    use crate::weights::{Entry, LocalModel, Partition, Weight};
    use rand::SeedableRng;

    fn r(a: i64, b: i64) -> Rational64 {
        Rational64::new(a, b)
    }

    fn fin(a: i64, b: i64) -> ExtendedValue {
        ExtendedValue::Finite(r(a, b))
    }

    #[test]
    fn norm_examples() {
        let model = LocalModel::poly(3, 1, 0, 0).unwrap();
        let eps = r(1, 2);
        assert_eq!(gauss_norm(&DrwElement::zero(&model, 2).unwrap(), eps).unwrap(), ExtendedValue::PosInf);
        // V([T]) = eps(p, 1/p)
        let t = DrwElement::teichmuller_monomial(&model, 1, &[1], 1).unwrap();
        let vt = t.verschiebung().unwrap();
        assert_eq!(gauss_norm(&vt, eps).unwrap(), fin(5, 6));
        assert_eq!(gauss_norm(&t, eps).unwrap(), fin(-1, 2));
        assert!(gauss_norm(&t, r(0, 1)).is_err());
    }

    #[test]
    fn pseudoval_examples() {
        let eps = r(1, 3);
        let t = Poly::var(2, 0);
        assert_eq!(pseudoval(&t, 3, eps).unwrap(), fin(-1, 3));
        assert_eq!(pseudoval(&Poly::one(2), 3, eps).unwrap(), fin(0, 1));
        assert_eq!(pseudoval(&t.add(&t.mul(&t)), 3, eps).unwrap(), fin(-2, 3));
        assert_eq!(pseudoval(&Poly::constant(2, 9), 3, eps).unwrap(), fin(2, 1));
        assert_eq!(pseudoval_mod_p(&Poly::constant(2, 9), 3, eps).unwrap(), ExtendedValue::PosInf);
    }

    #[test]
    fn coordinate_examples() {
        let eps = r(1, 2);
        let teich = WittVectorPoly::teichmuller(2, 3, &[1], 1);
        assert_eq!(gauss_from_coords(&teich, eps).unwrap(), fin(-1, 2));
        let v1 = WittVectorPoly::new(2, 1, vec![Poly::zero(1), Poly::one(1), Poly::zero(1)]).unwrap();
        assert_eq!(gauss_from_coords(&v1, eps).unwrap(), fin(1, 1));
        let sum = teich.w_add(&v1).unwrap();
        assert_eq!(gauss_from_coords(&sum, eps).unwrap(), fin(-1, 2));
        let x = DrwElement::from_witt_vector(&LocalModel::poly(2, 1, 0, 0).unwrap(), &sum).unwrap();
        assert_eq!(gauss_norm(&x, eps).unwrap(), fin(-1, 2));
    }

    #[test]
    fn norm_identity_on_random_elements() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for (p, n) in [(2u64, 1usize), (3, 2), (2, 2)] {
            let model = LocalModel::poly(p, n, 0, 0).unwrap();
            for level in 1..=3 {
                for _ in 0..40 {
                    let x = random::degree_zero(&model, level, &mut rng, &Bounds::default()).unwrap();
                    let w = x.to_witt_vector().unwrap();
                    for eps in [r(1, 2), r(1, 3), r(2, 1)] {
                        assert_eq!(gauss_norm(&x, eps).unwrap(), gauss_from_coords(&w, eps).unwrap(), "{x}");
                    }
                }
            }
        }
    }

    #[test]
    fn closure_bounds() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let model = LocalModel::poly(2, 2, 1, 1).unwrap();
        let eps = r(1, 2);
        for _ in 0..200 {
            let a = random::element(&model, 3, &mut rng, &Bounds::default()).unwrap();
            let b = random::element(&model, 3, &mut rng, &Bounds::default()).unwrap();
            let (ga, gb) = (gauss_norm(&a, eps).unwrap(), gauss_norm(&b, eps).unwrap());
            assert!(gauss_norm(&a.add(&b).unwrap(), eps).unwrap() >= ga.min(gb));
            assert!(product_bound_holds(&a, &b, eps).unwrap(), "{a} * {b}");
            assert!(gauss_norm(&a.differential().unwrap(), eps).unwrap() >= ga);
            if let Some(c) = ga.finite() {
                assert!(is_overconvergent_sample(&a, eps, c).unwrap());
            }
            let (f_ok, v_ok) = frobenius_verschiebung_bounds(&a, eps).unwrap();
            assert!(f_ok && v_ok, "{a}");
        }
    }

    #[test]
    fn plain_product_bound_fails_in_positive_degree() {
        let model = LocalModel::poly(2, 2, 0, 0).unwrap();
        let eps = r(1, 2);
        let a = DrwElement::teichmuller_monomial(&model, 2, &[0, 1], 3)
            .unwrap()
            .verschiebung()
            .unwrap()
            .multiply(&DrwElement::teichmuller_monomial(&model, 3, &[1, 0], 1).unwrap().differential().unwrap())
            .unwrap();
        let b = DrwElement::teichmuller_monomial(&model, 2, &[0, 1], 1)
            .unwrap()
            .verschiebung()
            .unwrap()
            .differential()
            .unwrap();
        let ab = a.multiply(&b).unwrap();
        let plain = gauss_norm(&a, eps).unwrap().add(gauss_norm(&b, eps).unwrap());
        assert!(gauss_norm(&ab, eps).unwrap() < plain, "{a} * {b} = {ab}");
        assert!(product_bound_holds(&a, &b, eps).unwrap());
    }

    #[test]
    fn degree_zero_products_keep_the_plain_bound() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let model = LocalModel::poly(3, 2, 0, 0).unwrap();
        for _ in 0..200 {
            let a = random::degree_zero(&model, 3, &mut rng, &Bounds::default()).unwrap();
            let b = random::degree_zero(&model, 3, &mut rng, &Bounds::default()).unwrap();
            let eps = r(1, 3);
            let plain = gauss_norm(&a, eps).unwrap().add(gauss_norm(&b, eps).unwrap());
            assert!(gauss_norm(&a.multiply(&b).unwrap(), eps).unwrap() >= plain);
        }
    }

    #[test]
    fn frobenius_bound_is_sharp() {
        // F dV[T] = d[T]: the coefficient loses one power of p
        let model = LocalModel::poly(2, 1, 0, 0).unwrap();
        let t = DrwElement::teichmuller_monomial(&model, 2, &[1], 1).unwrap();
        let x = t.verschiebung().unwrap().differential().unwrap();
        let eps = r(1, 2);
        let lhs = gauss_norm(&x.frobenius().unwrap(), eps).unwrap();
        assert_eq!(lhs, gauss_norm(&x, eps * 2).unwrap().add(fin(-1, 1)));
    }

    #[test]
    fn graded_pieces_and_residues() {
        let model = LocalModel::semistable(3, 2, 2, 0, 2).unwrap();
        let dl = DrwElement::dlog_x(&model, 2, 0).unwrap();
        let t = DrwElement::teichmuller_monomial(&model, 2, &[0, 2], 1).unwrap();
        let x = t.multiply(&dl).unwrap();
        assert!(overconv_gr_characterization(&x, 1));
        assert!(!overconv_gr_characterization(&x.add(&t).unwrap(), 1));
        let eps = r(1, 3);
        let res = residue(&x, 1).unwrap();
        let y = &res[&vec![0]];
        assert_eq!(gauss_norm(y, eps).unwrap(), gauss_norm(&x, eps).unwrap());
        assert_eq!(wedge_from_stratum(&model, &[0], y).unwrap(), x);
        let key = BasisKey::new(
            Weight(vec![Entry::Pole, Entry::frac(1, 3, 1)]),
            Partition {
                minus_inf: vec![0],
                i0: vec![1],
                blocks: vec![],
            },
            vec![],
        );
        let z = DrwElement::from_terms(&model, 2, [(key, BigInt::from(3))]).unwrap();
        assert_eq!(gauss_norm(&z, eps).unwrap(), fin(8, 9));
    }

    #[test]
    fn extended_values_parse() {
        assert_eq!("1/2".parse::<ExtendedValue>().unwrap(), fin(1, 2));
        assert_eq!("+inf".parse::<ExtendedValue>().unwrap(), ExtendedValue::PosInf);
        assert!("1/0".parse::<ExtendedValue>().is_err());
        assert!(ExtendedValue::NegInf < fin(-100, 1));
        assert_eq!(fin(3, 4).to_string(), "3/4");
    }
}
