//! The log de Rham complex of the canonical lift `A_m = Z/p^m[T]/(T_1...T_d)`.
//!
//! Exterior generators are `dlog c_j`, then per variable `dlog T_i` (log variables)
//! or `dT_i`, indexed like [`crate::forms`]. A monomial stores the actual exponent of
//! `T` and the generator mask; its weight adds one for each `dT_i`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{ToPrimitive, Zero};

use crate::drw::{BasisKey, DrwElement};
use crate::error::{Error, Result};
use crate::forms::{wedge_sign, Form, FormKey};
use crate::weights::{enumerate_partitions, Entry, LocalModel, Partition, Weight};
use crate::witt_scalar::modulus;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LiftKey {
    /// Exponent of `T`.
    pub exps: Vec<u32>,
    pub mask: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftForm {
    model: LocalModel,
    level: u32,
    terms: BTreeMap<LiftKey, u64>,
}

impl LiftKey {
    /// Weight: the exponent plus one for every `dT_i`.
    pub fn weight(&self, model: &LocalModel) -> Vec<u32> {
        let mut w = self.exps.clone();
        for (i, x) in w.iter_mut().enumerate() {
            if i >= model.e && self.mask >> model.var_gen(i) & 1 == 1 {
                *x += 1;
            }
        }
        w
    }

    pub fn degree(&self) -> usize {
        self.mask.count_ones() as usize
    }
}

impl LiftForm {
    pub fn zero(model: &LocalModel, level: u32) -> Result<Self> {
        modulus(model.p, level)?;
        if level == 0 {
            return Err(Error::LevelUnderflow { level, needed: 1 });
        }
        Ok(LiftForm {
            model: *model,
            level,
            terms: BTreeMap::new(),
        })
    }

    pub fn one(model: &LocalModel, level: u32) -> Result<Self> {
        Self::monomial(model, level, vec![0; model.n], 0, 1)
    }

    pub fn monomial(model: &LocalModel, level: u32, exps: Vec<u32>, mask: u64, c: i64) -> Result<Self> {
        if exps.len() != model.n || mask >> (model.f + model.n) != 0 {
            return Err(Error::Shape("monomial does not fit the model".into()));
        }
        let mut out = Self::zero(model, level)?;
        out.add_term(LiftKey { exps, mask }, &BigInt::from(c));
        Ok(out)
    }

    /// `T_i` as a function.
    pub fn var(model: &LocalModel, level: u32, i: usize) -> Result<Self> {
        let mut e = vec![0; model.n];
        e[i] = 1;
        Self::monomial(model, level, e, 0, 1)
    }

    /// The exterior generator `g` (`dlog c_j`, `dlog T_i` or `dT_i`).
    pub fn generator(model: &LocalModel, level: u32, g: usize) -> Result<Self> {
        Self::monomial(model, level, vec![0; model.n], 1 << g, 1)
    }

    pub fn model(&self) -> &LocalModel {
        &self.model
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn modulus(&self) -> u64 {
        self.model.p.pow(self.level)
    }

    pub fn terms(&self) -> &BTreeMap<LiftKey, u64> {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn killed(&self, key: &LiftKey) -> bool {
        self.model.d > 0 && key.exps[..self.model.d].iter().all(|x| *x > 0)
    }

    pub(crate) fn add_term(&mut self, key: LiftKey, c: &BigInt) {
        if self.killed(&key) {
            return;
        }
        let q = self.modulus();
        let v = c.mod_floor(&BigInt::from(q)).to_u64().expect("residue");
        if v == 0 {
            return;
        }
        let e = self.terms.entry(key.clone()).or_insert(0);
        *e = (*e + v) % q;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.model != other.model {
            return Err(Error::ModelMismatch);
        }
        if self.level != other.level {
            return Err(Error::LevelMismatch(self.level, other.level));
        }
        Ok(())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), &BigInt::from(*v));
        }
        Ok(out)
    }

    pub fn scale(&self, s: &BigInt) -> Self {
        let mut out = LiftForm {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &(s * BigInt::from(*v)));
        }
        out
    }

    /// Exterior product.
    pub fn mul_lift(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let mut out = LiftForm {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                if a.mask & b.mask != 0 {
                    continue;
                }
                let exps = a.exps.iter().zip(&b.exps).map(|(s, t)| s + t).collect();
                let mut c = BigInt::from(*x) * BigInt::from(*y);
                if wedge_sign(a.mask, b.mask) < 0 {
                    c = -c;
                }
                out.add_term(
                    LiftKey {
                        exps,
                        mask: a.mask | b.mask,
                    },
                    &c,
                );
            }
        }
        Ok(out)
    }

    /// The differential: `d T^a = sum_i a_i T^a dlog T_i` over log variables and
    /// `a_i T^{a - e_i} dT_i` otherwise, placed in front of the existing generators.
    pub fn d_lift(&self) -> Self {
        let mut out = LiftForm {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (k, v) in &self.terms {
            for i in 0..self.model.n {
                let g = self.model.var_gen(i);
                let a = k.exps[i];
                if a == 0 || k.mask >> g & 1 == 1 {
                    continue;
                }
                let mut exps = k.exps.clone();
                if i >= self.model.e {
                    exps[i] -= 1;
                }
                let mut c = BigInt::from(*v) * BigInt::from(a);
                if wedge_sign(1 << g, k.mask) < 0 {
                    c = -c;
                }
                out.add_term(
                    LiftKey {
                        exps,
                        mask: k.mask | 1 << g,
                    },
                    &c,
                );
            }
        }
        out
    }

    /// The same form as an integral form (`dT_i = T_i dlog T_i`).
    pub fn to_form(&self) -> Form {
        let mut f = Form::zero(&self.model);
        for (k, v) in &self.terms {
            let exps = k
                .weight(&self.model)
                .iter()
                .map(|x| Rational64::from_integer(*x as i64))
                .collect();
            f.add_term(
                FormKey { exps, mask: k.mask },
                BigRational::from_integer(BigInt::from(*v)),
            );
        }
        f
    }

    /// Chart map `T_i -> [T_i]` into the de Rham-Witt complex at the same level.
    pub fn compare(&self) -> Result<DrwElement> {
        DrwElement::from_form(&self.model, self.level, &self.to_form())
    }

    /// Comparison through the dictionary: write the form in the p-basic basis and
    /// send each `eps(k, P, J)` to `eps(1, k, P, J)`.
    pub fn compare_dictionary(&self) -> Result<DrwElement> {
        let mut by_weight: BTreeMap<Weight, LiftForm> = BTreeMap::new();
        for (k, v) in &self.terms {
            let w = lift_weight(&self.model, k);
            by_weight
                .entry(w)
                .or_insert_with(|| LiftForm {
                    terms: BTreeMap::new(),
                    ..self.clone()
                })
                .add_term(k.clone(), &BigInt::from(*v));
        }
        let mut out = DrwElement::zero(&self.model, self.level)?;
        for (w, part) in by_weight {
            let basis = p_basic_keys(&self.model, &w);
            let coords = p_basic_coordinates(&part, &basis)?;
            for (key, c) in basis.iter().zip(coords) {
                if c != 0 {
                    out = out.add(&DrwElement::from_terms(
                        &self.model,
                        self.level,
                        [(key.clone(), BigInt::from(c))],
                    )?)?;
                }
            }
        }
        Ok(out)
    }
}

/// The weight (with poles) of a monomial.
pub fn lift_weight(model: &LocalModel, key: &LiftKey) -> Weight {
    let w = key.weight(model);
    Weight(
        (0..model.n)
            .map(|i| {
                if w[i] == 0 && i < model.e && key.mask >> model.var_gen(i) & 1 == 1 {
                    Entry::Pole
                } else {
                    Entry::int(w[i] as i64)
                }
            })
            .collect(),
    )
}

/// The p-basic element `eps(k, P, J)` for integral `k`, built from products of
/// `T^{k_{I_0}}` and `p^{-ord} d T^{k_{I_j}}` with the division done on integers.
pub fn make_p_basic(model: &LocalModel, level: u32, key: &BasisKey) -> Result<LiftForm> {
    key.validate(model)?;
    if !key.k.is_integral() {
        return Err(Error::NotIntegral(format!("weight {} is fractional", key.k)));
    }
    let p = model.p;
    let kp: Vec<u32> = key
        .k
        .plus_values()
        .iter()
        .map(|x| x.to_integer() as u32)
        .collect();
    let restricted = |set: &[usize]| -> Vec<u32> {
        let mut v = vec![0; model.n];
        for &i in set {
            v[i] = kp[i];
        }
        v
    };
    // work one level up in p-adic precision so the divisions stay exact
    let extra: u32 = key
        .part
        .blocks
        .iter()
        .map(|b| crate::weights::ord_rat(p, &Rational64::from_integer(kp[b[0]] as i64)).max(0) as u32)
        .sum();
    let hi = level + extra;
    let mut f = LiftForm::one(model, hi)?;
    for j in &key.j {
        f = f.mul_lift(&LiftForm::generator(model, hi, *j)?)?;
    }
    for i in &key.part.minus_inf {
        f = f.mul_lift(&LiftForm::generator(model, hi, model.var_gen(*i))?)?;
    }
    f = f.mul_lift(&LiftForm::monomial(model, hi, restricted(&key.part.i0), 0, 1)?)?;
    let mut divisor = BigInt::from(1);
    for b in &key.part.blocks {
        let s = crate::weights::ord_rat(p, &Rational64::from_integer(kp[b[0]] as i64)) as u32;
        divisor *= BigInt::from(p).pow(s);
        let dt = LiftForm::monomial(model, hi, restricted(b), 0, 1)?.d_lift();
        f = f.mul_lift(&dt)?;
    }
    let mut out = LiftForm::zero(model, level)?;
    for (k, v) in &f.terms {
        let (q, r) = BigInt::from(*v).div_rem(&divisor);
        if !r.is_zero() {
            return Err(Error::NotIntegral("p-basic division is not exact".into()));
        }
        out.add_term(k.clone(), &q);
    }
    Ok(out)
}

/// p-basic keys of an integral weight, ordered by degree.
pub fn p_basic_keys(model: &LocalModel, k: &Weight) -> Vec<BasisKey> {
    DrwElement::keys_of_weight(model, k)
}

/// Raw monomials of an integral weight (with poles), ordered by degree.
pub fn raw_keys(model: &LocalModel, k: &Weight) -> Vec<LiftKey> {
    let poles = k.poles();
    let kp: Vec<u32> = k.plus_values().iter().map(|x| x.to_integer() as u32).collect();
    let supp: Vec<usize> = (0..model.n).filter(|i| kp[*i] > 0).collect();
    let mut out = Vec::new();
    for jm in 0u64..(1 << model.f) {
        for sm in 0u64..(1 << supp.len()) {
            let mut mask = jm;
            let mut exps = kp.clone();
            for i in &poles {
                mask |= 1 << model.var_gen(*i);
            }
            for (b, i) in supp.iter().enumerate() {
                if sm >> b & 1 == 1 {
                    mask |= 1 << model.var_gen(*i);
                    if *i >= model.e {
                        exps[*i] -= 1;
                    }
                }
            }
            out.push(LiftKey { exps, mask });
        }
    }
    out.sort_by_key(|k| (k.degree(), k.clone()));
    out
}

/// Coordinates of `form` in the raw monomial list.
pub fn raw_coordinates(form: &LiftForm, keys: &[LiftKey]) -> Result<Vec<u64>> {
    let mut out = vec![0; keys.len()];
    for (k, v) in &form.terms {
        let i = keys
            .iter()
            .position(|x| x == k)
            .ok_or_else(|| Error::Shape(format!("monomial {k:?} outside the weight")))?;
        out[i] = *v;
    }
    Ok(out)
}

/// Solves `P x = b` modulo `q = p^m` for a matrix `P` invertible modulo `p`.
pub fn solve_unimodular(p: u64, q: u64, mat: &[Vec<u64>], b: &[u64]) -> Result<Vec<u64>> {
    let n = mat.len();
    let qi = q as i128;
    let mut a: Vec<Vec<i128>> = mat
        .iter()
        .zip(b)
        .map(|(row, y)| {
            let mut r: Vec<i128> = row.iter().map(|x| *x as i128).collect();
            r.push(*y as i128);
            r
        })
        .collect();
    for col in 0..n {
        let piv = (col..n)
            .find(|r| a[*r][col] % p as i128 != 0)
            .ok_or_else(|| Error::Malformed("change of basis is not invertible".into()))?;
        a.swap(col, piv);
        let inv = BigInt::from(a[col][col])
            .extended_gcd(&BigInt::from(qi))
            .x
            .mod_floor(&BigInt::from(qi))
            .to_i128()
            .expect("small");
        for x in a[col].iter_mut() {
            *x = (*x * inv).rem_euclid(qi);
        }
        for r in 0..n {
            if r != col && a[r][col] != 0 {
                let f = a[r][col];
                let pivot_row = a[col].clone();
                for (x, y) in a[r].iter_mut().zip(&pivot_row) {
                    *x = (*x - f * y).rem_euclid(qi);
                }
            }
        }
    }
    Ok(a.iter().map(|r| r[n] as u64).collect())
}

/// Change-of-basis matrix (raw coordinates of each p-basic element, as columns).
pub fn p_basic_matrix(model: &LocalModel, level: u32, k: &Weight) -> Result<(Vec<LiftKey>, Vec<BasisKey>, Vec<Vec<u64>>)> {
    let raw = raw_keys(model, k);
    let basic = p_basic_keys(model, k);
    if raw.len() != basic.len() {
        return Err(Error::Shape(format!(
            "{} raw monomials but {} p-basic elements",
            raw.len(),
            basic.len()
        )));
    }
    let mut mat = vec![vec![0u64; basic.len()]; raw.len()];
    for (c, key) in basic.iter().enumerate() {
        let f = make_p_basic(model, level, key)?;
        for (r, v) in raw_coordinates(&f, &raw)?.into_iter().enumerate() {
            mat[r][c] = v;
        }
    }
    Ok((raw, basic, mat))
}

/// Coordinates of a single-weight form in a p-basic basis.
pub fn p_basic_coordinates(form: &LiftForm, basis: &[BasisKey]) -> Result<Vec<u64>> {
    let Some(first) = form.terms.keys().next() else {
        return Ok(vec![0; basis.len()]);
    };
    let k = lift_weight(&form.model, first);
    let (raw, _, mat) = p_basic_matrix(&form.model, form.level, &k)?;
    let b = raw_coordinates(form, &raw)?;
    solve_unimodular(form.model.p, form.modulus(), &mat, &b)
}

/// All partitions of an integral weight as p-basic keys with a given phantom set.
pub fn p_basic_keys_with_j(model: &LocalModel, k: &Weight, j: Vec<usize>) -> Vec<BasisKey> {
    enumerate_partitions(k, model.p)
        .into_iter()
        .map(|pt: Partition| BasisKey::new(k.clone(), pt, j.clone()))
        .collect()
}

impl fmt::Display for LiftForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| {
                let mut s = format!("{v}");
                for (i, x) in k.exps.iter().enumerate() {
                    if *x > 0 {
                        s.push_str(&format!("*T{}^{}", i + 1, x));
                    }
                }
                for g in 0..self.model.f + self.model.n {
                    if k.mask >> g & 1 == 1 {
                        if g < self.model.f {
                            s.push_str(&format!("*dlog(c{})", g + 1));
                        } else if g - self.model.f < self.model.e {
                            s.push_str(&format!("*dlog(T{})", g - self.model.f + 1));
                        } else {
                            s.push_str(&format!("*d(T{})", g - self.model.f + 1));
                        }
                    }
                }
                s
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{self, Bounds};
    use rand::{Rng, SeedableRng};

    fn random_lift<R: Rng>(model: &LocalModel, level: u32, rng: &mut R) -> LiftForm {
        let mut f = LiftForm::zero(model, level).unwrap();
        for _ in 0..rng.gen_range(1..4) {
            let exps: Vec<u32> = (0..model.n).map(|_| rng.gen_range(0..4)).collect();
            let mask = rng.gen_range(0..(1u64 << (model.f + model.n)));
            let c = rng.gen_range(1..model.p.pow(level)) as i64;
            f = f.add(&LiftForm::monomial(model, level, exps, mask, c).unwrap()).unwrap();
        }
        f
    }

    #[test]
    fn examples() {
        let m = LocalModel::poly(3, 1, 1, 0).unwrap();
        let t = LiftForm::var(&m, 2, 0).unwrap();
        let dl = LiftForm::generator(&m, 2, m.var_gen(0)).unwrap();
        assert_eq!(t.d_lift(), t.mul_lift(&dl).unwrap());
        assert!(dl.d_lift().is_zero());
        assert!(dl.mul_lift(&dl).unwrap().is_zero());
        assert_eq!(dl.compare().unwrap(), DrwElement::dlog_x(&m, 2, 0).unwrap());
        assert_eq!(
            LiftForm::one(&m, 2).unwrap().compare().unwrap(),
            DrwElement::one(&m, 2).unwrap()
        );
    }

    #[test]
    fn p_basic_of_p_power() {
        // eps(k=(p), I1={1}) = p^{-1} d T^p = T^{p-1} dT
        let m = LocalModel::poly(3, 1, 0, 0).unwrap();
        let key = BasisKey::new(
            Weight::from_ints(&[3]),
            Partition {
                minus_inf: vec![],
                i0: vec![],
                blocks: vec![vec![0]],
            },
            vec![],
        );
        let f = make_p_basic(&m, 2, &key).unwrap();
        assert_eq!(f, LiftForm::monomial(&m, 2, vec![2], 1, 1).unwrap());
    }

    #[test]
    fn calculus_identities() {
        for model in [
            LocalModel::poly(2, 2, 1, 1).unwrap(),
            LocalModel::semistable(3, 3, 2, 0, 2).unwrap(),
        ] {
            let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(3);
            for level in 1..=3 {
                for _ in 0..50 {
                    let a = random_lift(&model, level, &mut r);
                    let b = random_lift(&model, level, &mut r);
                    assert!(a.d_lift().d_lift().is_zero());
                    // compare is a map of complexes and of algebras
                    assert_eq!(a.d_lift().compare().unwrap(), a.compare().unwrap().differential().unwrap());
                    assert_eq!(
                        a.mul_lift(&b).unwrap().compare().unwrap(),
                        a.compare().unwrap().multiply(&b.compare().unwrap()).unwrap()
                    );
                    assert_eq!(a.compare().unwrap(), a.compare_dictionary().unwrap());
                }
            }
        }
    }

    #[test]
    fn p_basic_change_of_basis_is_unimodular() {
        let model = LocalModel::semistable(2, 2, 2, 1, 2).unwrap();
        let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        for _ in 0..40 {
            let k = random::weight(&model, &mut r, &Bounds { max_den: 0, ..Bounds::default() }, true);
            let (_, basic, mat) = p_basic_matrix(&model, 3, &k).unwrap();
            let loc = crate::homology::local::Local::new(2, 3);
            let cols: Vec<Vec<i128>> = (0..basic.len())
                .map(|c| mat.iter().map(|row| row[c] as i128).collect())
                .collect();
            assert_eq!(crate::homology::local::index_exp(&loc, basic.len(), &cols), 0);
        }
    }
}
