//! Normal forms of the de Rham-Witt complex of a local model.
//!
//! An element of `W_m Lambda` is a finite sum of log basic Witt differentials
//! `eps(xi, k, P, J)`, stored as a map from [`BasisKey`] to the residue of `xi` mod
//! `p^m`. `F`, `V`, `d` and restriction act termwise by closed formulas; products
//! and words go through the integral-forms algebra of [`crate::forms`].

mod ghost;
mod ops;
mod theta;
mod word;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::forms::{p_pow_big, rat, wedge_sign, Form, FormKey};
use crate::weights::{
    enumerate_partitions, ord_rat, validate_partition, Entry, LocalModel, Partition, Weight,
};
use crate::witt_scalar::{modulus, val_p, WittScalar};

pub use ghost::{d_mod_p, ghost_formula, ghost_via_forms, mul_mod_p, p_basic_form, reduce_mod_p};
pub use theta::{contraction_generator, coordinates, interior_key, key_has, keys_of_plus_class, relative_keys, Generator, MvMap, MvTarget};
pub use word::{integral_exps, Factor, Word};

/// Index of a log basic Witt differential: weight, partition and phantom set `J`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BasisKey {
    pub k: Weight,
    pub part: Partition,
    /// Sorted 0-based indices of the `dlog c_j` factors.
    pub j: Vec<usize>,
}

impl BasisKey {
    pub fn new(k: Weight, part: Partition, j: Vec<usize>) -> Self {
        BasisKey { k, part, j }
    }

    pub fn degree(&self) -> usize {
        self.j.len() + self.part.minus_inf.len() + self.part.l()
    }

    /// `u(k+)`: the key's coefficient lives in `p^u W(F_p)`.
    pub fn u(&self, p: u64) -> u32 {
        self.k.u_of(p)
    }

    /// Number of `dlog` pole factors `|I_{-inf}|`.
    pub fn pole_count(&self) -> usize {
        self.part.minus_inf.len()
    }

    /// Checks the key against the model.
    pub fn validate(&self, model: &LocalModel) -> Result<()> {
        self.k.validate(model)?;
        if !validate_partition(&self.k, model.p, &self.part) {
            return Err(Error::InvalidPartition(format!(
                "{:?} is not a partition of the support of {}",
                self.part, self.k
            )));
        }
        if self.j.windows(2).any(|w| w[0] >= w[1]) || self.j.iter().any(|x| *x >= model.f) {
            return Err(Error::InvalidPartition(format!("bad phantom set {:?}", self.j)));
        }
        Ok(())
    }

    /// Whether the key survives at level `m` (`p^{m-1} k+` integral).
    pub fn alive_at(&self, p: u64, m: u32) -> bool {
        self.k.u_of(p) < m
    }

    /// Exterior mask of the `dlog` factors that do not depend on the partition.
    fn fixed_mask(&self, model: &LocalModel) -> u64 {
        let mut mask = 0u64;
        for j in &self.j {
            mask |= 1 << j;
        }
        for i in &self.part.minus_inf {
            mask |= 1 << model.var_gen(*i);
        }
        mask
    }

    /// Expansion of `eps(1, k, P, J)` as integral form monomials of exponent `k+`.
    ///
    /// Returns pairs (exterior mask, coefficient).
    pub fn expansion(&self, model: &LocalModel) -> Vec<(u64, BigRational)> {
        let p = model.p;
        let kp = self.k.plus_values();
        let mut coef = BigRational::one();
        if self.part.i0.is_empty() && !self.k.is_integral() {
            coef = p_pow_big(p, -(self.k.u_of(p) as i64));
        }
        let mut acc: Vec<(u64, BigRational)> = vec![(self.fixed_mask(model), coef)];
        for block in &self.part.blocks {
            let scale = p_pow_big(p, -ord_rat(p, &kp[block[0]]));
            let mut next = Vec::with_capacity(acc.len() * block.len());
            for (mask, c) in &acc {
                for &i in block {
                    let g = model.var_gen(i);
                    // the new factor is appended on the right
                    let s = wedge_sign(*mask, 1 << g);
                    let mut v = c * &scale * rat(&kp[i]);
                    if s < 0 {
                        v = -v;
                    }
                    next.push((mask | 1 << g, v));
                }
            }
            acc = next;
        }
        acc
    }

    /// The basic element with coefficient one as an integral form.
    pub fn to_form(&self, model: &LocalModel) -> Form {
        let exps = self.k.plus_values();
        let mut f = Form::zero(model);
        for (mask, c) in self.expansion(model) {
            f.add_term(
                FormKey {
                    exps: exps.clone(),
                    mask,
                },
                c,
            );
        }
        f
    }
}

/// A single log basic Witt differential with its coefficient.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasicWittDifferential {
    pub xi: WittScalar,
    pub key: BasisKey,
}

/// An element of `W_m Lambda` of a local model in normal form.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DrwElement {
    model: LocalModel,
    level: u32,
    terms: BTreeMap<BasisKey, u64>,
}

fn big_mod(x: &BigInt, q: u64) -> u64 {
    x.mod_floor(&BigInt::from(q)).to_u64().expect("residue fits")
}

/// Residue of a p-integral rational modulo `q = p^m`.
fn rat_mod(x: &BigRational, q: u64) -> u64 {
    let d = big_mod(x.denom(), q);
    let inv = BigInt::from(d)
        .extended_gcd(&BigInt::from(q))
        .x
        .mod_floor(&BigInt::from(q));
    big_mod(&(x.numer() * inv), q)
}

/// p-adic valuation of a nonzero big rational.
pub(crate) fn ord_big(p: u64, x: &BigRational) -> i64 {
    let pb = BigInt::from(p);
    let mut v = 0i64;
    let (mut a, mut b) = (x.numer().abs(), x.denom().abs());
    while (&a % &pb).is_zero() {
        a /= &pb;
        v += 1;
    }
    while (&b % &pb).is_zero() {
        b /= &pb;
        v -= 1;
    }
    v
}

impl DrwElement {
    pub fn zero(model: &LocalModel, level: u32) -> Result<Self> {
        if level == 0 {
            return Err(Error::LevelUnderflow { level, needed: 1 });
        }
        modulus(model.p, level)?;
        Ok(DrwElement {
            model: *model,
            level,
            terms: BTreeMap::new(),
        })
    }

    pub fn one(model: &LocalModel, level: u32) -> Result<Self> {
        let mut out = Self::zero(model, level)?;
        let key = BasisKey::new(
            Weight::zero(model.n),
            Partition {
                minus_inf: vec![],
                i0: vec![],
                blocks: vec![],
            },
            vec![],
        );
        out.add_term(key, &BigInt::one());
        Ok(out)
    }

    /// `eps(xi, k, P, J)` at the level of `xi`; zero if `p^{m-1} k+` is not integral.
    pub fn make_basic(
        model: &LocalModel,
        xi: WittScalar,
        k: Weight,
        part: Partition,
        j: Vec<usize>,
    ) -> Result<Self> {
        if xi.prime() != model.p {
            return Err(Error::PrimeMismatch(xi.prime(), model.p));
        }
        let key = BasisKey::new(k, part, j);
        key.validate(model)?;
        let u = key.u(model.p);
        if !xi.is_zero() && val_p(model.p, xi.value()) < u {
            return Err(Error::CoefficientValuation { needed: u });
        }
        let mut out = Self::zero(model, xi.level())?;
        out.add_term(key, &BigInt::from(xi.value()));
        Ok(out)
    }

    /// `dlog X_i` (0-based `i < e`).
    pub fn dlog_x(model: &LocalModel, level: u32, i: usize) -> Result<Self> {
        let mut k = Weight::zero(model.n);
        k.0[i] = Entry::Pole;
        let part = Partition {
            minus_inf: vec![i],
            i0: vec![],
            blocks: vec![],
        };
        Self::make_basic(model, WittScalar::one(level, model.p)?, k, part, vec![])
    }

    /// `dlog c_j` (0-based `j < f`).
    pub fn dlog_c(model: &LocalModel, level: u32, j: usize) -> Result<Self> {
        let part = Partition {
            minus_inf: vec![],
            i0: vec![],
            blocks: vec![],
        };
        Self::make_basic(
            model,
            WittScalar::one(level, model.p)?,
            Weight::zero(model.n),
            part,
            vec![j],
        )
    }

    /// Teichmüller monomial `[c T^k]` for integral `k`.
    pub fn teichmuller_monomial(model: &LocalModel, level: u32, k: &[u32], c: u64) -> Result<Self> {
        let w = Weight::from_ints(&k.iter().map(|x| *x as i64).collect::<Vec<_>>());
        let part = Partition {
            minus_inf: vec![],
            i0: w.ordered_plus_support(model.p),
            blocks: vec![],
        };
        let xi = WittScalar::teichmuller(c, level, model.p)?;
        Self::make_basic(model, xi, w, part, vec![])
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

    pub fn terms(&self) -> &BTreeMap<BasisKey, u64> {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &BasisKey) -> u64 {
        self.terms.get(key).copied().unwrap_or(0)
    }

    pub fn basic_terms(&self) -> Vec<BasicWittDifferential> {
        self.terms
            .iter()
            .map(|(k, v)| BasicWittDifferential {
                xi: WittScalar::new(*v as i128, self.level, self.model.p).expect("valid level"),
                key: k.clone(),
            })
            .collect()
    }

    /// Degrees present in the support.
    pub fn degrees(&self) -> Vec<usize> {
        let mut d: Vec<usize> = self.terms.keys().map(|k| k.degree()).collect();
        d.sort();
        d.dedup();
        d
    }

    /// The degree if the element is homogeneous (zero counts as any degree).
    pub fn degree(&self) -> Option<usize> {
        match self.degrees().as_slice() {
            [] => Some(0),
            [d] => Some(*d),
            _ => None,
        }
    }

    /// Adds `c * eps(1, key)` after reducing mod `p^m`; drops dead keys.
    ///
    /// The caller guarantees `p^{u(k)} | c`.
    pub(crate) fn add_term(&mut self, key: BasisKey, c: &BigInt) {
        if !key.alive_at(self.model.p, self.level) {
            return;
        }
        let q = self.modulus();
        let v = big_mod(c, q);
        if v == 0 {
            return;
        }
        let e = self.terms.entry(key.clone()).or_insert(0);
        *e = (*e + v) % q;
        if *e == 0 {
            self.terms.remove(&key);
        }
    }

    /// Builds an element from raw terms, checking every key.
    pub fn from_terms(
        model: &LocalModel,
        level: u32,
        terms: impl IntoIterator<Item = (BasisKey, BigInt)>,
    ) -> Result<Self> {
        let mut out = Self::zero(model, level)?;
        for (k, c) in terms {
            k.validate(model)?;
            let u = k.u(model.p);
            let q = out.modulus();
            let v = big_mod(&c, q);
            if v != 0 && val_p(model.p, v) < u {
                return Err(Error::CoefficientValuation { needed: u });
            }
            out.add_term(k, &c);
        }
        Ok(out)
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

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        let q = self.modulus();
        DrwElement {
            terms: self.terms.iter().map(|(k, v)| (k.clone(), q - v)).collect(),
            ..self.clone()
        }
    }

    /// Multiplication by an integer.
    pub fn scale(&self, s: &BigInt) -> Self {
        let mut out = DrwElement {
            terms: BTreeMap::new(),
            ..self.clone()
        };
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &(s * BigInt::from(*v)));
        }
        out
    }

    /// Keeps the terms accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(&BasisKey) -> bool) -> Self {
        DrwElement {
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, v)| (k.clone(), *v))
                .collect(),
            ..self.clone()
        }
    }

    /// The component of degree `deg`.
    pub fn homogeneous_part(&self, deg: usize) -> Self {
        self.filter(|k| k.degree() == deg)
    }

    /// The element as an integral form (coefficients lifted to `[0, p^m)`).
    pub fn to_form(&self) -> Form {
        let mut f = Form::zero(&self.model);
        for (k, v) in &self.terms {
            let c = BigRational::from_integer(BigInt::from(*v));
            f.add_scaled(&k.to_form(&self.model), &c);
        }
        f
    }

    /// Normal form of an integral form at level `m`.
    ///
    /// Fails if the form does not lie in the image of `W Lambda`.
    pub fn from_form(model: &LocalModel, level: u32, form: &Form) -> Result<Self> {
        let mut out = Self::zero(model, level)?;
        let p = model.p;
        // Group monomials by (weight with poles, phantom set); within a group the
        // remaining mask is a set of positions in the support of k+.
        type Group = BTreeMap<Vec<usize>, BigRational>;
        let mut groups: BTreeMap<(Weight, Vec<usize>), Group> = BTreeMap::new();
        for (fk, c) in form.terms() {
            let mut entries: Vec<Entry> = fk.exps.iter().map(|x| Entry::Val(*x)).collect();
            let mut d_pos = Vec::new();
            for (i, x) in fk.exps.iter().enumerate() {
                if fk.mask >> model.var_gen(i) & 1 == 1 {
                    if x.is_zero() {
                        if i >= model.e {
                            return Err(Error::NotIntegral(format!(
                                "dlog of non-log variable T{} without monomial factor",
                                i + 1
                            )));
                        }
                        entries[i] = Entry::Pole;
                    } else {
                        d_pos.push(i);
                    }
                }
                if x.numer() < &0 {
                    return Err(Error::NotIntegral("negative exponent".into()));
                }
            }
            let j: Vec<usize> = (0..model.f).filter(|j| fk.mask >> j & 1 == 1).collect();
            let k = Weight(entries);
            k.validate(model)
                .map_err(|e| Error::NotIntegral(format!("{e}")))?;
            let order = k.ordered_plus_support(p);
            let mut ranks: Vec<usize> = d_pos
                .iter()
                .map(|i| order.iter().position(|x| x == i).expect("in support"))
                .collect();
            ranks.sort();
            groups
                .entry((k, j))
                .or_default()
                .insert(ranks, c.clone());
        }
        for ((k, j), mut group) in groups {
            let order = k.ordered_plus_support(p);
            let u = k.u_of(p) as i64;
            while let Some((ranks, c)) = group.iter().next().map(|(r, c)| (r.clone(), c.clone())) {
                let starts: Vec<usize> = ranks.iter().map(|r| order[*r]).collect();
                let part = Partition::from_starts(&k, p, &starts)?;
                let key = BasisKey::new(k.clone(), part, j.clone());
                let exp = key.expansion(model);
                let lead_mask = key.fixed_mask(model)
                    | starts.iter().fold(0u64, |m, s| m | 1 << model.var_gen(*s));
                let lc = exp
                    .iter()
                    .find(|(m, _)| *m == lead_mask)
                    .map(|(_, c)| c.clone())
                    .expect("leading monomial present");
                let xi = &c / &lc;
                if ord_big(p, &xi) < u {
                    return Err(Error::NotIntegral(format!(
                        "coefficient {xi} of {k} is not divisible by p^{u}"
                    )));
                }
                for (m, v) in &exp {
                    let d_ranks: Vec<usize> = {
                        let mut r: Vec<usize> = (0..model.n)
                            .filter(|i| m >> model.var_gen(*i) & 1 == 1 && !k.0[*i].is_pole())
                            .map(|i| order.iter().position(|x| *x == i).unwrap())
                            .collect();
                        r.sort();
                        r
                    };
                    let e = group.entry(d_ranks.clone()).or_insert_with(BigRational::zero);
                    *e -= &xi * v;
                    if e.is_zero() {
                        group.remove(&d_ranks);
                    }
                }
                let q = out.modulus();
                let r = rat_mod(&xi, q);
                out.add_term(key, &BigInt::from(r));
            }
        }
        Ok(out)
    }

    /// Graded product.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let f = self.to_form().mul(&other.to_form());
        Self::from_form(&self.model, self.level, &f)
    }

    /// The same element one level up, with the same integer coefficients.
    ///
    /// This is a set-theoretic section of restriction, used to evaluate operators
    /// that factor through it.
    pub fn canonical_lift(&self) -> Result<Self> {
        let mut out = Self::zero(&self.model, self.level + 1)?;
        for (k, v) in &self.terms {
            out.add_term(k.clone(), &BigInt::from(*v));
        }
        Ok(out)
    }

    /// All basis keys of weight `k` (varying partition and phantom set).
    pub fn keys_of_weight(model: &LocalModel, k: &Weight) -> Vec<BasisKey> {
        let parts = enumerate_partitions(k, model.p);
        let mut out = Vec::new();
        for jm in 0u64..(1u64 << model.f) {
            let j: Vec<usize> = (0..model.f).filter(|x| jm >> x & 1 == 1).collect();
            for pt in &parts {
                out.push(BasisKey::new(k.clone(), pt.clone(), j.clone()));
            }
        }
        out.sort_by_key(|k| (k.degree(), k.clone()));
        out
    }

    /// Whether `restrict^{m-s}` kills the element, i.e. membership in `Fil^s`.
    pub fn in_standard_filtration(&self, s: u32) -> Result<bool> {
        if s > self.level {
            return Err(Error::OutOfRange(format!("s = {s} exceeds level {}", self.level)));
        }
        if s == 0 {
            return Ok(true);
        }
        let mut x = self.clone();
        for _ in 0..(self.level - s) {
            x = x.restrict()?;
        }
        Ok(x.is_zero())
    }
}

impl fmt::Display for DrwElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(k, v)| {
                let one = |v: &Vec<usize>| {
                    v.iter().map(|x| (x + 1).to_string()).collect::<Vec<_>>().join(",")
                };
                let blocks: Vec<String> = k.part.blocks.iter().map(one).collect();
                format!(
                    "{v}*eps(k={}, I-inf=[{}], I0=[{}], I=[{}], J=[{}])",
                    k.k,
                    one(&k.part.minus_inf),
                    one(&k.part.i0),
                    blocks.join("|"),
                    one(&k.j)
                )
            })
            .collect();
        write!(f, "{}", parts.join(" + "))
    }
}
