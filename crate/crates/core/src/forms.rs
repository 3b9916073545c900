//! Integral forms with fractional exponents.
//!
//! An element is a finite sum `c * T^k * dlog g_1 ^ .. ^ dlog g_r` with `c` rational
//! and `k` a vector of nonnegative rationals with p-power denominators. The
//! generators are `dlog c_1..dlog c_f` followed by `dlog T_1..dlog T_n`, kept in
//! ascending order inside a bitmask. On this algebra
//!
//! * `d(T^k dlog_M) = sum_{i not in M} k_i T^k dlog T_i ^ dlog_M`,
//! * `F` multiplies exponents by `p` and fixes every `dlog`,
//! * `V = p F^{-1}`,
//!
//! which realises the de Rham-Witt complex of the local model inside a rational
//! algebra. Basic Witt differentials are mapped here, multiplied or differentiated,
//! and mapped back by [`crate::drw`].

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};

use crate::weights::LocalModel;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FormKey {
    pub exps: Vec<Rational64>,
    pub mask: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Form {
    model: LocalModel,
    terms: BTreeMap<FormKey, BigRational>,
}

/// Sign of `dlog_a ^ dlog_b` relative to the sorted product of both masks.
pub fn wedge_sign(a: u64, b: u64) -> i32 {
    let mut inv = 0u32;
    let mut bb = b;
    while bb != 0 {
        let g = bb.trailing_zeros();
        bb &= bb - 1;
        // generators of `a` above g must move past it
        inv += (a >> (g + 1)).count_ones();
    }
    if inv.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn rat(x: &Rational64) -> BigRational {
    BigRational::new(BigInt::from(*x.numer()), BigInt::from(*x.denom()))
}

pub fn p_pow_big(p: u64, s: i64) -> BigRational {
    let base = BigInt::from(p);
    if s >= 0 {
        BigRational::from_integer(num_traits::pow(base, s as usize))
    } else {
        BigRational::new(BigInt::one(), num_traits::pow(base, (-s) as usize))
    }
}

impl Form {
    pub fn zero(model: &LocalModel) -> Self {
        Form {
            model: *model,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(model: &LocalModel) -> Self {
        Self::monomial(model, vec![Rational64::zero(); model.n], 0, BigRational::one())
    }

    pub fn monomial(model: &LocalModel, exps: Vec<Rational64>, mask: u64, c: BigRational) -> Self {
        let mut f = Self::zero(model);
        f.add_term(FormKey { exps, mask }, c);
        f
    }

    /// `dlog` of exterior generator `g`.
    pub fn dlog(model: &LocalModel, g: usize) -> Self {
        Self::monomial(model, vec![Rational64::zero(); model.n], 1 << g, BigRational::one())
    }

    /// `T^k`.
    pub fn power(model: &LocalModel, exps: Vec<Rational64>) -> Self {
        Self::monomial(model, exps, 0, BigRational::one())
    }

    pub fn model(&self) -> &LocalModel {
        &self.model
    }

    pub fn terms(&self) -> &BTreeMap<FormKey, BigRational> {
        &self.terms
    }

    pub fn into_terms(self) -> BTreeMap<FormKey, BigRational> {
        self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, key: &FormKey) -> BigRational {
        self.terms.get(key).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Whether the monomial vanishes in the model: the relation `T_1...T_d = 0`
    /// kills every monomial whose exponent is positive on all of `[1,d]`.
    fn killed(&self, key: &FormKey) -> bool {
        self.model.d > 0 && key.exps[..self.model.d].iter().all(|x| !x.is_zero())
    }

    pub fn add_term(&mut self, key: FormKey, c: BigRational) {
        if c.is_zero() || self.killed(&key) {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Form) -> Form {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Form) -> Form {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(k.clone(), -c.clone());
        }
        out
    }

    pub fn add_scaled(&mut self, other: &Form, s: &BigRational) {
        for (k, c) in &other.terms {
            self.add_term(k.clone(), c * s);
        }
    }

    pub fn scale(&self, s: &BigRational) -> Form {
        let mut out = Form::zero(&self.model);
        out.add_scaled(self, s);
        out
    }

    pub fn mul(&self, other: &Form) -> Form {
        let mut out = Form::zero(&self.model);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                if ka.mask & kb.mask != 0 {
                    continue;
                }
                let exps = ka.exps.iter().zip(&kb.exps).map(|(x, y)| x + y).collect();
                let sign = wedge_sign(ka.mask, kb.mask);
                let mut c = ca * cb;
                if sign < 0 {
                    c = -c;
                }
                out.add_term(
                    FormKey {
                        exps,
                        mask: ka.mask | kb.mask,
                    },
                    c,
                );
            }
        }
        out
    }

    pub fn d(&self) -> Form {
        let mut out = Form::zero(&self.model);
        for (k, c) in &self.terms {
            for (i, x) in k.exps.iter().enumerate() {
                let g = self.model.var_gen(i);
                if x.is_zero() || k.mask >> g & 1 == 1 {
                    continue;
                }
                let sign = wedge_sign(1 << g, k.mask);
                let mut v = c * rat(x);
                if sign < 0 {
                    v = -v;
                }
                out.add_term(
                    FormKey {
                        exps: k.exps.clone(),
                        mask: k.mask | 1 << g,
                    },
                    v,
                );
            }
        }
        out
    }

    /// `F`: exponents times `p`.
    pub fn frobenius(&self) -> Form {
        let p = Rational64::from_integer(self.model.p as i64);
        self.map_exps(|x| x * p, BigRational::one())
    }

    /// `V = p F^{-1}`.
    pub fn verschiebung(&self) -> Form {
        let p = Rational64::from_integer(self.model.p as i64);
        self.map_exps(|x| x / p, BigRational::from_integer(BigInt::from(self.model.p)))
    }

    fn map_exps(&self, f: impl Fn(&Rational64) -> Rational64, s: BigRational) -> Form {
        let mut out = Form::zero(&self.model);
        for (k, c) in &self.terms {
            out.add_term(
                FormKey {
                    exps: k.exps.iter().map(&f).collect(),
                    mask: k.mask,
                },
                c * &s,
            );
        }
        out
    }

    /// Reinterprets the form in another model through a map of generators.
    ///
    /// `var_map[i]` sends variable `i` to a target variable, or to `None` when the
    /// variable is set to zero; `pole_to` says where `dlog T_i` goes in that case
    /// (a target generator, or `None` for zero). `c_map` sends `dlog c_j` to a target
    /// generator. Monomials with positive exponent on a killed variable vanish.
    pub fn pullback(
        &self,
        target: &LocalModel,
        var_map: &[Option<usize>],
        pole_to: &[Option<usize>],
        c_map: &[usize],
    ) -> Form {
        let mut out = Form::zero(target);
        'term: for (k, c) in &self.terms {
            let mut exps = vec![Rational64::zero(); target.n];
            let mut gens: Vec<usize> = Vec::new();
            for j in 0..self.model.f {
                if k.mask >> j & 1 == 1 {
                    gens.push(c_map[j]);
                }
            }
            for (i, x) in k.exps.iter().enumerate() {
                let has_dlog = k.mask >> self.model.var_gen(i) & 1 == 1;
                match var_map[i] {
                    Some(t) => {
                        exps[t] = *x;
                        if has_dlog {
                            gens.push(target.var_gen(t));
                        }
                    }
                    None => {
                        if !x.is_zero() {
                            continue 'term;
                        }
                        if has_dlog {
                            match pole_to[i] {
                                Some(g) => gens.push(g),
                                None => continue 'term,
                            }
                        }
                    }
                }
            }
            // sign of sorting `gens` (listed in source generator order)
            let mut sign = 1;
            for a in 0..gens.len() {
                for b in a + 1..gens.len() {
                    if gens[a] == gens[b] {
                        continue 'term;
                    }
                    if gens[a] > gens[b] {
                        sign = -sign;
                    }
                }
            }
            let mask = gens.iter().fold(0u64, |m, g| m | 1 << g);
            let v = if sign < 0 { -c.clone() } else { c.clone() };
            out.add_term(FormKey { exps, mask }, v);
        }
        out
    }

    /// Keeps the terms accepted by `keep`.
    pub fn filter(&self, keep: impl Fn(&FormKey) -> bool) -> Form {
        Form {
            model: self.model,
            terms: self
                .terms
                .iter()
                .filter(|(k, _)| keep(k))
                .map(|(k, c)| (k.clone(), c.clone()))
                .collect(),
        }
    }

    /// Largest absolute value of a coefficient numerator, for diagnostics.
    pub fn height(&self) -> BigInt {
        self.terms
            .values()
            .map(|c| c.numer().abs())
            .max()
            .unwrap_or_default()
    }
}
