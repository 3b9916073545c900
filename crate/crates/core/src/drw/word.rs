//! Product expressions in Teichmüller monomials, `V`, `d` and `dlog`, and their
//! conversion to and from normal forms.

use std::fmt;

use num_bigint::BigInt;
use num_rational::{BigRational, Rational64};
use num_traits::One;

use super::{BasisKey, DrwElement};
use crate::error::{Error, Result};
use crate::forms::{p_pow_big, Form, FormKey};
use crate::weights::{ord_rat, LocalModel};

/// One factor of a [`Word`]. Exponent vectors `kappa` are integral.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Factor {
    /// `dlog X_i` (0-based, `i < e`).
    DlogX(usize),
    /// `dlog c_j` (0-based, `j < f`).
    DlogC(usize),
    /// `V^u(eta X^kappa)`.
    V { u: u32, eta: BigInt, kappa: Vec<u64> },
    /// `d V^u(eta X^kappa)`.
    DV { u: u32, eta: BigInt, kappa: Vec<u64> },
    /// `F^s d X^kappa`.
    FD { s: u32, kappa: Vec<u64> },
}

/// `scalar * f_1 * f_2 * ... * f_r` in the de Rham-Witt complex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Word {
    pub scalar: BigInt,
    pub factors: Vec<Factor>,
}

fn exps_scaled(kappa: &[u64], p: u64, u: u32) -> Vec<Rational64> {
    let den = (p as i64).pow(u);
    kappa
        .iter()
        .map(|x| Rational64::new(*x as i64, den))
        .collect()
}

impl Factor {
    pub fn degree(&self) -> usize {
        match self {
            Factor::V { .. } => 0,
            _ => 1,
        }
    }

    fn check(&self, model: &LocalModel) -> Result<()> {
        let bad = |what: String| Err(Error::Malformed(what));
        match self {
            Factor::DlogX(i) if *i >= model.e => bad(format!("dlog X{} needs a log variable", i + 1)),
            Factor::DlogC(j) if *j >= model.f => bad(format!("no phantom generator c{}", j + 1)),
            Factor::V { kappa, .. } | Factor::DV { kappa, .. } | Factor::FD { kappa, .. }
                if kappa.len() != model.n =>
            {
                bad(format!("exponent vector of length {} in n = {}", kappa.len(), model.n))
            }
            _ => Ok(()),
        }
    }

    /// The factor as an integral form.
    pub fn to_form(&self, model: &LocalModel) -> Form {
        let p = model.p;
        match self {
            Factor::DlogX(i) => Form::dlog(model, model.var_gen(*i)),
            Factor::DlogC(j) => Form::dlog(model, *j),
            Factor::V { u, eta, kappa } => Form::monomial(
                model,
                exps_scaled(kappa, p, *u),
                0,
                p_pow_big(p, *u as i64) * BigRational::from_integer(eta.clone()),
            ),
            Factor::DV { u, eta, kappa } => Factor::V {
                u: *u,
                eta: eta.clone(),
                kappa: kappa.clone(),
            }
            .to_form(model)
            .d(),
            Factor::FD { s, kappa } => {
                let exps = exps_scaled(kappa, p, 0)
                    .into_iter()
                    .map(|x| x * Rational64::from_integer((p as i64).pow(*s)))
                    .collect();
                Form::power(model, exps)
                    .d()
                    .scale(&p_pow_big(p, -(*s as i64)))
            }
        }
    }
}

impl Word {
    pub fn new(scalar: impl Into<BigInt>, factors: Vec<Factor>) -> Self {
        Word {
            scalar: scalar.into(),
            factors,
        }
    }

    pub fn degree(&self) -> usize {
        self.factors.iter().map(Factor::degree).sum()
    }

    /// Evaluates the word as an integral form.
    pub fn to_form(&self, model: &LocalModel) -> Result<Form> {
        let mut f = Form::one(model).scale(&BigRational::from_integer(self.scalar.clone()));
        for x in &self.factors {
            x.check(model)?;
            f = f.mul(&x.to_form(model));
        }
        Ok(f)
    }

    /// Concatenation (the product of the two words).
    pub fn concat(&self, other: &Word) -> Word {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Word {
            scalar: &self.scalar * &other.scalar,
            factors,
        }
    }
}

impl DrwElement {
    /// Rewrites one basic term as a word.
    ///
    /// With `u_j = u(k_{I_j})` and `xi = p^{u(k+)} eta`:
    /// integral `k+` gives `xi X^{k_{I_0}} prod F^{s_j} d X^{k_{I_j}/p^{s_j}}`; fractional
    /// `k+` with `I_0` nonempty gives `V^{u_0}(eta X^{p^{u_0} k_{I_0}})` followed by
    /// `d V^{u_j}(X^{p^{u_j} k_{I_j}})` for `u_j > 0` and `F^{s_j} d X^{..}` otherwise;
    /// with `I_0` empty the coefficient `eta` rides the first `d V` factor.
    pub fn expand_to_word(model: &LocalModel, key: &BasisKey, xi: u64) -> Result<Word> {
        key.validate(model)?;
        let p = model.p;
        let kp = key.k.plus_values();
        let u = key.u(p);
        let pu = p.pow(u);
        if !xi.is_multiple_of(pu) {
            return Err(Error::CoefficientValuation { needed: u });
        }
        let mut eta = Some(BigInt::from(xi / pu));
        let mut factors: Vec<Factor> = Vec::new();
        factors.extend(key.j.iter().map(|j| Factor::DlogC(*j)));
        factors.extend(key.part.minus_inf.iter().map(|i| Factor::DlogX(*i)));
        let restricted = |set: &[usize], scale: u32| -> Vec<u64> {
            let mut v = vec![0u64; model.n];
            let f = Rational64::from_integer((p as i64).pow(scale));
            for &i in set {
                let x = kp[i] * f;
                debug_assert!(x.is_integer());
                v[i] = x.to_integer() as u64;
            }
            v
        };
        let mut scalar = BigInt::one();
        if !key.part.i0.is_empty() || u == 0 {
            let u0 = if key.part.i0.is_empty() {
                0
            } else {
                ord_rat(p, &kp[key.part.i0[0]]).min(0).unsigned_abs() as u32
            };
            // `I_0` has the smallest p-adic orders, so u0 = u(k+) when it is nonempty
            let eta0 = eta.take().expect("unused");
            if u == 0 {
                scalar = eta0;
                if !key.part.i0.is_empty() {
                    factors.push(Factor::V {
                        u: 0,
                        eta: BigInt::one(),
                        kappa: restricted(&key.part.i0, 0),
                    });
                }
            } else {
                factors.push(Factor::V {
                    u: u0,
                    eta: eta0,
                    kappa: restricted(&key.part.i0, u0),
                });
            }
        }
        for block in &key.part.blocks {
            let o = ord_rat(p, &kp[block[0]]);
            if o < 0 {
                let uj = (-o) as u32;
                factors.push(Factor::DV {
                    u: uj,
                    eta: eta.take().unwrap_or_else(BigInt::one),
                    kappa: restricted(block, uj),
                });
            } else {
                let s = o as u32;
                let kappa = restricted(block, 0)
                    .into_iter()
                    .map(|x| x / p.pow(s))
                    .collect();
                factors.push(Factor::FD { s, kappa });
            }
        }
        Ok(Word { scalar, factors })
    }

    /// Normal form of a word at level `m`.
    pub fn normalize_word(model: &LocalModel, level: u32, word: &Word) -> Result<Self> {
        Self::from_form(model, level, &word.to_form(model)?)
    }

    /// The words of all terms, for display and serialization.
    pub fn to_words(&self) -> Result<Vec<Word>> {
        self.terms
            .iter()
            .map(|(k, v)| Self::expand_to_word(&self.model, k, *v))
            .collect()
    }
}

/// Integral exponent vector of a form key, if it has one.
pub fn integral_exps(key: &FormKey) -> Option<Vec<u64>> {
    key.exps
        .iter()
        .map(|x| {
            if x.is_integer() && *x.numer() >= 0 {
                Some(x.to_integer() as u64)
            } else {
                None
            }
        })
        .collect()
}

fn fmt_kappa(kappa: &[u64]) -> String {
    kappa.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

impl fmt::Display for Factor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Factor::DlogX(i) => write!(f, "dlog(X{})", i + 1),
            Factor::DlogC(j) => write!(f, "dlog(c{})", j + 1),
            Factor::V { u, eta, kappa } => write!(f, "V^{u}({eta}*X^[{}])", fmt_kappa(kappa)),
            Factor::DV { u, eta, kappa } => write!(f, "dV^{u}({eta}*X^[{}])", fmt_kappa(kappa)),
            Factor::FD { s, kappa } => write!(f, "F^{s}d(X^[{}])", fmt_kappa(kappa)),
        }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.scalar)?;
        for x in &self.factors {
            write!(f, " * {x}")?;
        }
        Ok(())
    }
}
