//! `theta`-calculus on semistable models: `theta ^`, the contraction homotopy, the
//! relative quotient and the restrictions used by the Mayer-Vietoris sequence.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::Zero;

use super::{BasisKey, DrwElement};
use crate::error::{Error, Result};
use crate::forms::Form;
use crate::weights::{Base, Entry, LocalModel, Weight};

/// Closed strata used by the Mayer-Vietoris sequence of `X = V(T_1...T_d)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MvTarget {
    /// `Z_1 = V(T_1...T_{d-1})`.
    Z1,
    /// `Z_2 = V(T_d)`.
    Z2,
    /// `Z = Z_1 n Z_2`.
    Z,
}

/// An exterior generator: a phantom `dlog c_j` or a pole `dlog X_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Generator {
    C(usize),
    X(usize),
}

/// Generator removed by the contraction on the `k+` class of `k`: the last log
/// variable with `k+_i = 0`, or the last phantom generator if there is none.
pub fn contraction_generator(model: &LocalModel, k: &Weight) -> Option<Generator> {
    (0..model.e)
        .rev()
        .find(|i| k.0[*i].plus().is_zero())
        .map(Generator::X)
        .or_else(|| model.f.checked_sub(1).map(Generator::C))
}

/// Interior product with respect to `g` on one basis key: `iota_g(dlog_g ^ y) = y`.
pub fn interior_key(key: &BasisKey, g: Generator) -> Option<(BasisKey, bool)> {
    match g {
        Generator::C(j) => {
            let pos = key.j.iter().position(|x| *x == j)?;
            let mut out = key.clone();
            out.j.remove(pos);
            Some((out, pos % 2 == 1))
        }
        Generator::X(i) => {
            let pos = key.part.minus_inf.iter().position(|x| *x == i)?;
            let mut out = key.clone();
            out.part.minus_inf.remove(pos);
            out.k.0[i] = Entry::int(0);
            Some((out, (key.j.len() + pos) % 2 == 1))
        }
    }
}

/// Whether a key contains the generator `g`.
pub fn key_has(key: &BasisKey, g: Generator) -> bool {
    match g {
        Generator::C(j) => key.j.contains(&j),
        Generator::X(i) => key.part.minus_inf.contains(&i),
    }
}

impl DrwElement {
    fn require_log_point(&self) -> Result<()> {
        if self.model.base != Base::LogPoint || self.model.d == 0 {
            return Err(Error::UnsupportedModel(
                "theta needs a semistable model over the log point".into(),
            ));
        }
        Ok(())
    }

    /// `theta = sum_{i <= e} dlog X_i + sum_j dlog c_j`.
    pub fn theta(model: &LocalModel, level: u32) -> Result<Self> {
        let mut out = Self::zero(model, level)?;
        out.require_log_point()?;
        for i in 0..model.e {
            out = out.add(&Self::dlog_x(model, level, i)?)?;
        }
        for j in 0..model.f {
            out = out.add(&Self::dlog_c(model, level, j)?)?;
        }
        Ok(out)
    }

    /// `theta ^ omega`.
    pub fn wedge_theta(&self) -> Result<Self> {
        self.require_log_point()?;
        let mut theta = Form::zero(&self.model);
        for g in 0..self.model.f {
            theta = theta.add(&Form::dlog(&self.model, g));
        }
        for i in 0..self.model.e {
            theta = theta.add(&Form::dlog(&self.model, self.model.var_gen(i)));
        }
        Self::from_form(&self.model, self.level, &theta.mul(&self.to_form()))
    }

    /// Interior product with the generator `g` chosen per `k+` class by `choose`.
    fn interior_by(&self, choose: impl Fn(&Weight) -> Option<Generator>) -> Result<Self> {
        let mut out = Self::zero(&self.model, self.level)?;
        for (key, v) in &self.terms {
            let Some(g) = choose(&key.k.k_plus()) else {
                continue;
            };
            if let Some((k2, neg)) = interior_key(key, g) {
                let c = if neg { -BigInt::from(*v) } else { BigInt::from(*v) };
                out.add_term(k2, &c);
            }
        }
        Ok(out)
    }

    /// The contraction `c` with `(theta ^) c + c (theta ^) = id`.
    ///
    /// On each `k+` class it is the interior product with the generator given by
    /// [`contraction_generator`].
    pub fn contraction(&self) -> Result<Self> {
        self.require_log_point()?;
        let model = self.model;
        self.interior_by(|k| contraction_generator(&model, k))
    }

    /// Projection to the relative complex `W Lambda~ / theta ^ W Lambda~`.
    ///
    /// The result is the canonical representative without the contraction
    /// generator of its class.
    pub fn to_relative(&self) -> Result<Self> {
        self.wedge_theta()?.contraction()
    }

    /// Splits `omega = wc + wc'` where `wc'` is spanned by the elements obtained by
    /// replacing `dlog X_e` with `theta` in terms with a pole at `e`.
    pub fn eps_prime_decompose(&self) -> Result<(Self, Self)> {
        self.require_log_point()?;
        let e = self.model.e - 1;
        let poles_at_e = self.filter(|k| k.part.minus_inf.contains(&e));
        let stripped = poles_at_e.interior_by(|_| Some(Generator::X(e)))?;
        let wc_prime = stripped.wedge_theta()?;
        let wc = self.sub(&wc_prime)?;
        Ok((wc, wc_prime))
    }

    /// Restriction to one of the Mayer-Vietoris strata, in the stratum's own model.
    pub fn mv_restrict(&self, target: MvTarget) -> Result<Self> {
        let map = MvMap::from_x(&self.model, target)?;
        map.apply(self)
    }
}

/// A morphism of local models given on generators, applied through integral forms.
#[derive(Debug, Clone)]
pub struct MvMap {
    pub source: LocalModel,
    pub target: LocalModel,
    var_map: Vec<Option<usize>>,
    pole_to: Vec<Option<usize>>,
    c_map: Vec<usize>,
}

impl MvMap {
    /// The restriction from `X = X_{d,e,n,f}` to a Mayer-Vietoris stratum.
    pub fn from_x(x: &LocalModel, target: MvTarget) -> Result<Self> {
        if x.d == 0 {
            return Err(Error::UnsupportedModel("needs a semistable model".into()));
        }
        let (p, n, e, f, d) = (x.p, x.n, x.e, x.f, x.d);
        let ident: Vec<Option<usize>> = (0..n).map(Some).collect();
        let c_map: Vec<usize> = (0..f).collect();
        match target {
            MvTarget::Z1 => {
                if d < 2 {
                    return Err(Error::UnsupportedModel("Z1 needs d >= 2".into()));
                }
                Ok(MvMap {
                    source: *x,
                    target: LocalModel::new(p, n, e, f, d - 1, x.base)?,
                    var_map: ident,
                    pole_to: vec![None; n],
                    c_map,
                })
            }
            MvTarget::Z2 => {
                let mut var_map = ident;
                var_map.swap(0, d - 1);
                Ok(MvMap {
                    source: *x,
                    target: LocalModel::new(p, n, e, f, 1, x.base)?,
                    var_map,
                    pole_to: vec![None; n],
                    c_map,
                })
            }
            MvTarget::Z => {
                if d < 2 {
                    return Err(Error::UnsupportedModel("Z needs d >= 2".into()));
                }
                Self::kill_to_phantom(x, LocalModel::new(p, n - 1, e - 1, f + 1, d - 1, x.base)?, d - 1)
            }
        }
    }

    /// Sets variable `v` to zero, sending `dlog T_v` to a new last phantom generator.
    fn kill_to_phantom(source: &LocalModel, target: LocalModel, v: usize) -> Result<Self> {
        let n = source.n;
        let var_map = (0..n)
            .map(|i| match i.cmp(&v) {
                std::cmp::Ordering::Less => Some(i),
                std::cmp::Ordering::Equal => None,
                std::cmp::Ordering::Greater => Some(i - 1),
            })
            .collect();
        let mut pole_to = vec![None; n];
        pole_to[v] = Some(source.f);
        Ok(MvMap {
            source: *source,
            target,
            var_map,
            pole_to,
            c_map: (0..source.f).collect(),
        })
    }

    /// `Z_1 -> Z` and `Z_2 -> Z` for the strata of `x`.
    pub fn to_z(x: &LocalModel, from: MvTarget) -> Result<Self> {
        let z = Self::from_x(x, MvTarget::Z)?.target;
        match from {
            MvTarget::Z1 => {
                let z1 = Self::from_x(x, MvTarget::Z1)?.target;
                Self::kill_to_phantom(&z1, z, x.d - 1)
            }
            MvTarget::Z2 => {
                let z2 = Self::from_x(x, MvTarget::Z2)?.target;
                // undo the swap, then drop the old position d-1 (now at 0)
                let n = x.n;
                let d = x.d;
                let var_map = (0..n)
                    .map(|i| {
                        let old = if i == 0 {
                            d - 1
                        } else if i == d - 1 {
                            0
                        } else {
                            i
                        };
                        match old.cmp(&(d - 1)) {
                            std::cmp::Ordering::Less => Some(old),
                            std::cmp::Ordering::Equal => None,
                            std::cmp::Ordering::Greater => Some(old - 1),
                        }
                    })
                    .collect();
                let mut pole_to = vec![None; n];
                pole_to[0] = Some(x.f);
                Ok(MvMap {
                    source: z2,
                    target: z,
                    var_map,
                    pole_to,
                    c_map: (0..x.f).collect(),
                })
            }
            MvTarget::Z => Err(Error::UnsupportedModel("Z maps to itself".into())),
        }
    }

    /// Image of a key's weight in the target (`None` when every term dies).
    pub fn map_weight(&self, k: &Weight) -> Option<(Weight, bool)> {
        let mut out = vec![Entry::int(0); self.target.n];
        let mut new_phantom = false;
        for (i, x) in k.0.iter().enumerate() {
            match self.var_map[i] {
                Some(t) => out[t] = *x,
                None => match x {
                    Entry::Pole => new_phantom = self.pole_to[i].is_some(),
                    Entry::Val(v) if *v != num_rational::Rational64::from_integer(0) => return None,
                    _ => {}
                },
            }
        }
        Some((Weight(out), new_phantom))
    }

    pub fn apply(&self, omega: &DrwElement) -> Result<DrwElement> {
        if omega.model != self.source {
            return Err(Error::ModelMismatch);
        }
        let f = omega
            .to_form()
            .pullback(&self.target, &self.var_map, &self.pole_to, &self.c_map);
        DrwElement::from_form(&self.target, omega.level, &f)
    }
}

/// The keys of a `k+` class: all pole patterns on the zero log positions.
pub fn keys_of_plus_class(model: &LocalModel, kplus: &Weight) -> Vec<BasisKey> {
    let zeros: Vec<usize> = (0..model.e).filter(|i| kplus.0[*i].plus().is_zero()).collect();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << zeros.len()) {
        let mut k = kplus.clone();
        for (b, i) in zeros.iter().enumerate() {
            if mask >> b & 1 == 1 {
                k.0[*i] = Entry::Pole;
            }
        }
        out.extend(DrwElement::keys_of_weight(model, &k));
    }
    out.sort_by_key(|k| (k.degree(), k.clone()));
    out
}

/// Basis keys of the relative complex on a `k+` class.
pub fn relative_keys(model: &LocalModel, kplus: &Weight) -> Vec<BasisKey> {
    let g = contraction_generator(model, kplus);
    keys_of_plus_class(model, kplus)
        .into_iter()
        .filter(|k| g.is_none_or(|g| !key_has(k, g)))
        .collect()
}

/// Coefficients of `omega` on a key list (in the list order).
pub fn coordinates(omega: &DrwElement, keys: &[BasisKey]) -> Result<Vec<u64>> {
    let index: BTreeMap<&BasisKey, usize> = keys.iter().enumerate().map(|(i, k)| (k, i)).collect();
    let mut out = vec![0u64; keys.len()];
    for (k, v) in omega.terms() {
        let i = index.get(k).ok_or_else(|| {
            Error::Shape(format!("term {k:?} outside the expected basis"))
        })?;
        out[*i] = *v;
    }
    Ok(out)
}
