//! Termwise action of `F`, `V`, `d` and restriction on basic Witt differentials,
//! and the degree-zero dictionary with Witt coordinates.

use num_bigint::BigInt;

use super::{BasisKey, DrwElement};
use crate::error::{Error, Result};
use crate::weights::{ord_rat, Partition, Weight};
use crate::witt_poly::{ExpansionTerm, WittVectorPoly};
use crate::witt_scalar::WittScalar;

impl DrwElement {
    /// Frobenius `W_m -> W_{m-1}`.
    ///
    /// `F eps(xi, k) = eps(xi, pk)`, except when `I_0` is empty and `k+` is
    /// fractional, where the coefficient becomes `xi / p`.
    pub fn frobenius(&self) -> Result<Self> {
        if self.level < 2 {
            return Err(Error::LevelUnderflow {
                level: self.level,
                needed: 2,
            });
        }
        let p = self.model.p;
        let mut out = Self::zero(&self.model, self.level - 1)?;
        for (key, v) in &self.terms {
            let k = key.k.scale_p(p, 1);
            let c = if key.part.i0.is_empty() && !key.k.is_integral() {
                BigInt::from(*v / p)
            } else {
                BigInt::from(*v)
            };
            out.add_term(BasisKey::new(k, key.part.clone(), key.j.clone()), &c);
        }
        Ok(out)
    }

    /// Verschiebung `W_m -> W_{m+1}`.
    ///
    /// `V eps(xi, k) = eps(p xi, k/p)` when `I_0` is nonempty or `k/p` is integral,
    /// and `eps(p^2 xi, k/p)` otherwise.
    pub fn verschiebung(&self) -> Result<Self> {
        let p = self.model.p;
        let mut out = Self::zero(&self.model, self.level + 1)?;
        for (key, v) in &self.terms {
            let k = key.k.scale_p(p, -1);
            let factor = if key.part.i0.is_empty() && !k.is_integral() {
                p * p
            } else {
                p
            };
            out.add_term(
                BasisKey::new(k, key.part.clone(), key.j.clone()),
                &(BigInt::from(*v) * factor),
            );
        }
        Ok(out)
    }

    /// The differential.
    ///
    /// Zero on terms with `I_0` empty; otherwise `I_0` becomes the first block, with
    /// coefficient `p^{ord k_{I_0}} xi` for integral `k+` and `xi` otherwise. The
    /// sign `(-1)^{|J| + |I_{-inf}|}` comes from moving `d` past the left `dlog`
    /// factors.
    pub fn differential(&self) -> Result<Self> {
        let p = self.model.p;
        let mut out = Self::zero(&self.model, self.level)?;
        for (key, v) in &self.terms {
            if key.part.i0.is_empty() {
                continue;
            }
            let mut c = BigInt::from(*v);
            if key.k.is_integral() {
                let s = ord_rat(p, &key.k.0[key.part.i0[0]].plus());
                c *= BigInt::from(p).pow(s as u32);
            }
            if (key.j.len() + key.part.minus_inf.len()) % 2 == 1 {
                c = -c;
            }
            let mut blocks = vec![key.part.i0.clone()];
            blocks.extend(key.part.blocks.iter().cloned());
            let part = Partition {
                minus_inf: key.part.minus_inf.clone(),
                i0: vec![],
                blocks,
            };
            out.add_term(BasisKey::new(key.k.clone(), part, key.j.clone()), &c);
        }
        Ok(out)
    }

    /// Restriction `W_m -> W_{m-1}`.
    pub fn restrict(&self) -> Result<Self> {
        if self.level < 2 {
            return Err(Error::LevelUnderflow {
                level: self.level,
                needed: 2,
            });
        }
        let mut out = Self::zero(&self.model, self.level - 1)?;
        for (key, v) in &self.terms {
            out.add_term(key.clone(), &BigInt::from(*v));
        }
        Ok(out)
    }

    /// Restriction to level `target <= m`.
    pub fn restrict_to(&self, target: u32) -> Result<Self> {
        if target == 0 || target > self.level {
            return Err(Error::OutOfRange(format!(
                "cannot restrict level {} to {target}",
                self.level
            )));
        }
        let mut out = Self::zero(&self.model, target)?;
        for (key, v) in &self.terms {
            out.add_term(key.clone(), &BigInt::from(*v));
        }
        Ok(out)
    }

    /// Teichmüller lift `[x]` of a polynomial, via its Witt coordinates `(x, 0, ..)`.
    pub fn teichmuller_poly(
        model: &crate::weights::LocalModel,
        level: u32,
        x: &crate::poly::Poly,
    ) -> Result<Self> {
        let mut coords = vec![crate::poly::Poly::zero(model.n); level as usize];
        coords[0] = x.clone();
        let w = WittVectorPoly::new(model.p, model.n, coords)?;
        Self::from_witt_vector(model, &w)
    }

    /// Degree-zero element with the given Witt coordinates (length = level).
    pub fn from_witt_vector(model: &crate::weights::LocalModel, w: &WittVectorPoly) -> Result<Self> {
        if w.nvars() != model.n || w.prime() != model.p {
            return Err(Error::Shape("Witt vector does not match the model".into()));
        }
        let level = w.len() as u32;
        let p = model.p;
        let mut out = Self::zero(model, level)?;
        for t in w.coords_to_expansion() {
            let k = Weight::from_ints(&t.k.iter().map(|x| *x as i64).collect::<Vec<_>>())
                .scale_p(p, -(t.shift as i32));
            if k.validate(model).is_err() {
                // monomials killed by the relation of a semistable model
                continue;
            }
            let part = Partition {
                minus_inf: vec![],
                i0: k.ordered_plus_support(p),
                blocks: vec![],
            };
            let xi = WittScalar::teichmuller(t.coeff, level, p)?;
            let c = BigInt::from(xi.value()) * BigInt::from(p).pow(t.shift);
            out.add_term(BasisKey::new(k, part, vec![]), &c);
        }
        Ok(out)
    }

    /// Witt coordinates of a degree-zero element.
    pub fn to_witt_vector(&self) -> Result<WittVectorPoly> {
        let p = self.model.p;
        let mut terms = Vec::new();
        for (key, v) in &self.terms {
            if key.degree() != 0 {
                return Err(Error::Shape("element is not of degree zero".into()));
            }
            // Teichmüller digits: xi = sum_t p^t [c_t]
            let q = self.modulus() as i128;
            let mut rest = *v as i128;
            for t in 0..self.level {
                let c = (rest.rem_euclid(p as i128)) as u64;
                if c != 0 {
                    let kk = key.k.scale_p(p, t as i32);
                    let k: Vec<u32> = kk
                        .plus_values()
                        .iter()
                        .map(|x| {
                            if x.is_integer() {
                                Ok(x.to_integer() as u32)
                            } else {
                                Err(Error::NotIntegral("digit below u(k)".into()))
                            }
                        })
                        .collect::<Result<_>>()?;
                    terms.push(ExpansionTerm { k, shift: t, coeff: c });
                    let tc = WittScalar::teichmuller(c, self.level, p)?.value() as i128;
                    rest = (rest - tc).rem_euclid(q);
                }
                rest /= p as i128;
            }
        }
        WittVectorPoly::expansion_to_coords(p, self.model.n, self.level as usize, &terms)
    }
}
