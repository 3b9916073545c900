//! Ghost (phantom) components `W_m Lambda -> Lambda_{A/F_p}`.
//!
//! The `i`-th component is `F^i` followed by restriction to level one, where a basic
//! term `eps(xi, k, P, J)` with integral `k` is the p-basic form times `xi mod p`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::Zero;

use super::{BasisKey, DrwElement};
use crate::error::{Error, Result};
use crate::forms::{wedge_sign, Form, FormKey};
use crate::weights::{ord_rat, p_pow, LocalModel};

/// Reduces the (p-integral) coefficients of a form modulo `p`.
pub fn reduce_mod_p(form: &Form) -> Result<Form> {
    let p = BigInt::from(form.model().p);
    let mut out = Form::zero(form.model());
    for (k, c) in form.terms() {
        if (c.denom() % &p).is_zero() {
            return Err(Error::NotIntegral(format!("coefficient {c} is not p-integral")));
        }
        let inv = c.denom().extended_gcd(&p).x;
        let v = (c.numer() * inv).mod_floor(&p);
        out.add_term(k.clone(), BigRational::from_integer(v));
    }
    Ok(out)
}

/// Product of two forms over `F_p`.
pub fn mul_mod_p(a: &Form, b: &Form) -> Result<Form> {
    reduce_mod_p(&a.mul(b))
}

/// Differential of a form over `F_p`.
pub fn d_mod_p(a: &Form) -> Result<Form> {
    reduce_mod_p(&a.d())
}

/// The p-basic form of an integral key, with integer coefficients.
pub fn p_basic_form(model: &LocalModel, key: &BasisKey) -> Result<Form> {
    if !key.k.is_integral() {
        return Err(Error::NotIntegral(format!("weight {} is fractional", key.k)));
    }
    Ok(key.to_form(model))
}

impl DrwElement {
    /// The `i`-th ghost component, `0 <= i < m`.
    pub fn ghost(&self, i: u32) -> Result<Form> {
        if i >= self.level {
            return Err(Error::OutOfRange(format!(
                "ghost index {i} at level {}",
                self.level
            )));
        }
        let mut x = self.clone();
        for _ in 0..i {
            x = x.frobenius()?;
        }
        let x = x.restrict_to(1)?;
        let mut out = Form::zero(&self.model);
        for (key, v) in &x.terms {
            let c = BigRational::from_integer(BigInt::from(*v));
            out.add_scaled(&p_basic_form(&self.model, key)?, &c);
        }
        reduce_mod_p(&out)
    }
}

/// The ghost component of a single basic term evaluated from the closed formula:
/// zero unless `p^i k+` is integral, otherwise the coefficient (`xi` or `eta`) mod `p`
/// times `dlog c_J dlog T_{I_-inf} T^{p^i k_{I_0}} prod p^{-ord} d T^{p^i k_{I_j}}`.
pub fn ghost_formula(model: &LocalModel, key: &BasisKey, xi: u64, i: u32) -> Result<Form> {
    let p = model.p;
    let k = key.k.scale_p(p, i as i32);
    if !k.is_integral() {
        return Ok(Form::zero(model));
    }
    let u = key.u(p);
    let coef = if key.part.i0.is_empty() && !key.k.is_integral() {
        // w_{i-u}(eta) with xi = V^u eta
        xi / p.pow(u)
    } else {
        xi
    };
    let kp = k.plus_values();
    let mut mask = 0u64;
    for j in &key.j {
        mask |= 1 << j;
    }
    for t in &key.part.minus_inf {
        mask |= 1 << model.var_gen(*t);
    }
    // every monomial carries T^{p^i k+}; the blocks contribute dlog terms
    let mut acc: Vec<(u64, BigInt)> = vec![(mask, BigInt::from(coef))];
    for block in &key.part.blocks {
        let s = ord_rat(p, &kp[block[0]]);
        let mut next = Vec::new();
        for (m, c) in &acc {
            for &t in block {
                let g = model.var_gen(t);
                let v = Rational64::from_integer(kp[t].to_integer()) / p_pow(p, s);
                debug_assert!(v.is_integer());
                let mut val = c * BigInt::from(v.to_integer());
                if wedge_sign(*m, 1 << g) < 0 {
                    val = -val;
                }
                next.push((m | 1 << g, val));
            }
        }
        acc = next;
    }
    let mut out = Form::zero(model);
    for (m, c) in acc {
        out.add_term(
            FormKey {
                exps: kp.clone(),
                mask: m,
            },
            BigRational::from_integer(c),
        );
    }
    reduce_mod_p(&out)
}

/// The ghost component computed in the integral-forms model: `F^i` there, then
/// reduction modulo `p`.
pub fn ghost_via_forms(omega: &DrwElement, i: u32) -> Result<Form> {
    let mut f = omega.to_form();
    for _ in 0..i {
        f = f.frobenius();
    }
    let f = f.filter(|k| k.exps.iter().all(|x| x.is_integer()));
    reduce_mod_p(&f)
}
