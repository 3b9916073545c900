//! p-typical Witt vectors over `F_p[T_1..T_n]` in Witt coordinates.
//!
//! Sums and products are computed by lifting coordinates to `Z[T]`, combining ghost
//! components and solving the ghost equations back with exact division. The same
//! routine run on indeterminates builds the universal addition and multiplication
//! polynomials.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::error::{Error, Result};
use crate::poly::Poly;

/// A Witt vector of length `N` over `F_p[T_1..T_n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WittVectorPoly {
    p: u64,
    nvars: usize,
    coords: Vec<Poly>,
}

/// One summand `V^shift([coeff * T^k])` of the expansion of a Witt vector.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ExpansionTerm {
    pub k: Vec<u32>,
    pub shift: u32,
    pub coeff: u64,
}

fn big(p: u64) -> BigInt {
    BigInt::from(p)
}

/// Ghost components `w_i = sum_j p^j a_j^(p^(i-j))` of integer coordinates.
pub fn ghost_components(p: u64, coords: &[Poly]) -> Vec<Poly> {
    let nvars = coords[0].nvars();
    let mut powers: Vec<Poly> = coords.to_vec();
    let mut out = Vec::with_capacity(coords.len());
    for i in 0..coords.len() {
        let mut w = Poly::zero(nvars);
        let mut pj = BigInt::from(1);
        for pw in powers.iter().take(i + 1) {
            w = w.add(&pw.scale(&pj));
            pj *= big(p);
        }
        out.push(w);
        // raise a_j^(p^(i-j)) to the next power
        for pw in powers.iter_mut().take(i + 1) {
            *pw = pw.pow(p);
        }
    }
    out
}

/// Inverts [`ghost_components`]; the divisions are exact whenever the ghost vector
/// comes from integer Witt coordinates.
pub fn coords_from_ghost(p: u64, ghosts: &[Poly]) -> Vec<Poly> {
    let mut coords: Vec<Poly> = Vec::with_capacity(ghosts.len());
    for (i, g) in ghosts.iter().enumerate() {
        let mut rest = g.clone();
        let mut pj = BigInt::from(1);
        for (j, a) in coords.iter().enumerate() {
            let e = p.pow((i - j) as u32);
            rest = rest.sub(&a.pow(e).scale(&pj));
            pj *= big(p);
        }
        let a = rest
            .div_exact(&pj)
            .expect("ghost equations have integral solutions");
        coords.push(a);
    }
    coords
}

/// Universal addition and multiplication polynomials in `X_0..X_{N-1}, Y_0..Y_{N-1}`.
#[derive(Debug, Clone)]
pub struct UniversalWittPolynomials {
    pub p: u64,
    pub len: usize,
    pub sum: Vec<Poly>,
    pub prod: Vec<Poly>,
}

impl UniversalWittPolynomials {
    /// Evaluates `table` on two coordinate vectors and reduces mod p.
    fn eval(&self, table: &[Poly], a: &WittVectorPoly, b: &WittVectorPoly) -> Result<WittVectorPoly> {
        a.check(b)?;
        if a.len() > self.len {
            return Err(Error::Shape(format!(
                "table built for length {}, vectors have length {}",
                self.len,
                a.len()
            )));
        }
        let n = a.len();
        let mut vals = vec![Poly::zero(a.nvars); 2 * self.len];
        for i in 0..n {
            vals[i] = a.coords[i].clone();
            vals[self.len + i] = b.coords[i].clone();
        }
        let q = big(a.p);
        let coords = table[..n]
            .iter()
            .map(|s| s.compose(&vals).reduce_mod(&q))
            .collect();
        Ok(WittVectorPoly {
            p: a.p,
            nvars: a.nvars,
            coords,
        })
    }

    pub fn add(&self, a: &WittVectorPoly, b: &WittVectorPoly) -> Result<WittVectorPoly> {
        self.eval(&self.sum, a, b)
    }

    pub fn mul(&self, a: &WittVectorPoly, b: &WittVectorPoly) -> Result<WittVectorPoly> {
        self.eval(&self.prod, a, b)
    }
}

/// Builds the universal Witt polynomials of length `n` over the integers.
pub fn build_universal(n: usize, p: u64) -> Result<UniversalWittPolynomials> {
    if n == 0 {
        return Err(Error::Shape("length must be at least 1".into()));
    }
    let nv = 2 * n;
    let xs: Vec<Poly> = (0..n).map(|i| Poly::var(nv, i)).collect();
    let ys: Vec<Poly> = (0..n).map(|i| Poly::var(nv, n + i)).collect();
    let gx = ghost_components(p, &xs);
    let gy = ghost_components(p, &ys);
    let gs: Vec<Poly> = gx.iter().zip(&gy).map(|(a, b)| a.add(b)).collect();
    let gm: Vec<Poly> = gx.iter().zip(&gy).map(|(a, b)| a.mul(b)).collect();
    Ok(UniversalWittPolynomials {
        p,
        len: n,
        sum: coords_from_ghost(p, &gs),
        prod: coords_from_ghost(p, &gm),
    })
}

impl WittVectorPoly {
    /// Builds a Witt vector from coordinates; coefficients are reduced mod p.
    pub fn new(p: u64, nvars: usize, coords: Vec<Poly>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Shape("length must be at least 1".into()));
        }
        if coords.iter().any(|c| c.nvars() != nvars) {
            return Err(Error::Shape("coordinate variable count mismatch".into()));
        }
        let q = big(p);
        Ok(WittVectorPoly {
            p,
            nvars,
            coords: coords.iter().map(|c| c.reduce_mod(&q)).collect(),
        })
    }

    pub fn zero(p: u64, nvars: usize, len: usize) -> Self {
        WittVectorPoly {
            p,
            nvars,
            coords: vec![Poly::zero(nvars); len],
        }
    }

    /// Teichmüller representative `[c T^k]`.
    pub fn teichmuller(p: u64, len: usize, k: &[u32], c: u64) -> Self {
        let mut w = Self::zero(p, k.len(), len);
        w.coords[0] = Poly::monomial(k.to_vec(), BigInt::from(c % p));
        w
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn coords(&self) -> &[Poly] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.is_zero())
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.p != other.p {
            return Err(Error::PrimeMismatch(self.p, other.p));
        }
        if self.nvars != other.nvars || self.len() != other.len() {
            return Err(Error::Shape(format!(
                "({} vars, length {}) vs ({} vars, length {})",
                self.nvars,
                self.len(),
                other.nvars,
                other.len()
            )));
        }
        Ok(())
    }

    fn ghosts(&self) -> Vec<Poly> {
        ghost_components(self.p, &self.coords)
    }

    fn from_ghosts(p: u64, nvars: usize, g: &[Poly]) -> Self {
        let q = big(p);
        WittVectorPoly {
            p,
            nvars,
            coords: coords_from_ghost(p, g)
                .iter()
                .map(|c| c.reduce_mod(&q))
                .collect(),
        }
    }

    pub fn w_add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let g: Vec<Poly> = self
            .ghosts()
            .iter()
            .zip(other.ghosts().iter())
            .map(|(a, b)| a.add(b))
            .collect();
        Ok(Self::from_ghosts(self.p, self.nvars, &g))
    }

    pub fn w_sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let g: Vec<Poly> = self
            .ghosts()
            .iter()
            .zip(other.ghosts().iter())
            .map(|(a, b)| a.sub(b))
            .collect();
        Ok(Self::from_ghosts(self.p, self.nvars, &g))
    }

    pub fn w_mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let g: Vec<Poly> = self
            .ghosts()
            .iter()
            .zip(other.ghosts().iter())
            .map(|(a, b)| a.mul(b))
            .collect();
        Ok(Self::from_ghosts(self.p, self.nvars, &g))
    }

    /// Frobenius: coordinate-wise p-th powers, truncated to length `N - 1`.
    pub fn w_frobenius(&self) -> Result<Self> {
        if self.len() < 2 {
            return Err(Error::LevelUnderflow {
                level: self.len() as u32,
                needed: 2,
            });
        }
        let q = big(self.p);
        Ok(WittVectorPoly {
            p: self.p,
            nvars: self.nvars,
            coords: self.coords[..self.len() - 1]
                .iter()
                .map(|c| c.pow(self.p).reduce_mod(&q))
                .collect(),
        })
    }

    /// Verschiebung: prepend a zero coordinate (length grows by one).
    pub fn w_verschiebung(&self) -> Self {
        let mut coords = vec![Poly::zero(self.nvars)];
        coords.extend(self.coords.iter().cloned());
        WittVectorPoly {
            p: self.p,
            nvars: self.nvars,
            coords,
        }
    }

    /// Truncation to length `N - 1`.
    pub fn restrict(&self) -> Result<Self> {
        if self.len() < 2 {
            return Err(Error::LevelUnderflow {
                level: self.len() as u32,
                needed: 2,
            });
        }
        let mut out = self.clone();
        out.coords.pop();
        Ok(out)
    }

    /// Greedy peeling into `sum V^m([c T^k])`.
    pub fn coords_to_expansion(&self) -> Vec<ExpansionTerm> {
        let mut out = Vec::new();
        let mut cur = self.clone();
        let mut shift = 0u32;
        loop {
            let head: Vec<ExpansionTerm> = cur.coords[0]
                .terms()
                .map(|(k, c)| ExpansionTerm {
                    k: k.to_vec(),
                    shift,
                    coeff: c.to_u64().expect("reduced coefficient"),
                })
                .collect();
            if cur.len() == 1 {
                out.extend(head);
                break;
            }
            // Subtract the Teichmüller part; the result has vanishing first coordinate.
            let teich = sum_of_shifted(
                self.p,
                self.nvars,
                cur.len(),
                head.iter().map(|t| ExpansionTerm {
                    shift: 0,
                    ..t.clone()
                }),
            );
            let rest = cur.w_sub(&teich).expect("shapes agree");
            debug_assert!(rest.coords[0].is_zero());
            out.extend(head);
            cur = WittVectorPoly {
                p: self.p,
                nvars: self.nvars,
                coords: rest.coords[1..].to_vec(),
            };
            shift += 1;
        }
        out.sort();
        out
    }

    /// Inverse of [`coords_to_expansion`](Self::coords_to_expansion).
    pub fn expansion_to_coords(
        p: u64,
        nvars: usize,
        len: usize,
        terms: &[ExpansionTerm],
    ) -> Result<Self> {
        if len == 0 {
            return Err(Error::Shape("length must be at least 1".into()));
        }
        if let Some(t) = terms.iter().find(|t| t.k.len() != nvars) {
            return Err(Error::Shape(format!("exponent {:?} has wrong arity", t.k)));
        }
        Ok(sum_of_shifted(p, nvars, len, terms.iter().cloned()))
    }
}

/// `sum_t V^{m_t}([c_t T^{k_t}])`, computed in one ghost solve.
fn sum_of_shifted(
    p: u64,
    nvars: usize,
    len: usize,
    terms: impl Iterator<Item = ExpansionTerm>,
) -> WittVectorPoly {
    let mut ghosts = vec![Poly::zero(nvars); len];
    // Teichmüller terms are not additive, so every summand contributes separately.
    for t in terms {
        let c = t.coeff % p;
        if c == 0 || t.shift as usize >= len {
            continue;
        }
        let base = Poly::monomial(t.k.clone(), BigInt::from(c));
        let pm = num_traits::pow(big(p), t.shift as usize);
        for (i, g) in ghosts.iter_mut().enumerate().skip(t.shift as usize) {
            let e = p.pow(i as u32 - t.shift);
            *g = g.add(&base.pow(e).scale(&pm));
        }
    }
    WittVectorPoly::from_ghosts(p, nvars, &ghosts)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(nv: usize, i: usize) -> Poly {
        Poly::var(nv, i)
    }

    #[test]
    fn universal_small() {
        let u1 = build_universal(1, 3).unwrap();
        assert_eq!(u1.sum[0], x(2, 0).add(&x(2, 1)));
        assert_eq!(u1.prod[0], x(2, 0).mul(&x(2, 1)));
        let u2 = build_universal(2, 2).unwrap();
        // s1 = X1 + Y1 - X0 Y0
        let s1 = x(4, 1).add(&x(4, 3)).sub(&x(4, 0).mul(&x(4, 2)));
        assert_eq!(u2.sum[1], s1);
        for p in [2u64, 3, 5] {
            let u = build_universal(2, p).unwrap();
            let m1 = x(4, 0)
                .pow(p)
                .mul(&x(4, 3))
                .add(&x(4, 1).mul(&x(4, 2).pow(p)))
                .add(&x(4, 1).mul(&x(4, 3)).scale(&BigInt::from(p)));
            assert_eq!(u.prod[1], m1);
        }
    }

    #[test]
    fn universal_ghost_identities() {
        for (p, n) in [(2u64, 4usize), (3, 3), (5, 2)] {
            let u = build_universal(n, p).unwrap();
            let nv = 2 * n;
            let xs: Vec<Poly> = (0..n).map(|i| x(nv, i)).collect();
            let ys: Vec<Poly> = (0..n).map(|i| x(nv, n + i)).collect();
            let gx = ghost_components(p, &xs);
            let gy = ghost_components(p, &ys);
            let gs = ghost_components(p, &u.sum);
            let gm = ghost_components(p, &u.prod);
            for i in 0..n {
                assert_eq!(gs[i], gx[i].add(&gy[i]));
                assert_eq!(gm[i], gx[i].mul(&gy[i]));
            }
        }
    }

    #[test]
    fn teichmuller_doubling_p2() {
        let t = WittVectorPoly::teichmuller(2, 2, &[1], 1);
        let s = t.w_add(&t).unwrap();
        assert!(s.coords()[0].is_zero());
        assert_eq!(s.coords()[1], Poly::monomial(vec![2], BigInt::from(1)));
    }

    #[test]
    fn teichmuller_multiplicative() {
        let a = WittVectorPoly::teichmuller(3, 3, &[1, 0], 1);
        let b = WittVectorPoly::teichmuller(3, 3, &[0, 1], 2);
        let ab = WittVectorPoly::teichmuller(3, 3, &[1, 1], 2);
        assert_eq!(a.w_mul(&b).unwrap(), ab);
        let z = WittVectorPoly::zero(3, 2, 3);
        assert_eq!(a.w_add(&z).unwrap(), a);
    }

    #[test]
    fn frobenius_and_verschiebung() {
        let t = WittVectorPoly::teichmuller(3, 3, &[1], 1);
        assert_eq!(t.w_frobenius().unwrap(), WittVectorPoly::teichmuller(3, 2, &[3], 1));
        // FV = p, with p = V(1) in W(F_p)
        let a = WittVectorPoly::new(
            3,
            1,
            vec![x(1, 0), Poly::constant(1, 2), x(1, 0).pow(2)],
        )
        .unwrap();
        let fv = a.w_verschiebung().w_frobenius().unwrap();
        let p_const = WittVectorPoly::teichmuller(3, 2, &[0], 1).w_verschiebung();
        assert_eq!(fv, p_const.w_mul(&a).unwrap());
        assert!(WittVectorPoly::zero(3, 1, 2).w_verschiebung().is_zero());
    }

    #[test]
    fn expansion_examples() {
        let t = WittVectorPoly::teichmuller(2, 2, &[1], 1);
        assert_eq!(
            t.coords_to_expansion(),
            vec![ExpansionTerm { k: vec![1], shift: 0, coeff: 1 }]
        );
        let v = WittVectorPoly::teichmuller(2, 1, &[1], 1).w_verschiebung();
        assert_eq!(
            v.coords_to_expansion(),
            vec![ExpansionTerm { k: vec![1], shift: 1, coeff: 1 }]
        );
        // (T, T) over p = 2: [T] + V([T] - correction)
        let a = WittVectorPoly::new(2, 1, vec![x(1, 0), x(1, 0)]).unwrap();
        let e = a.coords_to_expansion();
        let back = WittVectorPoly::expansion_to_coords(2, 1, 2, &e).unwrap();
        assert_eq!(back, a);
        assert_eq!(e.iter().filter(|t| t.shift == 0).count(), 1);
    }

    #[test]
    fn table_agrees_with_ghost_solve() {
        let u = build_universal(3, 2).unwrap();
        let a = WittVectorPoly::new(
            2,
            2,
            vec![x(2, 0).add(&x(2, 1)), x(2, 1), x(2, 0).mul(&x(2, 1))],
        )
        .unwrap();
        let b = WittVectorPoly::new(2, 2, vec![x(2, 1), Poly::constant(2, 1), x(2, 0)]).unwrap();
        assert_eq!(u.add(&a, &b).unwrap(), a.w_add(&b).unwrap());
        assert_eq!(u.mul(&a, &b).unwrap(), a.w_mul(&b).unwrap());
    }
}
