//! Lattices `L` with `p^M Z^n <= L <= Z^n`, handled through their images in
//! `(Z/p^M)^n`. Every computation is elimination over the chain ring `Z/p^M`
//! with pivots of minimal valuation, so entries never grow.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

/// Arithmetic modulo `p^M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Local {
    pub p: u64,
    pub m: u32,
    pub q: i128,
}

impl Local {
    pub fn new(p: u64, m: u32) -> Self {
        Local {
            p,
            m,
            q: (p as i128).pow(m),
        }
    }

    #[inline]
    pub fn red(&self, x: i128) -> i128 {
        x.rem_euclid(self.q)
    }

    /// Valuation capped at `M` (zero has valuation `M`).
    pub fn val(&self, x: i128) -> u32 {
        let mut x = self.red(x);
        if x == 0 {
            return self.m;
        }
        let p = self.p as i128;
        let mut v = 0;
        while x % p == 0 {
            x /= p;
            v += 1;
        }
        v
    }

    /// Inverse of a unit.
    pub fn inv(&self, x: i128) -> i128 {
        let g = BigInt::from(self.red(x)).extended_gcd(&BigInt::from(self.q));
        debug_assert!(g.gcd == BigInt::from(1));
        self.red(g.x.to_i128().expect("small"))
    }

    pub fn pow_p(&self, s: u32) -> i128 {
        (self.p as i128).pow(s)
    }
}

/// Valuations of the Smith form over `Z/p^M` of the `n`-row matrix whose columns are
/// `gens`, padded with `M` up to `n` entries, ascending.
pub fn smith_valuations(loc: &Local, n: usize, gens: &[Vec<i128>]) -> Vec<u32> {
    let mut a: Vec<Vec<i128>> = gens
        .iter()
        .map(|g| g.iter().map(|x| loc.red(*x)).collect())
        .filter(|g: &Vec<i128>| g.iter().any(|x| *x != 0))
        .collect();
    let mut rows: Vec<usize> = (0..n).collect();
    let mut out = Vec::new();
    while !a.is_empty() && !rows.is_empty() {
        // entry of minimal valuation
        let mut best: Option<(usize, usize, u32)> = None;
        for (ci, col) in a.iter().enumerate() {
            for (ri, r) in rows.iter().enumerate() {
                let v = loc.val(col[*r]);
                if v < loc.m && best.is_none_or(|b| v < b.2) {
                    best = Some((ci, ri, v));
                    if v == 0 {
                        break;
                    }
                }
            }
            if best.is_some_and(|b| b.2 == 0) {
                break;
            }
        }
        let Some((ci, ri, v)) = best else { break };
        out.push(v);
        let r = rows[ri];
        let pivot = a.swap_remove(ci);
        let unit = pivot[r] / loc.pow_p(v);
        let uinv = loc.inv(unit);
        // clear row r in the other columns; then drop row r
        for col in a.iter_mut() {
            let x = col[r];
            if x == 0 {
                continue;
            }
            let f = loc.red((x / loc.pow_p(v)) * uinv);
            for (t, y) in col.iter_mut().enumerate() {
                *y = loc.red(*y - f * pivot[t]);
            }
        }
        rows.swap_remove(ri);
        a.retain(|g| rows.iter().any(|r| g[*r] != 0));
    }
    while out.len() < n {
        out.push(loc.m);
    }
    out.sort();
    out
}

/// `log_p [Z^n : L]` for `L = span(gens) + p^M Z^n`.
pub fn index_exp(loc: &Local, n: usize, gens: &[Vec<i128>]) -> u32 {
    smith_valuations(loc, n, gens).iter().sum()
}

/// Elementary divisor exponents (ascending, zeros dropped) of `A / B` where
/// `B <= A`, both given by generators (plus `p^M Z^n`).
pub fn quotient_structure(loc: &Local, n: usize, a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<u32> {
    let ib = index_exp(loc, n, b);
    // e_j = log_p |p^j (A/B)|
    let mut e = Vec::new();
    for j in 0..=loc.m {
        let pj = loc.pow_p(j);
        let mut gens: Vec<Vec<i128>> = a
            .iter()
            .map(|g| g.iter().map(|x| loc.red(x * pj)).collect())
            .collect();
        gens.extend(b.iter().cloned());
        e.push(ib - index_exp(loc, n, &gens));
    }
    let mut out = Vec::new();
    for j in 0..loc.m as usize {
        // number of cyclic factors of order at least p^{j+1}
        let c_j = e[j] - e[j + 1];
        let c_next = if j + 1 < loc.m as usize {
            e[j + 1] - e[j + 2]
        } else {
            0
        };
        for _ in 0..(c_j - c_next) {
            out.push(j as u32 + 1);
        }
    }
    out.sort();
    out
}

/// Generators of `{x in span(basis) : (D x)_r = 0 mod p^{s_r} for r in rows}`,
/// where `basis` spans a lattice containing `p^M Z^n` (implicitly).
///
/// `apply` maps a vector to `D x`; the conditions are processed one row at a time.
pub fn preimage(
    loc: &Local,
    basis: Vec<Vec<i128>>,
    apply: impl Fn(&[i128]) -> Vec<i128>,
    conditions: &[(usize, u32)],
) -> Vec<Vec<i128>> {
    let mut b = basis;
    let mut images: Vec<Vec<i128>> = b
        .iter()
        .map(|x| apply(x).into_iter().map(|y| loc.red(y)).collect())
        .collect();
    for &(r, s) in conditions {
        if s == 0 {
            continue;
        }
        let qs = loc.pow_p(s);
        let vals: Vec<i128> = images.iter().map(|y| y[r].rem_euclid(qs)).collect();
        let mut best: Option<(usize, u32)> = None;
        for (i, v) in vals.iter().enumerate() {
            if *v == 0 {
                continue;
            }
            let t = Local::new(loc.p, s).val(*v);
            if best.is_none_or(|b| t < b.1) {
                best = Some((i, t));
            }
        }
        let Some((i0, t)) = best else { continue };
        let ls = Local::new(loc.p, s);
        let unit_inv = ls.inv(vals[i0] / loc.pow_p(t));
        for i in 0..b.len() {
            if i == i0 || vals[i] == 0 {
                continue;
            }
            let f = ls.red((vals[i] / loc.pow_p(t)) * unit_inv);
            let (bi0, yi0) = (b[i0].clone(), images[i0].clone());
            for (x, y) in b[i].iter_mut().zip(&bi0) {
                *x = loc.red(*x - f * y);
            }
            for (x, y) in images[i].iter_mut().zip(&yi0) {
                *x = loc.red(*x - f * y);
            }
        }
        let scale = loc.pow_p(s - t);
        for x in b[i0].iter_mut() {
            *x = loc.red(*x * scale);
        }
        for x in images[i0].iter_mut() {
            *x = loc.red(*x * scale);
        }
    }
    b
}

/// Unit vectors of `Z^n` as columns.
pub fn unit_basis(n: usize) -> Vec<Vec<i128>> {
    (0..n)
        .map(|i| {
            let mut v = vec![0; n];
            v[i] = 1;
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn indices() {
        let loc = Local::new(3, 2);
        assert_eq!(index_exp(&loc, 2, &[]), 4);
        assert_eq!(index_exp(&loc, 2, &unit_basis(2)), 0);
        assert_eq!(index_exp(&loc, 2, &[vec![3, 0], vec![0, 1]]), 1);
        assert_eq!(smith_valuations(&loc, 2, &[vec![3, 3], vec![0, 3]]), vec![1, 1]);
    }

    #[test]
    fn quotients() {
        let loc = Local::new(2, 3);
        // Z/8 / 2Z/8 = Z/2
        assert_eq!(quotient_structure(&loc, 1, &unit_basis(1), &[vec![2]]), vec![1]);
        // (Z/8)^2 / <(4,0),(0,2)> = Z/4 + Z/2
        assert_eq!(
            quotient_structure(&loc, 2, &unit_basis(2), &[vec![4, 0], vec![0, 2]]),
            vec![1, 2]
        );
        assert!(quotient_structure(&loc, 2, &unit_basis(2), &unit_basis(2)).is_empty());
    }

    #[test]
    fn preimage_of_multiplication() {
        // x -> 3x on Z/9: kernel mod 9 is 3Z/9
        let loc = Local::new(3, 2);
        let k = preimage(&loc, unit_basis(1), |x| vec![3 * x[0]], &[(0, 2)]);
        assert_eq!(quotient_structure(&loc, 1, &unit_basis(1), &k), vec![1]);
        assert_eq!(index_exp(&loc, 1, &k), 1);
    }
}
