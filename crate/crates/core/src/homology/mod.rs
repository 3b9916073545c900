//! Homology of bounded cochain complexes of finite abelian p-groups.
//!
//! A complex is presented by cyclic generators of orders `p^s` and integer matrices.
//! Cocycles are the lattice `{x : D x in R Z^n}` and coboundaries the image plus the
//! order relations; the quotient is read off from Smith forms over `Z/p^M`.

mod brute;
pub mod filtered;
pub mod local;
pub mod sequences;
mod snf;
mod subcomplex;

use std::fmt;

pub use brute::brute_force_homology;
pub use snf::{snf, IntMatrix, SmithForm};
pub use subcomplex::{
    block_presentation, drw_presentation, generator, generator_order, group_by_degree, weight_subcomplex, Block,
    Variant,
};

use crate::error::{Error, Result};
use local::{preimage, quotient_structure, unit_basis, Local};

/// A cochain complex `C^lo -> C^{lo+1} -> ...` of finite abelian p-groups.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComplexPresentation {
    pub p: u64,
    pub lo: i32,
    /// `orders[i][j] = s` when generator `j` of `C^{lo+i}` has order `p^s`.
    pub orders: Vec<Vec<u32>>,
    /// `maps[i]: C^{lo+i} -> C^{lo+i+1}`, with one row per target generator.
    pub maps: Vec<IntMatrix>,
}

/// Elementary divisors of each cohomology group.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct HomologyReport {
    pub p: u64,
    pub lo: i32,
    /// Ascending exponents `s` of the cyclic summands `Z/p^s` in each degree.
    pub divisors: Vec<Vec<u32>>,
    /// Free rank in each degree (always zero for finite groups).
    pub free_rank: Vec<usize>,
}

impl HomologyReport {
    pub fn is_zero(&self) -> bool {
        self.divisors.iter().all(|d| d.is_empty()) && self.free_rank.iter().all(|r| *r == 0)
    }

    /// Divisors of degree `deg`, empty outside the range.
    pub fn at(&self, deg: i32) -> &[u32] {
        let i = deg - self.lo;
        if i < 0 {
            return &[];
        }
        self.divisors.get(i as usize).map_or(&[], |v| v.as_slice())
    }

    /// `log_p` of the order of the group in degree `deg`.
    pub fn length(&self, deg: i32) -> u32 {
        self.at(deg).iter().sum()
    }

    /// The divisors as strings `p^s`.
    pub fn divisor_strings(&self) -> Vec<Vec<String>> {
        self.divisors
            .iter()
            .map(|d| d.iter().map(|s| format!("{}^{}", self.p, s)).collect())
            .collect()
    }

    /// Compares two reports degree by degree, ignoring trailing zero groups.
    pub fn same_groups(&self, other: &HomologyReport) -> bool {
        let lo = self.lo.min(other.lo);
        let hi = (self.lo + self.divisors.len() as i32).max(other.lo + other.divisors.len() as i32);
        (lo..hi).all(|d| self.at(d) == other.at(d))
    }
}

impl fmt::Display for HomologyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .divisor_strings()
            .iter()
            .enumerate()
            .map(|(i, d)| format!("H^{}=[{}]", self.lo + i as i32, d.join(",")))
            .collect();
        write!(f, "{}", parts.join(" "))
    }
}

impl ComplexPresentation {
    pub fn new(p: u64, lo: i32, orders: Vec<Vec<u32>>, maps: Vec<IntMatrix>) -> Result<Self> {
        let c = ComplexPresentation { p, lo, orders, maps };
        c.validate()?;
        Ok(c)
    }

    pub fn len(&self) -> usize {
        self.orders.len()
    }

    pub fn is_empty(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn rank(&self, i: usize) -> usize {
        self.orders.get(i).map_or(0, |o| o.len())
    }

    /// Largest generator order exponent (at least one).
    pub fn exponent(&self) -> u32 {
        self.orders.iter().flatten().copied().max().unwrap_or(1).max(1)
    }

    /// Shapes, well-definedness of every map and `d^2 = 0` modulo the orders.
    pub fn validate(&self) -> Result<()> {
        if self.maps.len() + 1 != self.orders.len().max(1) {
            return Err(Error::Shape(format!(
                "{} groups need {} maps, got {}",
                self.orders.len(),
                self.orders.len().saturating_sub(1),
                self.maps.len()
            )));
        }
        let pp = self.p as i128;
        for (i, m) in self.maps.iter().enumerate() {
            let (src, dst) = (&self.orders[i], &self.orders[i + 1]);
            if m.rows != dst.len() || m.cols != src.len() {
                return Err(Error::Shape(format!("map {i} has shape {}x{}", m.rows, m.cols)));
            }
            for r in 0..m.rows {
                for c in 0..m.cols {
                    // p^{s_c} * a must vanish modulo p^{s_r}
                    let a = m.get(r, c);
                    if src[c] < dst[r] && a % pp.pow(dst[r] - src[c]) != 0 {
                        return Err(Error::Malformed(format!(
                            "map {i} entry ({r},{c}) = {a} is not a homomorphism"
                        )));
                    }
                }
            }
        }
        for i in 0..self.maps.len().saturating_sub(1) {
            let prod = self.maps[i + 1].mul(&self.maps[i])?;
            for r in 0..prod.rows {
                let q = pp.pow(self.orders[i + 2][r]);
                if (0..prod.cols).any(|c| prod.get(r, c) % q != 0) {
                    return Err(Error::Malformed(format!("d^2 != 0 after degree {}", self.lo + i as i32)));
                }
            }
        }
        Ok(())
    }

    /// `maps[i] x` without reduction.
    pub fn apply(&self, i: usize, x: &[i128]) -> Vec<i128> {
        let m = &self.maps[i];
        (0..m.rows)
            .map(|r| m.row(r).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Cocycle lattice generators in degree index `i`.
    pub fn cocycles(&self, loc: &Local, i: usize) -> Vec<Vec<i128>> {
        let n = self.rank(i);
        if i >= self.maps.len() {
            return unit_basis(n);
        }
        let conds: Vec<(usize, u32)> = self.orders[i + 1].iter().copied().enumerate().collect();
        preimage(loc, unit_basis(n), |x| self.apply(i, x), &conds)
    }

    /// Coboundary lattice generators (image plus order relations) in degree index `i`.
    pub fn coboundaries(&self, loc: &Local, i: usize) -> Vec<Vec<i128>> {
        let n = self.rank(i);
        let mut gens: Vec<Vec<i128>> = self.orders[i]
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let mut v = vec![0; n];
                v[j] = loc.pow_p(*s);
                v
            })
            .collect();
        if i > 0 {
            let m = &self.maps[i - 1];
            gens.extend((0..m.cols).map(|c| m.column(c)));
        }
        gens
    }
}

/// Cohomology of a presented complex.
pub fn homology_of(c: &ComplexPresentation) -> Result<HomologyReport> {
    c.validate()?;
    let loc = Local::new(c.p, c.exponent());
    let divisors = (0..c.len())
        .map(|i| {
            let z = c.cocycles(&loc, i);
            let b = c.coboundaries(&loc, i);
            quotient_structure(&loc, c.rank(i), &z, &b)
        })
        .collect::<Vec<_>>();
    Ok(HomologyReport {
        p: c.p,
        lo: c.lo,
        free_rank: vec![0; divisors.len()],
        divisors,
    })
}

#[cfg(test)]
mod tests;
