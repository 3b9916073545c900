//! Smith normal form over the integers with unimodular certificates.

use crate::error::{Error, Result};

/// Dense integer matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<i128>,
}

fn overflow() -> Error {
    Error::Precision { level: 0 }
}

fn add(a: i128, b: i128) -> Result<i128> {
    a.checked_add(b).ok_or_else(overflow)
}

fn mul(a: i128, b: i128) -> Result<i128> {
    a.checked_mul(b).ok_or_else(overflow)
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<i128>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, x) in row.iter().enumerate() {
                m.set(i, j, *x);
            }
        }
        m
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> i128 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: i128) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[i128] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<i128> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| *x == 0)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.set(j, i, self.get(i, j));
            }
        }
        t
    }

    pub fn mul(&self, other: &IntMatrix) -> Result<IntMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a == 0 {
                    continue;
                }
                for j in 0..other.cols {
                    let v = add(out.get(i, j), mul(a, other.get(k, j))?)?;
                    out.set(i, j, v);
                }
            }
        }
        Ok(out)
    }

    /// `row_a += c * row_b`.
    fn row_axpy(&mut self, a: usize, b: usize, c: i128) -> Result<()> {
        for j in 0..self.cols {
            let v = add(self.get(a, j), mul(c, self.get(b, j))?)?;
            self.set(a, j, v);
        }
        Ok(())
    }

    fn col_axpy(&mut self, a: usize, b: usize, c: i128) -> Result<()> {
        for i in 0..self.rows {
            let v = add(self.get(i, a), mul(c, self.get(i, b))?)?;
            self.set(i, a, v);
        }
        Ok(())
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    fn neg_row(&mut self, a: usize) {
        for j in 0..self.cols {
            self.data[a * self.cols + j] = -self.data[a * self.cols + j];
        }
    }

    /// Determinant by fraction-free elimination (Bareiss).
    pub fn det(&self) -> Result<i128> {
        if self.rows != self.cols {
            return Err(Error::Shape("determinant of a non-square matrix".into()));
        }
        let n = self.rows;
        if n == 0 {
            return Ok(1);
        }
        let mut a = self.clone();
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if a.get(k, k) == 0 {
                match (k + 1..n).find(|i| a.get(*i, k) != 0) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Ok(0),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = mul(a.get(i, j), a.get(k, k))? - mul(a.get(i, k), a.get(k, j))?;
                    a.set(i, j, v / prev);
                }
            }
            prev = a.get(k, k);
        }
        Ok(sign * a.get(n - 1, n - 1))
    }
}

/// `U * M * V = D` with `D` diagonal, `d_1 | d_2 | ...`, and `U`, `V` unimodular.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmithForm {
    /// Nonzero invariant factors, positive and in divisibility order.
    pub invariants: Vec<i128>,
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub u_inv: IntMatrix,
    pub v: IntMatrix,
}

impl SmithForm {
    /// Re-multiplies the certificates and checks every claim.
    pub fn verify(&self, m: &IntMatrix) -> Result<bool> {
        let lhs = self.u.mul(m)?.mul(&self.v)?;
        if lhs != self.d {
            return Ok(false);
        }
        if self.u.mul(&self.u_inv)? != IntMatrix::identity(self.u.rows) {
            return Ok(false);
        }
        let du = self.u.det()?;
        let dv = self.v.det()?;
        if du.abs() != 1 || dv.abs() != 1 {
            return Ok(false);
        }
        for (i, w) in self.invariants.windows(2).enumerate() {
            if w[1] % w[0] != 0 || self.d.get(i, i) != w[0] {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Smith normal form with certificates; fails only on `i128` overflow.
pub fn snf(m: &IntMatrix) -> Result<SmithForm> {
    let (r, c) = (m.rows, m.cols);
    let mut a = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut u_inv = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut t = 0;
    while t < r.min(c) {
        // pivot: smallest nonzero absolute value in the trailing block
        let mut best: Option<(usize, usize)> = None;
        for i in t..r {
            for j in t..c {
                let x = a.get(i, j);
                if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a.get(bi, bj).abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap_rows(t, pi);
        u.swap_rows(t, pi);
        u_inv.swap_cols(t, pi);
        a.swap_cols(t, pj);
        v.swap_cols(t, pj);
        loop {
            let mut done = true;
            let piv = a.get(t, t);
            for i in t + 1..r {
                let q = a.get(i, t).div_euclid(piv);
                if q != 0 {
                    a.row_axpy(i, t, -q)?;
                    u.row_axpy(i, t, -q)?;
                    u_inv.col_axpy(t, i, q)?;
                }
                if a.get(i, t) != 0 {
                    done = false;
                }
            }
            for j in t + 1..c {
                let q = a.get(t, j).div_euclid(piv);
                if q != 0 {
                    a.col_axpy(j, t, -q)?;
                    v.col_axpy(j, t, -q)?;
                }
                if a.get(t, j) != 0 {
                    done = false;
                }
            }
            if done {
                // divisibility of the trailing block
                let bad = (t + 1..r)
                    .flat_map(|i| (t + 1..c).map(move |j| (i, j)))
                    .find(|(i, j)| a.get(*i, *j) % piv != 0);
                match bad {
                    Some((i, _)) => {
                        a.row_axpy(t, i, 1)?;
                        u.row_axpy(t, i, 1)?;
                        u_inv.col_axpy(i, t, -1)?;
                        continue;
                    }
                    None => break,
                }
            }
            // move the smallest remaining entry of row/column t to the pivot
            let mut best = (t, t);
            for i in t..r {
                let x = a.get(i, t);
                if x != 0 && x.abs() < a.get(best.0, best.1).abs() {
                    best = (i, t);
                }
            }
            for j in t..c {
                let x = a.get(t, j);
                if x != 0 && x.abs() < a.get(best.0, best.1).abs() {
                    best = (t, j);
                }
            }
            if best.0 != t {
                a.swap_rows(t, best.0);
                u.swap_rows(t, best.0);
                u_inv.swap_cols(t, best.0);
            }
            if best.1 != t {
                a.swap_cols(t, best.1);
                v.swap_cols(t, best.1);
            }
        }
        if a.get(t, t) < 0 {
            a.neg_row(t);
            u.neg_row(t);
            for i in 0..r {
                let x = u_inv.get(i, t);
                u_inv.set(i, t, -x);
            }
        }
        t += 1;
    }
    let invariants = (0..r.min(c)).map(|i| a.get(i, i)).filter(|x| *x != 0).collect();
    Ok(SmithForm {
        invariants,
        d: a,
        u,
        u_inv,
        v,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn gcd(a: i128, b: i128) -> i128 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    #[test]
    fn examples() {
        let s = snf(&IntMatrix::from_rows(&[vec![2, 0], vec![0, 3]])).unwrap();
        assert_eq!(s.invariants, vec![1, 6]);
        let s = snf(&IntMatrix::zeros(2, 3)).unwrap();
        assert!(s.invariants.is_empty());
        let s = snf(&IntMatrix::from_rows(&[vec![3, 3], vec![0, 3]])).unwrap();
        assert_eq!(s.invariants, vec![3, 3]);
        let m = IntMatrix::from_rows(&[vec![3, 3], vec![0, 3]]);
        assert!(s.verify(&m).unwrap());
    }

    #[test]
    fn random_matrices_match_minor_gcds() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..300 {
            let r = rng.gen_range(1..5);
            let c = rng.gen_range(1..5);
            let rows: Vec<Vec<i128>> = (0..r)
                .map(|_| (0..c).map(|_| rng.gen_range(-9..10)).collect())
                .collect();
            let m = IntMatrix::from_rows(&rows);
            let s = snf(&m).unwrap();
            assert!(s.verify(&m).unwrap(), "{m:?}");
            // d_1 is the gcd of all entries
            let g = m.data.iter().fold(0, |g, x| gcd(g, *x));
            assert_eq!(s.invariants.first().copied().unwrap_or(0), g);
            // product of invariants is the gcd of maximal minors for square matrices
            if r == c {
                let det = m.det().unwrap().abs();
                let prod: i128 = if s.invariants.len() == r {
                    s.invariants.iter().product()
                } else {
                    0
                };
                assert_eq!(prod, det);
            }
        }
    }
}
