//! Spectral sequence of a complex with an increasing filtration by generator labels.
//!
//! Generator `t` of `C^h` lies in `P_k` for every `k >= filt[h][t]`, and `D` is
//! assumed to preserve each `P_k`. Pages are computed from
//! `E_r^k = Z_r^k / (Z_{r-1}^{k-1} + D Z_{r-1}^{k+r-1})` with
//! `Z_r^k = {x in P_k : Dx in P_{k-r}}`.

use std::collections::BTreeMap;

use super::local::{preimage, quotient_structure, Local};
use super::{ComplexPresentation, IntMatrix};
use crate::error::{Error, Result};

fn check(c: &ComplexPresentation, filt: &[Vec<i32>]) -> Result<()> {
    if filt.len() != c.len() || filt.iter().zip(&c.orders).any(|(f, o)| f.len() != o.len()) {
        return Err(Error::Shape("filtration labels do not match the complex".into()));
    }
    for (i, m) in c.maps.iter().enumerate() {
        for r in 0..m.rows {
            for col in 0..m.cols {
                let a = m.get(r, col);
                if a != 0 && filt[i + 1][r] > filt[i][col] && a % (c.p as i128).pow(c.orders[i + 1][r]) != 0 {
                    return Err(Error::Malformed(format!(
                        "differential raises the filtration at degree {}",
                        c.lo + i as i32
                    )));
                }
            }
        }
    }
    Ok(())
}

fn relations(loc: &Local, orders: &[u32]) -> Vec<Vec<i128>> {
    let n = orders.len();
    orders
        .iter()
        .enumerate()
        .map(|(t, s)| {
            let mut v = vec![0; n];
            v[t] = loc.pow_p(*s);
            v
        })
        .collect()
}

/// Generators of `P_k C^i` including the order relations.
fn p_lattice(loc: &Local, c: &ComplexPresentation, filt: &[Vec<i32>], i: usize, k: i64) -> Vec<Vec<i128>> {
    let n = c.rank(i);
    let mut gens = relations(loc, &c.orders[i]);
    for t in 0..n {
        if (filt[i][t] as i64) <= k {
            let mut v = vec![0; n];
            v[t] = 1;
            gens.push(v);
        }
    }
    gens
}

/// `Z_r^k` in degree index `i`.
fn z_lattice(loc: &Local, c: &ComplexPresentation, filt: &[Vec<i32>], i: usize, k: i64, r: i64) -> Vec<Vec<i128>> {
    let base = p_lattice(loc, c, filt, i, k);
    if i + 1 >= c.len() {
        return base;
    }
    let conds: Vec<(usize, u32)> = (0..c.rank(i + 1))
        .filter(|t| (filt[i + 1][*t] as i64) > k - r)
        .map(|t| (t, c.orders[i + 1][t]))
        .collect();
    let mut z = preimage(loc, base, |x| c.apply(i, x), &conds);
    z.extend(relations(loc, &c.orders[i]));
    z
}

/// The page `E_r` (`r >= 1`) as a map `(k, h) -> divisors`, zero entries omitted.
pub fn filtered_page(c: &ComplexPresentation, filt: &[Vec<i32>], r: u32) -> Result<BTreeMap<(i32, i32), Vec<u32>>> {
    c.validate()?;
    check(c, filt)?;
    if r == 0 {
        return Err(Error::OutOfRange("pages start at r = 1".into()));
    }
    let loc = Local::new(c.p, c.exponent());
    let r = r as i64;
    let mut out = BTreeMap::new();
    let labels: Vec<i32> = filt.iter().flatten().copied().collect();
    let (Some(lo), Some(hi)) = (labels.iter().min(), labels.iter().max()) else {
        return Ok(out);
    };
    for i in 0..c.len() {
        for k in *lo..=*hi {
            let k64 = k as i64;
            let a = z_lattice(&loc, c, filt, i, k64, r);
            let mut b = z_lattice(&loc, c, filt, i, k64 - 1, r - 1);
            if i > 0 {
                let prev = z_lattice(&loc, c, filt, i - 1, k64 + r - 1, r - 1);
                b.extend(prev.iter().map(|x| c.apply(i - 1, x)));
            }
            let d = quotient_structure(&loc, c.rank(i), &a, &b);
            if !d.is_empty() {
                out.insert((k, c.lo + i as i32), d);
            }
        }
    }
    Ok(out)
}

/// The page at which the spectral sequence has certainly degenerated.
pub fn limit_page(filt: &[Vec<i32>]) -> u32 {
    let labels: Vec<i32> = filt.iter().flatten().copied().collect();
    match (labels.iter().min(), labels.iter().max()) {
        (Some(a), Some(b)) => (b - a + 2) as u32,
        _ => 1,
    }
}

/// Indices of the generators of each degree with label `k`.
fn select(filt: &[Vec<i32>], k: i32) -> Vec<Vec<usize>> {
    filt.iter()
        .map(|f| (0..f.len()).filter(|t| f[*t] == k).collect())
        .collect()
}

/// The graded piece `Gr_k C = P_k / P_{k-1}`.
pub fn graded_piece(c: &ComplexPresentation, filt: &[Vec<i32>], k: i32) -> Result<ComplexPresentation> {
    check(c, filt)?;
    let sel = select(filt, k);
    let orders = sel
        .iter()
        .enumerate()
        .map(|(i, s)| s.iter().map(|t| c.orders[i][*t]).collect())
        .collect();
    let maps = (0..c.maps.len())
        .map(|i| submatrix(&c.maps[i], &sel[i + 1], &sel[i]))
        .collect();
    ComplexPresentation::new(c.p, c.lo, orders, maps)
}

/// The component of `maps[i]` from label `from` to label `to`.
pub fn filtration_component(c: &ComplexPresentation, filt: &[Vec<i32>], i: usize, from: i32, to: i32) -> IntMatrix {
    let rows: Vec<usize> = (0..c.rank(i + 1)).filter(|t| filt[i + 1][*t] == to).collect();
    let cols: Vec<usize> = (0..c.rank(i)).filter(|t| filt[i][*t] == from).collect();
    submatrix(&c.maps[i], &rows, &cols)
}

fn submatrix(m: &IntMatrix, rows: &[usize], cols: &[usize]) -> IntMatrix {
    let mut out = IntMatrix::zeros(rows.len(), cols.len());
    for (a, r) in rows.iter().enumerate() {
        for (b, col) in cols.iter().enumerate() {
            out.set(a, b, m.get(*r, *col));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homology::homology_of;

    #[test]
    fn two_step_filtration() {
        // Z/p -> Z/p identity, source in P_1, target in P_0: E_1 lives in both
        // labels and is killed on E_2.
        let c = ComplexPresentation::new(3, 0, vec![vec![1], vec![1]], vec![IntMatrix::from_rows(&[vec![1]])]).unwrap();
        let filt = vec![vec![1], vec![0]];
        let e1 = filtered_page(&c, &filt, 1).unwrap();
        assert_eq!(e1.get(&(1, 0)), Some(&vec![1]));
        assert_eq!(e1.get(&(0, 1)), Some(&vec![1]));
        assert!(filtered_page(&c, &filt, 2).unwrap().is_empty());
        // same labels: acyclic already on E_1
        assert!(filtered_page(&c, &[vec![0], vec![0]], 1).unwrap().is_empty());
    }

    #[test]
    fn e1_is_homology_of_graded_pieces_and_limit_is_homology() {
        // Z/p^2 --p--> Z/p^2 with an extra summand; labels in {0, 1}
        let c = ComplexPresentation::new(
            2,
            0,
            vec![vec![2, 1], vec![2, 1]],
            vec![IntMatrix::from_rows(&[vec![2, 0], vec![1, 1]])],
        )
        .unwrap();
        let filt = vec![vec![1, 0], vec![1, 0]];
        let e1 = filtered_page(&c, &filt, 1).unwrap();
        for k in 0..=1 {
            let h = homology_of(&graded_piece(&c, &filt, k).unwrap()).unwrap();
            for deg in 0..=1 {
                assert_eq!(e1.get(&(k, deg)).cloned().unwrap_or_default(), h.at(deg).to_vec());
            }
        }
        let einf = filtered_page(&c, &filt, limit_page(&filt)).unwrap();
        let total = homology_of(&c).unwrap();
        for deg in 0..=1 {
            let len: u32 = einf.iter().filter(|((_, h), _)| *h == deg).map(|(_, d)| d.iter().sum::<u32>()).sum();
            assert_eq!(len, total.length(deg));
        }
    }
}
