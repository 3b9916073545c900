//! Homology by enumerating group elements, for small complexes.

use std::collections::HashSet;

use super::{ComplexPresentation, HomologyReport};
use crate::error::{Error, Result};

fn elements(p: u64, orders: &[u32]) -> Vec<Vec<i128>> {
    let mut out = vec![vec![]];
    for s in orders {
        let q = (p as i128).pow(*s);
        let mut next = Vec::with_capacity(out.len() * q as usize);
        for v in &out {
            for a in 0..q {
                let mut w = v.clone();
                w.push(a);
                next.push(w);
            }
        }
        out = next;
    }
    out
}

fn reduce(p: u64, orders: &[u32], x: Vec<i128>) -> Vec<i128> {
    x.into_iter()
        .zip(orders)
        .map(|(a, s)| a.rem_euclid((p as i128).pow(*s)))
        .collect()
}

/// Cohomology by listing cocycles and coboundaries; refuses groups larger than
/// `max_order` elements.
pub fn brute_force_homology(c: &ComplexPresentation, max_order: u64) -> Result<HomologyReport> {
    c.validate()?;
    let p = c.p;
    let mut divisors = Vec::new();
    for i in 0..c.len() {
        let size: u64 = c.orders[i].iter().map(|s| p.pow(*s)).product();
        if size > max_order {
            return Err(Error::OutOfRange(format!("group of order {size} is too large")));
        }
        let all = elements(p, &c.orders[i]);
        let kernel: Vec<Vec<i128>> = if i < c.maps.len() {
            all.into_iter()
                .filter(|x| reduce(p, &c.orders[i + 1], c.apply(i, x)).iter().all(|a| *a == 0))
                .collect()
        } else {
            all
        };
        let image: HashSet<Vec<i128>> = if i > 0 {
            let prev: u64 = c.orders[i - 1].iter().map(|s| p.pow(*s)).product();
            if prev > max_order {
                return Err(Error::OutOfRange(format!("group of order {prev} is too large")));
            }
            elements(p, &c.orders[i - 1])
                .iter()
                .map(|y| reduce(p, &c.orders[i], c.apply(i - 1, y)))
                .collect()
        } else {
            std::iter::once(vec![0; c.rank(i)]).collect()
        };
        // |p^j H| = |p^j K + B| / |B|
        let mut logs = Vec::new();
        let mut j = 0u32;
        loop {
            let pj = (p as i128).pow(j);
            let mut set: HashSet<Vec<i128>> = HashSet::new();
            for k in &kernel {
                let pk: Vec<i128> = k.iter().map(|a| a * pj).collect();
                for b in &image {
                    let s: Vec<i128> = pk.iter().zip(b).map(|(x, y)| x + y).collect();
                    set.insert(reduce(p, &c.orders[i], s));
                }
            }
            let ratio = set.len() / image.len();
            let mut l = 0u32;
            let mut r = ratio;
            while r > 1 {
                r /= p as usize;
                l += 1;
            }
            logs.push(l);
            if l == 0 {
                break;
            }
            j += 1;
        }
        logs.push(0);
        let mut d = Vec::new();
        for j in 0..logs.len() - 1 {
            let c_j = logs[j] - logs[j + 1];
            let c_next = if j + 2 < logs.len() {
                logs[j + 1] - logs[j + 2]
            } else {
                0
            };
            for _ in 0..(c_j - c_next) {
                d.push(j as u32 + 1);
            }
        }
        d.sort();
        divisors.push(d);
    }
    Ok(HomologyReport {
        p,
        lo: c.lo,
        free_rank: vec![0; divisors.len()],
        divisors,
    })
}
