//! Local models, weights and partitions of their supports.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_rational::Rational64;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Base of the log structure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Base {
    /// Trivial log structure on the base.
    Absolute,
    /// Standard log point; only meaningful for semistable models.
    LogPoint,
}

/// `Spec F_p[T_1..T_n]/(T_1...T_d)` with log structure `N^e + N^f`.
///
/// `d = 0` is the polynomial model. Positions are 0-based internally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalModel {
    pub p: u64,
    pub n: usize,
    pub e: usize,
    pub f: usize,
    pub d: usize,
    pub base: Base,
}

impl LocalModel {
    pub fn poly(p: u64, n: usize, e: usize, f: usize) -> Result<Self> {
        Self::new(p, n, e, f, 0, Base::Absolute)
    }

    pub fn semistable(p: u64, n: usize, e: usize, f: usize, d: usize) -> Result<Self> {
        Self::new(p, n, e, f, d, Base::LogPoint)
    }

    pub fn new(p: u64, n: usize, e: usize, f: usize, d: usize, base: Base) -> Result<Self> {
        let m = LocalModel { p, n, e, f, d, base };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |s: &str| Err(Error::UnsupportedModel(s.to_string()));
        if self.p < 2 || (2..self.p).any(|q| q * q <= self.p && self.p.is_multiple_of(q)) {
            return bad("p must be prime");
        }
        if self.e > self.n {
            return bad("need e <= n");
        }
        if self.d > self.e {
            return bad("need d <= e");
        }
        if self.n + self.f > 60 {
            return bad("too many generators");
        }
        if self.base == Base::LogPoint && self.d == 0 {
            return bad("log-point base needs d >= 1");
        }
        Ok(())
    }

    pub fn is_semistable(&self) -> bool {
        self.d >= 1
    }

    /// The same model over the trivial base.
    pub fn absolute(&self) -> Self {
        LocalModel {
            base: Base::Absolute,
            ..*self
        }
    }

    /// Number of exterior generators (`dlog c_j` first, then one per variable).
    pub fn generators(&self) -> usize {
        self.f + self.n
    }

    /// Exterior generator index of variable `i`.
    pub fn var_gen(&self, i: usize) -> usize {
        self.f + i
    }
}

impl fmt::Display for LocalModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.d == 0 {
            write!(f, "poly:p={},n={},e={},f={}", self.p, self.n, self.e, self.f)
        } else {
            write!(
                f,
                "semistable:p={},n={},e={},f={},d={}",
                self.p, self.n, self.e, self.f, self.d
            )?;
            if self.base == Base::Absolute {
                write!(f, ",base=absolute")?;
            }
            Ok(())
        }
    }
}

impl FromStr for LocalModel {
    type Err = Error;

    /// Parses `poly:p=3,n=2,e=1,f=0` or `semistable:p=3,n=2,e=2,f=0,d=2`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = |m: String| Error::Malformed(m);
        let (kind, rest) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| bad(format!("model descriptor `{s}` lacks a kind")))?;
        let (mut p, mut n, mut e, mut f, mut d) = (None, None, None, None, None);
        let mut base = None;
        for part in rest.split(',').filter(|x| !x.trim().is_empty()) {
            let (key, val) = part
                .split_once('=')
                .ok_or_else(|| bad(format!("expected key=value, got `{part}`")))?;
            let key = key.trim();
            let val = val.trim();
            if key == "base" {
                base = Some(match val {
                    "absolute" => Base::Absolute,
                    "log-point" | "logpoint" => Base::LogPoint,
                    _ => return Err(bad(format!("unknown base `{val}`"))),
                });
                continue;
            }
            let v: u64 = val
                .parse()
                .map_err(|_| bad(format!("`{val}` is not a nonnegative integer")))?;
            let slot = match key {
                "p" => &mut p,
                "n" => &mut n,
                "e" => &mut e,
                "f" => &mut f,
                "d" => &mut d,
                _ => return Err(bad(format!("unknown key `{key}`"))),
            };
            if slot.replace(v).is_some() {
                return Err(bad(format!("duplicate key `{key}`")));
            }
        }
        let need = |x: Option<u64>, k: &str| x.ok_or_else(|| bad(format!("missing `{k}`")));
        let p = need(p, "p")?;
        let n = need(n, "n")? as usize;
        let e = need(e, "e")? as usize;
        let f = f.unwrap_or(0) as usize;
        match kind.trim() {
            "poly" => {
                if d.is_some_and(|d| d != 0) {
                    return Err(bad("poly models take no relation".into()));
                }
                LocalModel::new(p, n, e, f, 0, Base::Absolute)
            }
            "semistable" => {
                let d = need(d, "d")? as usize;
                LocalModel::new(p, n, e, f, d, base.unwrap_or(Base::LogPoint))
            }
            other => Err(bad(format!("unknown model kind `{other}`"))),
        }
    }
}

/// One coordinate of a weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Entry {
    /// The pole marker `p^{-inf}`.
    Pole,
    /// A nonnegative rational with p-power denominator.
    Val(Rational64),
}

impl Entry {
    pub fn int(v: i64) -> Self {
        Entry::Val(Rational64::from_integer(v))
    }

    pub fn frac(num: i64, p: u64, t: u32) -> Self {
        Entry::Val(Rational64::new(num, (p as i64).pow(t)))
    }

    pub fn is_pole(&self) -> bool {
        matches!(self, Entry::Pole)
    }

    /// Value with poles read as zero.
    pub fn plus(&self) -> Rational64 {
        match self {
            Entry::Pole => Rational64::zero(),
            Entry::Val(v) => *v,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Entry::Val(v) if v.is_zero())
    }
}

/// p-adic valuation of a nonzero rational.
pub fn ord_rat(p: u64, r: &Rational64) -> i64 {
    debug_assert!(!r.is_zero());
    let p = p as i64;
    let mut v = 0;
    let (mut a, mut b) = (*r.numer(), *r.denom());
    while a % p == 0 {
        a /= p;
        v += 1;
    }
    while b % p == 0 {
        b /= p;
        v -= 1;
    }
    v
}

/// A weight `k`: one entry per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Vec<Entry>);

impl Weight {
    pub fn zero(n: usize) -> Self {
        Weight(vec![Entry::int(0); n])
    }

    pub fn from_ints(v: &[i64]) -> Self {
        Weight(v.iter().map(|x| Entry::int(*x)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> &[Entry] {
        &self.0
    }

    /// Checks the entries against a model.
    pub fn validate(&self, model: &LocalModel) -> Result<()> {
        if self.0.len() != model.n {
            return Err(Error::InvalidWeight(format!(
                "expected {} entries, got {}",
                model.n,
                self.0.len()
            )));
        }
        for (i, x) in self.0.iter().enumerate() {
            match x {
                Entry::Pole if i >= model.e => {
                    return Err(Error::InvalidWeight(format!(
                        "pole at non-log position {}",
                        i + 1
                    )))
                }
                Entry::Pole => {}
                Entry::Val(v) => {
                    if *v < Rational64::zero() {
                        return Err(Error::InvalidWeight("negative entry".into()));
                    }
                    let mut den = *v.denom();
                    while den % model.p as i64 == 0 {
                        den /= model.p as i64;
                    }
                    if den != 1 {
                        return Err(Error::InvalidWeight(format!(
                            "denominator of {v} is not a power of {}",
                            model.p
                        )));
                    }
                }
            }
        }
        if model.is_semistable() && (0..model.d).all(|i| !self.0[i].plus().is_zero()) {
            return Err(Error::InvalidWeight(
                "support of k+ contains all of [1,d]".into(),
            ));
        }
        Ok(())
    }

    /// `k+`: poles read as zero.
    pub fn k_plus(&self) -> Weight {
        Weight(self.0.iter().map(|x| Entry::Val(x.plus())).collect())
    }

    pub fn plus_values(&self) -> Vec<Rational64> {
        self.0.iter().map(|x| x.plus()).collect()
    }

    pub fn poles(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|i| self.0[*i].is_pole()).collect()
    }

    /// Positions where `k+` is nonzero.
    pub fn support_plus(&self) -> Vec<usize> {
        (0..self.0.len())
            .filter(|i| !self.0[*i].plus().is_zero())
            .collect()
    }

    /// Positions where `k+` vanishes (including poles).
    pub fn zeros_plus(&self) -> Vec<usize> {
        (0..self.0.len())
            .filter(|i| self.0[*i].plus().is_zero())
            .collect()
    }

    /// `Supp k`: poles and nonzero entries.
    pub fn support(&self) -> Vec<usize> {
        (0..self.0.len()).filter(|i| !self.0[*i].is_zero()).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.0.iter().all(|x| x.plus().is_integer())
    }

    /// `u(k)`: least `s >= 0` with `p^s k+` integral.
    pub fn u_of(&self, p: u64) -> u32 {
        self.0
            .iter()
            .filter(|x| !x.plus().is_zero())
            .map(|x| (-ord_rat(p, &x.plus())).max(0) as u32)
            .max()
            .unwrap_or(0)
    }

    /// Multiplies by `p^s` (`s` may be negative); poles are fixed.
    pub fn scale_p(&self, p: u64, s: i32) -> Weight {
        let f = if s >= 0 {
            Rational64::from_integer((p as i64).pow(s as u32))
        } else {
            Rational64::new(1, (p as i64).pow((-s) as u32))
        };
        Weight(
            self.0
                .iter()
                .map(|x| match x {
                    Entry::Pole => Entry::Pole,
                    Entry::Val(v) => Entry::Val(v * f),
                })
                .collect(),
        )
    }

    /// Whether `p^s k+` is integral.
    pub fn integral_after(&self, p: u64, s: u32) -> bool {
        self.u_of(p) <= s
    }

    /// `|k+|`, the sum of the pole-free entries.
    pub fn abs_plus(&self) -> Rational64 {
        self.0.iter().map(|x| x.plus()).sum()
    }

    /// Sort key of a position in the canonical order: `ord_p`, then index.
    fn order_key(&self, p: u64, i: usize) -> (i64, usize) {
        match &self.0[i] {
            Entry::Pole => (i64::MIN, i),
            Entry::Val(v) => (ord_rat(p, v), i),
        }
    }

    /// `Supp k` sorted by `ord_p` ascending (poles first), ties by index.
    pub fn canonical_order(&self, p: u64) -> Vec<usize> {
        let mut s = self.support();
        s.sort_by_key(|i| self.order_key(p, *i));
        s
    }

    /// Compares two positions of the support in the canonical order.
    pub fn cmp_positions(&self, p: u64, a: usize, b: usize) -> Ordering {
        self.order_key(p, a).cmp(&self.order_key(p, b))
    }

    /// Ordered support of `k+`.
    pub fn ordered_plus_support(&self, p: u64) -> Vec<usize> {
        self.canonical_order(p)
            .into_iter()
            .filter(|i| !self.0[*i].is_pole())
            .collect()
    }

    /// `t(I) = -ord_p` of the first element of `I` in the canonical order.
    pub fn t_of(&self, p: u64, interval: &[usize]) -> Result<i64> {
        let first = interval
            .iter()
            .min_by(|a, b| self.cmp_positions(p, **a, **b))
            .ok_or_else(|| Error::InvalidPartition("empty interval".into()))?;
        match &self.0[*first] {
            Entry::Pole => Err(Error::InvalidPartition("interval contains a pole".into())),
            Entry::Val(v) if v.is_zero() => Err(Error::InvalidPartition(
                "interval leaves the support".into(),
            )),
            Entry::Val(v) => Ok(-ord_rat(p, v)),
        }
    }

    /// Removes positions (used for strata and restrictions).
    pub fn drop_positions(&self, drop: &[usize]) -> Weight {
        Weight(
            self.0
                .iter()
                .enumerate()
                .filter(|(i, _)| !drop.contains(i))
                .map(|(_, x)| *x)
                .collect(),
        )
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|x| match x {
                Entry::Pole => "-inf".to_string(),
                Entry::Val(v) => v.to_string(),
            })
            .collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// A partition `(I_{-inf}, I_0, I_1, .., I_l)` of `Supp k`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Partition {
    pub minus_inf: Vec<usize>,
    pub i0: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

impl Partition {
    /// Number of nonempty intervals after `I_0`.
    pub fn l(&self) -> usize {
        self.blocks.len()
    }

    /// Builds the partition of `k` whose blocks `I_1..I_l` start at the positions
    /// `starts` (sorted in the canonical order); everything before the first start is
    /// `I_0`.
    pub fn from_starts(k: &Weight, p: u64, starts: &[usize]) -> Result<Self> {
        let ord = k.ordered_plus_support(p);
        let mut idx: Vec<usize> = starts
            .iter()
            .map(|s| {
                ord.iter()
                    .position(|x| x == s)
                    .ok_or_else(|| Error::InvalidPartition(format!("{} not in support", s + 1)))
            })
            .collect::<Result<_>>()?;
        idx.sort();
        idx.dedup();
        if idx.len() != starts.len() {
            return Err(Error::InvalidPartition("repeated start".into()));
        }
        let mut blocks = Vec::new();
        for (j, &st) in idx.iter().enumerate() {
            let end = idx.get(j + 1).copied().unwrap_or(ord.len());
            blocks.push(ord[st..end].to_vec());
        }
        let head = idx.first().copied().unwrap_or(ord.len());
        Ok(Partition {
            minus_inf: k.poles(),
            i0: ord[..head].to_vec(),
            blocks,
        })
    }

    /// First element of each block `I_1..I_l`.
    pub fn starts(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b[0]).collect()
    }
}

/// Checks the partition invariants for `k`.
pub fn validate_partition(k: &Weight, p: u64, part: &Partition) -> bool {
    if part.minus_inf != k.poles() {
        return false;
    }
    if part.blocks.iter().any(|b| b.is_empty()) {
        return false;
    }
    let mut flat: Vec<usize> = part.i0.clone();
    for b in &part.blocks {
        flat.extend(b);
    }
    flat == k.ordered_plus_support(p)
}

/// All partitions of `Supp k`, duplicate-free, ordered by block starts.
pub fn enumerate_partitions(k: &Weight, p: u64) -> Vec<Partition> {
    let ord = k.ordered_plus_support(p);
    let r = ord.len();
    let mut out = Vec::with_capacity(1 << r);
    for mask in 0u64..(1u64 << r) {
        let starts: Vec<usize> = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| ord[i]).collect();
        out.push(Partition::from_starts(k, p, &starts).expect("starts lie in the support"));
    }
    out.sort_by_key(|pt| (pt.l(), pt.starts().iter().map(|s| ord.iter().position(|x| x == s).unwrap()).collect::<Vec<_>>()));
    out
}

/// Nonnegative values `a/p^t` with `a <= max_num` and `t <= max_den`, deduplicated.
pub fn grid_values(p: u64, max_num: u64, max_den: u32) -> Vec<Rational64> {
    let mut vals = Vec::new();
    for t in 0..=max_den {
        for a in 0..=max_num {
            vals.push(Rational64::new(a as i64, (p as i64).pow(t)));
        }
    }
    vals.sort();
    vals.dedup();
    vals
}

/// Every valid weight of the model with entries from [`grid_values`] (plus poles at
/// log positions).
pub fn weight_grid(model: &LocalModel, max_num: u64, max_den: u32) -> Vec<Weight> {
    let vals = grid_values(model.p, max_num, max_den);
    let mut out = vec![Vec::<Entry>::new()];
    for i in 0..model.n {
        let mut opts: Vec<Entry> = vals.iter().map(|v| Entry::Val(*v)).collect();
        if i < model.e {
            opts.push(Entry::Pole);
        }
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for w in &out {
            for o in &opts {
                let mut w2 = w.clone();
                w2.push(*o);
                next.push(w2);
            }
        }
        out = next;
    }
    out.into_iter()
        .map(Weight)
        .filter(|w| w.validate(model).is_ok())
        .collect()
}

/// Pole-free weights of the grid (the `k+` classes).
pub fn plus_weight_grid(model: &LocalModel, max_num: u64, max_den: u32) -> Vec<Weight> {
    weight_grid(model, max_num, max_den)
        .into_iter()
        .filter(|w| w.poles().is_empty())
        .collect()
}

/// Integer `p^s` as a rational, for `s` possibly negative.
pub fn p_pow(p: u64, s: i64) -> Rational64 {
    if s >= 0 {
        Rational64::from_integer((p as i64).pow(s as u32))
    } else {
        Rational64::new(1, (p as i64).pow((-s) as u32))
    }
}

/// Whether `r` is a nonnegative integer.
pub fn is_nat(r: &Rational64) -> bool {
    r.is_integer() && *r >= Rational64::zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_parsing() {
        let m: LocalModel = "poly:p=3,n=2,e=1,f=0".parse().unwrap();
        assert_eq!(m, LocalModel::poly(3, 2, 1, 0).unwrap());
        let s: LocalModel = "semistable:p=3,n=2,e=2,f=0,d=2".parse().unwrap();
        assert_eq!(s.base, Base::LogPoint);
        assert_eq!(s.to_string().parse::<LocalModel>().unwrap(), s);
        assert!("poly:p=4,n=1,e=0".parse::<LocalModel>().is_err());
        assert!("poly:p=3,n=1,e=2".parse::<LocalModel>().is_err());
        assert!("semistable:p=3,n=2,e=2".parse::<LocalModel>().is_err());
        assert!("cone:p=3".parse::<LocalModel>().is_err());
    }

    #[test]
    fn canonical_order_examples() {
        let p = 3;
        let k = Weight(vec![Entry::frac(1, p, 1), Entry::int(2), Entry::Pole]);
        assert_eq!(k.canonical_order(p), vec![2, 0, 1]);
        assert!(Weight::zero(2).canonical_order(p).is_empty());
        assert_eq!(Weight::from_ints(&[1, 1]).canonical_order(p), vec![0, 1]);
    }

    #[test]
    fn u_and_plus() {
        let p = 3;
        let k = Weight(vec![Entry::frac(1, p, 2), Entry::int(3)]);
        assert_eq!(k.u_of(p), 2);
        assert_eq!(Weight::from_ints(&[4, 0]).u_of(p), 0);
        let k = Weight(vec![Entry::Pole, Entry::frac(1, p, 1)]);
        assert_eq!(k.k_plus(), Weight(vec![Entry::int(0), Entry::frac(1, p, 1)]));
        assert_eq!(k.u_of(p), 1);
        assert_eq!(k.t_of(p, &[1]).unwrap(), 1);
        assert!(k.t_of(p, &[]).is_err());
    }

    #[test]
    fn partition_counts() {
        let p = 2;
        assert_eq!(enumerate_partitions(&Weight::zero(2), p).len(), 1);
        let one = enumerate_partitions(&Weight::from_ints(&[1, 0]), p);
        assert_eq!(one.len(), 2);
        assert_eq!(one[0].i0, vec![0]);
        assert_eq!(one[1].blocks, vec![vec![0]]);
        assert_eq!(enumerate_partitions(&Weight::from_ints(&[1, 3]), p).len(), 4);
        let k = Weight(vec![Entry::frac(1, p, 1), Entry::int(2), Entry::int(1)]);
        for pt in enumerate_partitions(&k, p) {
            assert!(validate_partition(&k, p, &pt));
            if pt.blocks.len() >= 2 {
                let mut bad = pt.clone();
                bad.blocks.swap(0, 1);
                assert!(!validate_partition(&k, p, &bad));
            }
        }
    }

    #[test]
    fn weight_validation() {
        let m = LocalModel::semistable(2, 3, 2, 0, 2).unwrap();
        assert!(Weight::from_ints(&[1, 1, 0]).validate(&m).is_err());
        assert!(Weight(vec![Entry::Pole, Entry::int(1), Entry::int(0)]).validate(&m).is_ok());
        assert!(Weight(vec![Entry::int(0), Entry::int(1), Entry::Pole]).validate(&m).is_err());
        assert!(Weight(vec![Entry::frac(1, 3, 1), Entry::int(0), Entry::int(0)]).validate(&m).is_err());
    }

    #[test]
    fn grid_is_valid() {
        let m = LocalModel::semistable(2, 2, 2, 0, 2).unwrap();
        let g = weight_grid(&m, 2, 1);
        assert!(!g.is_empty());
        assert!(g.iter().all(|w| w.validate(&m).is_ok()));
    }
}
