//! Canonical text encoding of elements, weights and homology tables.
//!
//! An element is a ` + `-separated list of terms. The unit, `dlog X_i` and
//! `dlog c_j` with coefficient one are written `1`, `dlog(X1)`, `dlog(c1)`; every other
//! term is `eps{xi=V^1(1); k=[1/p^1]; P=(-inf:[]; I1=[1]); J=[]}`. Indices are 1-based.

use logdrw::homology::HomologyReport;
use logdrw::weights::ord_rat;
use logdrw::{BasisKey, DrwElement, Entry, Error, LocalModel, Partition, Result, Weight};
use num_bigint::BigInt;
use num_traits::Zero;

fn indices(v: &[usize]) -> String {
    let s: Vec<String> = v.iter().map(|x| (x + 1).to_string()).collect();
    format!("[{}]", s.join(","))
}

/// `a/p^t`, an integer, or `-inf`.
pub fn entry_text(p: u64, x: &Entry) -> String {
    match x {
        Entry::Pole => "-inf".into(),
        Entry::Val(v) if v.is_integer() => v.to_integer().to_string(),
        Entry::Val(v) => format!("{}/p^{}", v.numer(), -ord_rat(p, v)),
    }
}

pub fn weight_text(p: u64, k: &Weight) -> String {
    let s: Vec<String> = k.entries().iter().map(|x| entry_text(p, x)).collect();
    format!("[{}]", s.join(","))
}

/// `c` for a unit `c`, otherwise `V^s(c)` with `p` not dividing `c`.
pub fn xi_text(p: u64, v: u64) -> String {
    let (mut s, mut c) = (0u32, v);
    while c % p == 0 {
        c /= p;
        s += 1;
    }
    if s == 0 {
        c.to_string()
    } else {
        format!("V^{s}({c})")
    }
}

fn is_plain(key: &BasisKey) -> bool {
    key.part.i0.is_empty() && key.part.blocks.is_empty() && key.k.entries().iter().all(|x| x.plus().is_zero())
}

pub fn term_text(model: &LocalModel, key: &BasisKey, v: u64) -> String {
    if v == 1 && is_plain(key) {
        match (key.part.minus_inf.as_slice(), key.j.as_slice()) {
            ([], []) => return "1".into(),
            ([i], []) => return format!("dlog(X{})", i + 1),
            ([], [j]) => return format!("dlog(c{})", j + 1),
            _ => {}
        }
    }
    let mut parts = vec![format!("-inf:{}", indices(&key.part.minus_inf))];
    if !key.part.i0.is_empty() {
        parts.push(format!("I0={}", indices(&key.part.i0)));
    }
    for (b, block) in key.part.blocks.iter().enumerate() {
        parts.push(format!("I{}={}", b + 1, indices(block)));
    }
    format!(
        "eps{{xi={}; k={}; P=({}); J={}}}",
        xi_text(model.p, v),
        weight_text(model.p, &key.k),
        parts.join("; "),
        indices(&key.j)
    )
}

pub fn element_text(x: &DrwElement) -> String {
    if x.is_zero() {
        return "0".into();
    }
    let terms: Vec<String> = x.terms().iter().map(|(k, v)| term_text(x.model(), k, *v)).collect();
    terms.join(" + ")
}

/// Divisor table of a homology report, one list of `p^s` strings per degree.
pub fn divisor_table(h: &HomologyReport) -> Vec<Vec<String>> {
    h.divisor_strings()
}

fn malformed(msg: impl Into<String>) -> Error {
    Error::Malformed(msg.into())
}

/// Splits at `sep` outside brackets and parentheses.
fn split_top(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in s.char_indices() {
        match ch {
            '(' | '[' | '{' => depth += 1,
            ')' | ']' | '}' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + ch.len_utf8();
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_list(s: &str) -> Result<Vec<usize>> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|x| x.strip_suffix(']'))
        .ok_or_else(|| malformed(format!("expected [..], got `{s}`")))?;
    inner
        .split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| match x.parse::<usize>() {
            Ok(i) if i >= 1 => Ok(i - 1),
            _ => Err(malformed(format!("bad index `{x}`"))),
        })
        .collect()
}

pub fn parse_entry(p: u64, s: &str) -> Result<Entry> {
    let s = s.trim();
    if s == "-inf" {
        return Ok(Entry::Pole);
    }
    let bad = || malformed(format!("bad weight entry `{s}`"));
    match s.split_once('/') {
        None => s.parse::<i64>().ok().filter(|v| *v >= 0).map(Entry::int).ok_or_else(bad),
        Some((a, den)) => {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let t: u32 = den.trim().strip_prefix("p^").ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if a < 0 {
                return Err(bad());
            }
            Ok(Entry::frac(a, p, t))
        }
    }
}

/// Parses `[1/p^1,0,-inf]`; the brackets are optional.
pub fn parse_weight(p: u64, s: &str) -> Result<Weight> {
    let s = s.trim();
    let inner = s.strip_prefix('[').and_then(|x| x.strip_suffix(']')).unwrap_or(s);
    inner.split(',').map(|x| parse_entry(p, x)).collect::<Result<Vec<_>>>().map(Weight)
}

pub fn parse_xi(p: u64, s: &str) -> Result<u64> {
    let s = s.trim();
    let bad = || malformed(format!("bad coefficient `{s}`"));
    match s.strip_prefix("V^") {
        None => s.parse().map_err(|_| bad()),
        Some(rest) => {
            let (e, c) = rest.split_once('(').ok_or_else(bad)?;
            let e: u32 = e.parse().map_err(|_| bad())?;
            let c: u64 = c.strip_suffix(')').ok_or_else(bad)?.parse().map_err(|_| bad())?;
            p.checked_pow(e).and_then(|q| q.checked_mul(c)).ok_or_else(bad)
        }
    }
}

fn parse_partition(s: &str) -> Result<Partition> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|x| x.strip_suffix(')'))
        .ok_or_else(|| malformed(format!("bad partition `{s}`")))?;
    let mut part = Partition {
        minus_inf: vec![],
        i0: vec![],
        blocks: vec![],
    };
    for field in split_top(inner, ';') {
        let field = field.trim();
        if let Some(rest) = field.strip_prefix("-inf:") {
            part.minus_inf = parse_list(rest)?;
        } else if let Some((name, list)) = field.split_once('=') {
            let idx: usize = name
                .trim()
                .strip_prefix('I')
                .and_then(|x| x.parse().ok())
                .ok_or_else(|| malformed(format!("bad interval name `{name}`")))?;
            let v = parse_list(list)?;
            if idx == 0 {
                part.i0 = v;
            } else if idx == part.blocks.len() + 1 {
                part.blocks.push(v);
            } else {
                return Err(malformed(format!("interval I{idx} out of order")));
            }
        } else {
            return Err(malformed(format!("bad partition field `{field}`")));
        }
    }
    Ok(part)
}

fn parse_term(model: &LocalModel, s: &str) -> Result<(BasisKey, u64)> {
    let s = s.trim();
    let zero = Weight::zero(model.n);
    let empty = Partition {
        minus_inf: vec![],
        i0: vec![],
        blocks: vec![],
    };
    if s == "1" {
        return Ok((BasisKey::new(zero, empty, vec![]), 1));
    }
    if let Some(arg) = s.strip_prefix("dlog(").and_then(|x| x.strip_suffix(')')) {
        let bad = || malformed(format!("bad dlog `{s}`"));
        if !arg.is_char_boundary(1) {
            return Err(bad());
        }
        let (kind, idx) = arg.split_at(1);
        let i = idx.parse::<usize>().ok().filter(|i| *i >= 1).ok_or_else(bad)? - 1;
        return match kind {
            "X" => {
                let mut k = zero;
                if i >= model.n {
                    return Err(bad());
                }
                k.0[i] = Entry::Pole;
                let part = Partition {
                    minus_inf: vec![i],
                    ..empty
                };
                Ok((BasisKey::new(k, part, vec![]), 1))
            }
            "c" => Ok((BasisKey::new(zero, empty, vec![i]), 1)),
            _ => Err(bad()),
        };
    }
    let body = s
        .strip_prefix("eps{")
        .and_then(|x| x.strip_suffix('}'))
        .ok_or_else(|| malformed(format!("unrecognised term `{s}`")))?;
    let (mut xi, mut k, mut part, mut j) = (None, None, None, None);
    for field in split_top(body, ';') {
        let (name, val) = field
            .split_once('=')
            .ok_or_else(|| malformed(format!("expected name=value, got `{field}`")))?;
        match name.trim() {
            "xi" => xi = Some(parse_xi(model.p, val)?),
            "k" => k = Some(parse_weight(model.p, val)?),
            "P" => part = Some(parse_partition(val)?),
            "J" => j = Some(parse_list(val)?),
            other => return Err(malformed(format!("unknown field `{other}`"))),
        }
    }
    let missing = |f: &str| malformed(format!("term `{s}` lacks `{f}`"));
    let key = BasisKey::new(
        k.ok_or_else(|| missing("k"))?,
        part.ok_or_else(|| missing("P"))?,
        j.ok_or_else(|| missing("J"))?,
    );
    Ok((key, xi.ok_or_else(|| missing("xi"))?))
}

/// Parses [`element_text`] output back into an element of `W_level Lambda`.
pub fn parse_element(model: &LocalModel, level: u32, s: &str) -> Result<DrwElement> {
    let s = s.trim();
    if s == "0" {
        return DrwElement::zero(model, level);
    }
    let terms = s
        .split(" + ")
        .map(|t| parse_term(model, t).map(|(k, v)| (k, BigInt::from(v))))
        .collect::<Result<Vec<_>>>()?;
    if terms.iter().any(|(_, v)| v.is_zero()) {
        return Err(malformed("zero coefficient in a term"));
    }
    DrwElement::from_terms(model, level, terms)
}

#[cfg(test)]
mod tests {
    use super::*;
    use logdrw::random::{self, Bounds};
    use logdrw::WittScalar;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn examples() {
        let model = LocalModel::poly(2, 1, 1, 1).unwrap();
        assert_eq!(element_text(&DrwElement::one(&model, 2).unwrap()), "1");
        assert_eq!(element_text(&DrwElement::dlog_x(&model, 2, 0).unwrap()), "dlog(X1)");
        assert_eq!(element_text(&DrwElement::dlog_c(&model, 2, 0).unwrap()), "dlog(c1)");
        let k = Weight(vec![Entry::frac(1, 2, 1)]);
        let part = Partition {
            minus_inf: vec![],
            i0: vec![],
            blocks: vec![vec![0]],
        };
        let xi = WittScalar::new(2, 2, 2).unwrap();
        let x = DrwElement::make_basic(&model, xi, k, part, vec![]).unwrap();
        assert_eq!(element_text(&x), "eps{xi=V^1(1); k=[1/p^1]; P=(-inf:[]; I1=[1]); J=[]}");
        assert_eq!(parse_element(&model, 2, &element_text(&x)).unwrap(), x);
    }

    #[test]
    fn rejects_garbage() {
        let model = LocalModel::poly(3, 2, 1, 0).unwrap();
        for s in ["", "eps{}", "dlog(X3)", "dlog(c1)", "eps{xi=1; k=[1,1]; P=(-inf:[]; I2=[1]); J=[]}", "2 + "] {
            assert!(parse_element(&model, 2, s).is_err(), "{s}");
        }
    }

    #[test]
    fn round_trip_on_random_elements() {
        let models = [
            LocalModel::poly(2, 2, 1, 1).unwrap(),
            LocalModel::poly(3, 3, 2, 0).unwrap(),
            LocalModel::semistable(2, 2, 2, 0, 2).unwrap(),
            LocalModel::semistable(3, 3, 3, 1, 2).unwrap(),
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for i in 0..1000 {
            let model = &models[i % models.len()];
            let m = 1 + (i / models.len()) as u32 % 3;
            let x = random::element(model, m, &mut rng, &Bounds::default()).unwrap();
            let text = element_text(&x);
            assert_eq!(parse_element(model, m, &text).unwrap(), x, "{text}");
        }
    }
}
