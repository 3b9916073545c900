//! Weight filtration by pole count, Poincaré residues onto strata, the Steenbrink
//! double complex of a semistable model and the weight spectral sequence.
//!
//! Strata `Y_J` are polynomial models without log positions: the variables in `J`
//! are removed and the remaining ones keep their relative order.

use std::collections::BTreeMap;

use num_bigint::BigInt;

use crate::drw::{keys_of_plus_class, relative_keys, BasisKey, DrwElement};
use crate::error::{Error, Result};
use crate::homology::filtered::{filtered_page, filtration_component, graded_piece, limit_page};
use crate::homology::local::{index_exp, Local};
use crate::homology::{
    block_presentation, generator, homology_of, weight_subcomplex, Block, ComplexPresentation, IntMatrix, Variant,
};
use crate::poly::Poly;
use crate::weights::{plus_weight_grid, Base, Entry, LocalModel, Partition, Weight};
use crate::witt_poly::WittVectorPoly;

/// Filtration level of a basic term: the number of pole factors.
pub fn filtration_level(key: &BasisKey) -> usize {
    key.pole_count()
}

/// Largest level among the terms (zero for the zero element).
pub fn level(omega: &DrwElement) -> usize {
    omega.terms().keys().map(filtration_level).max().unwrap_or(0)
}

/// Terms of level exactly `j`.
pub fn project_gr(omega: &DrwElement, j: usize) -> DrwElement {
    omega.filter(|k| filtration_level(k) == j)
}

/// Terms of level at most `j` (the `P_j` component).
pub fn project_p(omega: &DrwElement, j: usize) -> DrwElement {
    omega.filter(|k| filtration_level(k) <= j)
}

/// Terms of level at least `j` (the image in the quotient by `P_{j-1}`).
pub fn project_above(omega: &DrwElement, j: usize) -> DrwElement {
    omega.filter(|k| filtration_level(k) >= j)
}

/// Positions that can carry a pole counted by the filtration.
fn divisor_positions(model: &LocalModel) -> Result<Vec<usize>> {
    if model.is_semistable() && model.e != model.d {
        return Err(Error::UnsupportedModel(
            "residues on semistable models need e = d".into(),
        ));
    }
    Ok((0..model.e).collect())
}

/// A stratum `Y_J` with the map from ambient variables to its variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Stratum {
    pub set: Vec<usize>,
    pub model: LocalModel,
    pub index_map: Vec<Option<usize>>,
}

/// The stratum of `set`; the empty set gives the model itself.
pub fn stratum(model: &LocalModel, set: &[usize]) -> Result<Stratum> {
    let allowed = divisor_positions(model)?;
    if set.windows(2).any(|w| w[0] >= w[1]) || set.iter().any(|i| !allowed.contains(i)) {
        return Err(Error::OutOfRange(format!("{set:?} is not a set of divisor positions")));
    }
    if set.is_empty() {
        return Ok(Stratum {
            set: vec![],
            model: *model,
            index_map: (0..model.n).map(Some).collect(),
        });
    }
    let mut index_map = Vec::with_capacity(model.n);
    let mut next = 0;
    for i in 0..model.n {
        if set.contains(&i) {
            index_map.push(None);
        } else {
            index_map.push(Some(next));
            next += 1;
        }
    }
    Ok(Stratum {
        set: set.to_vec(),
        model: LocalModel::poly(model.p, model.n - set.len(), 0, model.f)?,
        index_map,
    })
}

/// All subsets of size `j` of the divisor positions.
pub fn strata_sets(model: &LocalModel, j: usize) -> Result<Vec<Vec<usize>>> {
    let pos = divisor_positions(model)?;
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << pos.len()) {
        if mask.count_ones() as usize == j {
            out.push(pos.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, i)| *i).collect());
        }
    }
    Ok(out)
}

fn reindex(part: &Partition, map: &dyn Fn(usize) -> usize) -> Partition {
    Partition {
        minus_inf: part.minus_inf.iter().map(|i| map(*i)).collect(),
        i0: part.i0.iter().map(|i| map(*i)).collect(),
        blocks: part.blocks.iter().map(|b| b.iter().map(|i| map(*i)).collect()).collect(),
    }
}

/// Residue of one basic term: its pole set, the stripped key on the stratum and
/// whether a sign is picked up (`eps = (-1)^s Res(eps) ^ dlog X_J`).
pub fn residue_key(model: &LocalModel, key: &BasisKey) -> Result<(Vec<usize>, BasisKey, bool)> {
    let set = key.part.minus_inf.clone();
    let st = stratum(model, &set)?;
    if set.is_empty() {
        return Ok((set, key.clone(), false));
    }
    let k = key.k.drop_positions(&set);
    let map = |i: usize| st.index_map[i].expect("support avoids the poles");
    let mut part = reindex(
        &Partition {
            minus_inf: vec![],
            ..key.part.clone()
        },
        &map,
    );
    part.minus_inf = vec![];
    let out = BasisKey::new(k, part, key.j.clone());
    debug_assert!(out.validate(&st.model).is_ok());
    let neg = (set.len() * key.part.l()) % 2 == 1;
    Ok((set, out, neg))
}

/// Inverse of [`residue_key`].
pub fn wedge_key(model: &LocalModel, set: &[usize], key: &BasisKey) -> Result<(BasisKey, bool)> {
    let st = stratum(model, set)?;
    key.validate(&st.model)?;
    if set.is_empty() {
        return Ok((key.clone(), false));
    }
    let back: Vec<usize> = (0..model.n).filter(|i| !set.contains(i)).collect();
    let mut entries = vec![Entry::Pole; model.n];
    for (y, x) in back.iter().enumerate() {
        entries[*x] = key.k.0[y];
    }
    let mut part = reindex(&key.part, &|i| back[i]);
    part.minus_inf = set.to_vec();
    let out = BasisKey::new(Weight(entries), part, key.j.clone());
    out.validate(model)?;
    let neg = (set.len() * key.part.l()) % 2 == 1;
    Ok((out, neg))
}

pub type StratumFamily = BTreeMap<Vec<usize>, DrwElement>;

/// Poincaré residue of the `Gr_j` component: strips `dlog X_J` on the right.
pub fn residue(omega: &DrwElement, j: usize) -> Result<StratumFamily> {
    let model = *omega.model();
    if level(omega) > j {
        return Err(Error::OutOfRange(format!("element has terms above level {j}")));
    }
    let mut out: StratumFamily = BTreeMap::new();
    for (key, v) in omega.terms() {
        if filtration_level(key) != j {
            continue;
        }
        let (set, k, neg) = residue_key(&model, key)?;
        let st = stratum(&model, &set)?;
        let c = if neg { -BigInt::from(*v) } else { BigInt::from(*v) };
        let term = DrwElement::from_terms(&st.model, omega.level(), [(k, c)])?;
        let slot = match out.remove(&set) {
            Some(x) => x.add(&term)?,
            None => term,
        };
        out.insert(set, slot);
    }
    out.retain(|_, x| !x.is_zero());
    Ok(out)
}

/// `omega ^ dlog X_J` for a form on `Y_J`, through the key bijection.
pub fn wedge_from_stratum(model: &LocalModel, set: &[usize], omega: &DrwElement) -> Result<DrwElement> {
    let mut out = DrwElement::zero(model, omega.level())?;
    for (key, v) in omega.terms() {
        let (k, neg) = wedge_key(model, set, key)?;
        let c = if neg { -BigInt::from(*v) } else { BigInt::from(*v) };
        out = out.add(&DrwElement::from_terms(model, omega.level(), [(k, c)])?)?;
    }
    Ok(out)
}

/// `omega ^ dlog X_J` computed by embedding the stratum form and multiplying.
pub fn wedge_via_product(model: &LocalModel, set: &[usize], omega: &DrwElement) -> Result<DrwElement> {
    let st = stratum(model, set)?;
    let mut var_map = vec![None; st.model.n];
    for (x, y) in st.index_map.iter().enumerate() {
        if let Some(y) = y {
            var_map[*y] = Some(x);
        }
    }
    let c_map: Vec<usize> = (0..model.f).collect();
    let form = omega
        .to_form()
        .pullback(model, &var_map, &vec![None; st.model.n], &c_map);
    let mut out = DrwElement::from_form(model, omega.level(), &form)?;
    for a in set {
        out = out.multiply(&DrwElement::dlog_x(model, omega.level(), *a)?)?;
    }
    Ok(out)
}

/// Restriction of a form on `Y_J` to `Y_{J + alpha}` (`[T_alpha] = 0`).
pub fn restrict_stratum(model: &LocalModel, set: &[usize], alpha: usize, omega: &DrwElement) -> Result<DrwElement> {
    let st = stratum(model, set)?;
    let mut bigger = set.to_vec();
    bigger.push(alpha);
    bigger.sort();
    let target = stratum(model, &bigger)?;
    let pos = st.index_map[alpha].ok_or_else(|| Error::OutOfRange(format!("{alpha} already in {set:?}")))?;
    let mut out = DrwElement::zero(&target.model, omega.level())?;
    for (key, v) in omega.terms() {
        if !key.k.0[pos].is_zero() {
            continue;
        }
        let k = key.k.drop_positions(&[pos]);
        let part = reindex(&key.part, &|i| if i > pos { i - 1 } else { i });
        let key = BasisKey::new(k, part, key.j.clone());
        out = out.add(&DrwElement::from_terms(&target.model, omega.level(), [(key, BigInt::from(*v))])?)?;
    }
    Ok(out)
}

/// `rho = sum_q (-1)^{q+1} rho^{(q)}` from `Y^{(j)}` to `Y^{(j+1)}`.
pub fn rho(model: &LocalModel, level: u32, family: &StratumFamily, j: usize) -> Result<StratumFamily> {
    let mut out = StratumFamily::new();
    for target in strata_sets(model, j + 1)? {
        let st = stratum(model, &target)?;
        let mut acc = DrwElement::zero(&st.model, level)?;
        for (q, alpha) in target.iter().enumerate() {
            let face: Vec<usize> = target.iter().copied().filter(|x| x != alpha).collect();
            if let Some(omega) = family.get(&face) {
                let r = restrict_stratum(model, &face, *alpha, omega)?;
                acc = if q % 2 == 0 { acc.add(&r)? } else { acc.sub(&r)? };
            }
        }
        if !acc.is_zero() {
            out.insert(target, acc);
        }
    }
    Ok(out)
}

fn scale_family(f: &StratumFamily, s: &BigInt) -> StratumFamily {
    f.iter()
        .map(|(k, v)| (k.clone(), v.scale(s)))
        .filter(|(_, v)| !v.is_zero())
        .collect()
}

fn sign(odd: bool) -> BigInt {
    if odd {
        BigInt::from(-1)
    } else {
        BigInt::from(1)
    }
}

/// The Gys1 square on a homogeneous element of `Gr_j`:
/// `Res(theta ^ omega) = (-1)^{deg - j} rho(Res omega)`.
pub fn gys1_holds(omega: &DrwElement, j: usize) -> Result<bool> {
    let model = *omega.model();
    let omega = project_gr(omega, j);
    let Some(deg) = omega.degree() else {
        return Ok(true);
    };
    let lhs = residue(&project_gr(&omega.wedge_theta()?, j + 1), j + 1)?;
    let rhs = rho(&model, omega.level(), &residue(&omega, j)?, j)?;
    let rhs = scale_family(&rhs, &sign((deg + j) % 2 == 1));
    Ok(lhs == rhs)
}

/// Generators of `P_j` in weight `k` and degree `deg` by the image definition:
/// products `dlog X_S ^ eta` with `|S| <= j` and `eta` pole-free.
pub fn p_image_generators(model: &LocalModel, m: u32, k: &Weight, deg: usize, j: usize) -> Result<Vec<DrwElement>> {
    k.validate(model)?;
    let poles = k.poles();
    let free: Vec<usize> = (0..model.e).filter(|i| !k.0[*i].is_pole() && !k.0[*i].is_zero()).collect();
    let kplus = k.k_plus();
    let mut out = Vec::new();
    for mask in 0u64..(1u64 << free.len()) {
        let mut s = poles.clone();
        s.extend(free.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, i)| *i));
        s.sort();
        if s.len() > j || s.len() > deg {
            continue;
        }
        let mut dl = DrwElement::one(model, m)?;
        for i in &s {
            dl = dl.multiply(&DrwElement::dlog_x(model, m, *i)?)?;
        }
        for key in DrwElement::keys_of_weight(model, &kplus) {
            if key.degree() + s.len() != deg || !key.alive_at(model.p, m) {
                continue;
            }
            out.push(dl.multiply(&generator(model, m, &key)?)?);
        }
    }
    Ok(out)
}

/// Whether the image definition of `P_j` agrees with the pole-count description in
/// weight `k` and degree `deg`.
pub fn p_characterization_holds(model: &LocalModel, m: u32, k: &Weight, deg: usize, j: usize) -> Result<bool> {
    let keys: Vec<BasisKey> = DrwElement::keys_of_weight(model, k)
        .into_iter()
        .filter(|x| x.degree() == deg && x.alive_at(model.p, m))
        .collect();
    let loc = Local::new(model.p, m);
    let rel: Vec<Vec<i128>> = keys
        .iter()
        .enumerate()
        .map(|(t, key)| {
            let mut v = vec![0; keys.len()];
            v[t] = loc.pow_p(m - key.u(model.p));
            v
        })
        .collect();
    let coords = |x: &DrwElement| -> Result<Vec<i128>> {
        let c = crate::drw::coordinates(x, &keys)?;
        Ok(c.iter()
            .zip(&keys)
            .map(|(v, key)| (*v / model.p.pow(key.u(model.p))) as i128)
            .collect())
    };
    let mut a = rel.clone();
    for g in p_image_generators(model, m, k, deg, j)? {
        a.push(coords(&g)?);
    }
    let mut b = rel;
    for (t, key) in keys.iter().enumerate() {
        if filtration_level(key) <= j {
            let mut v = vec![0; keys.len()];
            v[t] = 1;
            b.push(v);
        }
    }
    let n = keys.len();
    let mut ab = a.clone();
    ab.extend(b.iter().cloned());
    let iab = index_exp(&loc, n, &ab);
    Ok(index_exp(&loc, n, &a) == iab && index_exp(&loc, n, &b) == iab)
}

/// Per total degree, the `(i, j, key)` of each generator.
pub type CellLabels = Vec<Vec<(usize, usize, BasisKey)>>;

/// The Steenbrink double complex `A^{ij} = W_m Lambda~^{i+j+1} / P_j` on one `k+` class.
#[derive(Debug, Clone)]
pub struct Steenbrink {
    pub model: LocalModel,
    pub m: u32,
    pub kplus: Weight,
    keys: Vec<BasisKey>,
}

impl Steenbrink {
    pub fn new(model: &LocalModel, m: u32, kplus: &Weight) -> Result<Self> {
        if model.base != Base::LogPoint || !model.is_semistable() {
            return Err(Error::UnsupportedModel("Steenbrink complexes need a semistable model".into()));
        }
        divisor_positions(model)?;
        kplus.validate(model)?;
        if !kplus.poles().is_empty() {
            return Err(Error::InvalidWeight("expected a pole-free weight".into()));
        }
        let keys = keys_of_plus_class(model, kplus)
            .into_iter()
            .filter(|k| k.alive_at(model.p, m))
            .collect();
        Ok(Steenbrink {
            model: *model,
            m,
            kplus: kplus.clone(),
            keys,
        })
    }

    fn top(&self) -> usize {
        self.model.generators()
    }

    /// Keys spanning `A^{ij}`.
    pub fn cell(&self, i: usize, j: usize) -> Vec<BasisKey> {
        self.keys
            .iter()
            .filter(|k| k.degree() == i + j + 1 && filtration_level(k) > j)
            .cloned()
            .collect()
    }

    /// Cells that can be nonzero.
    pub fn cells(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for h in 0..self.top() {
            for j in 0..=h.min(self.model.e.saturating_sub(1)) {
                out.push((h - j, j));
            }
        }
        out
    }

    /// Vertical map `(-1)^i theta ^` into `A^{i,j+1}`.
    pub fn vertical(&self, i: usize, j: usize, x: &DrwElement) -> Result<DrwElement> {
        let y = project_above(&x.wedge_theta()?, j + 2);
        Ok(if i % 2 == 1 { y.neg() } else { y })
    }

    /// Horizontal map `(-1)^{j+1} d` into `A^{i+1,j}`.
    pub fn horizontal(&self, _i: usize, j: usize, x: &DrwElement) -> Result<DrwElement> {
        let y = project_above(&x.differential()?, j + 1);
        Ok(if j.is_multiple_of(2) { y.neg() } else { y })
    }

    /// Whether every square anticommutes on the generators.
    pub fn squares_anticommute(&self) -> Result<bool> {
        for (i, j) in self.cells() {
            for key in self.cell(i, j) {
                let x = generator(&self.model, self.m, &key)?;
                let a = self.vertical(i + 1, j, &self.horizontal(i, j, &x)?)?;
                let b = self.horizontal(i, j + 1, &self.vertical(i, j, &x)?)?;
                if !a.add(&b)?.is_zero() {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Cells of total degree `h`, ordered by `j`.
    fn diagonal(&self, h: usize) -> Vec<(usize, usize)> {
        self.cells().into_iter().filter(|(i, j)| i + j == h).collect()
    }

    /// The total complex with generator labels `(i, j, key)`.
    pub fn total(&self) -> Result<(ComplexPresentation, CellLabels)> {
        let diags: Vec<Vec<(usize, usize)>> = (0..self.top()).map(|h| self.diagonal(h)).collect();
        let groups: Vec<Vec<Block>> = diags
            .iter()
            .map(|d| {
                d.iter()
                    .map(|(i, j)| Block {
                        model: self.model,
                        keys: self.cell(*i, *j),
                    })
                    .collect()
            })
            .collect();
        let labels = diags
            .iter()
            .map(|d| {
                d.iter()
                    .flat_map(|(i, j)| self.cell(*i, *j).into_iter().map(move |k| (*i, *j, k)))
                    .collect()
            })
            .collect();
        let c = block_presentation(self.model.p, self.m, 0, groups, |h, b, x| {
            let (i, j) = diags[h][b];
            diags[h + 1]
                .iter()
                .map(|&(i2, j2)| {
                    if (i2, j2) == (i + 1, j) {
                        self.horizontal(i, j, x)
                    } else if (i2, j2) == (i, j + 1) {
                        self.vertical(i, j, x)
                    } else {
                        DrwElement::zero(&self.model, self.m)
                    }
                })
                .collect()
        })?;
        Ok((c, labels))
    }

    /// Weight-filtration label of a generator: `P_k A^{ij}` is spanned by the keys of
    /// level at most `2j + k + 1`.
    pub fn weight_label(i: usize, j: usize, key: &BasisKey) -> i32 {
        let _ = i;
        filtration_level(key) as i32 - 2 * j as i32 - 1
    }

    /// The total complex with its weight labels.
    pub fn filtered_total(&self) -> Result<(ComplexPresentation, Vec<Vec<i32>>, CellLabels)> {
        let (c, labels) = self.total()?;
        let filt = labels
            .iter()
            .map(|l| l.iter().map(|(i, j, k)| Self::weight_label(*i, *j, k)).collect())
            .collect();
        Ok((c, filt, labels))
    }

    /// Row `j`: `A^{0j} -> A^{1j} -> ...` with the horizontal maps.
    pub fn row(&self, j: usize) -> Result<ComplexPresentation> {
        let groups: Vec<Vec<Block>> = (0..self.top())
            .map(|i| {
                vec![Block {
                    model: self.model,
                    keys: self.cell(i, j),
                }]
            })
            .collect();
        block_presentation(self.model.p, self.m, 0, groups, |i, _, x| Ok(vec![self.horizontal(i, j, x)?]))
    }

    /// `0 -> W_m Lambda^i -> A^{i0} -> A^{i1} -> ...` (starting in degree -1).
    pub fn resolution(&self, i: usize) -> Result<ComplexPresentation> {
        let rel: Vec<BasisKey> = relative_keys(&self.model, &self.kplus)
            .into_iter()
            .filter(|k| k.degree() == i)
            .collect();
        let mut groups = vec![vec![Block {
            model: self.model,
            keys: rel,
        }]];
        for j in 0..self.model.e {
            groups.push(vec![Block {
                model: self.model,
                keys: self.cell(i, j),
            }]);
        }
        block_presentation(self.model.p, self.m, -1, groups, |g, _, x| {
            if g == 0 {
                Ok(vec![project_above(&x.wedge_theta()?, 1)])
            } else {
                Ok(vec![self.vertical(i, g - 1, x)?])
            }
        })
    }

    /// The relative complex on the same class.
    pub fn relative(&self) -> Result<ComplexPresentation> {
        weight_subcomplex(&self.model, self.m, &self.kplus, Variant::Relative)
    }
}

/// Row `j` of the Steenbrink double complex on a `k+` class.
pub fn steenbrink_row(model: &LocalModel, m: u32, kplus: &Weight, j: usize) -> Result<ComplexPresentation> {
    Steenbrink::new(model, m, kplus)?.row(j)
}

/// Whether `Res(D_1 x) = (-1)^{j+k} rho(Res x)` for every generator of every
/// `Gr_k`, where `D_1` is the level-raising part of the vertical map.
pub fn d1_identification_holds(st: &Steenbrink) -> Result<bool> {
    for (i, j) in st.cells() {
        for key in st.cell(i, j) {
            let lvl = filtration_level(&key);
            let k = Steenbrink::weight_label(i, j, &key);
            let x = generator(&st.model, st.m, &key)?;
            let d1 = project_gr(&st.vertical(i, j, &x)?, lvl + 1);
            let lhs = residue(&d1, lvl + 1)?;
            let rhs = rho(&st.model, st.m, &residue(&x, lvl)?, lvl)?;
            let rhs = scale_family(&rhs, &sign((j as i32 + k).rem_euclid(2) == 1));
            if lhs != rhs {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// One aggregated entry `E_1^{-k, h+k}` with its strata bookkeeping.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E1Entry {
    pub divisors: Vec<u32>,
    /// `(j, codimension 2j+k+1, twist -j-k)` for each contributing summand.
    pub strata: Vec<(usize, usize, i32)>,
}

/// The chain-level `d_1` of one `k+` class from `Gr_k` in total degree `h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct D1Block {
    pub kplus: Weight,
    pub k: i32,
    pub h: i32,
    pub matrix: IntMatrix,
}

/// Weight spectral sequence pages aggregated over a grid of `k+` classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct E1Page {
    pub model: LocalModel,
    pub m: u32,
    pub weights: Vec<Weight>,
    /// Keyed by `(-k, h + k)`.
    pub e1: BTreeMap<(i32, i32), E1Entry>,
    pub e2: BTreeMap<(i32, i32), Vec<u32>>,
    pub e_inf: BTreeMap<(i32, i32), Vec<u32>>,
    /// Divisors of the abutment `H^h` of the total complex.
    pub abutment: BTreeMap<i32, Vec<u32>>,
    pub d1: Vec<D1Block>,
}

/// One `k+` class of the filtered complex: Steenbrink total complex for semistable
/// models, `W_m Lambda` with the pole filtration otherwise.
pub fn filtered_class(model: &LocalModel, m: u32, kplus: &Weight) -> Result<(ComplexPresentation, Vec<Vec<i32>>)> {
    if model.is_semistable() {
        let (c, filt, _) = Steenbrink::new(model, m, kplus)?.filtered_total()?;
        Ok((c, filt))
    } else {
        divisor_positions(model)?;
        let keys: Vec<BasisKey> = keys_of_plus_class(model, kplus)
            .into_iter()
            .filter(|k| k.alive_at(model.p, m))
            .collect();
        let bases = crate::homology::group_by_degree(model, keys);
        let filt = bases
            .iter()
            .map(|b| b.iter().map(|k| filtration_level(k) as i32).collect())
            .collect();
        let c = crate::homology::drw_presentation(model, m, bases, 0, |x| x.differential())?;
        Ok((c, filt))
    }
}

fn push_divisors(map: &mut BTreeMap<(i32, i32), Vec<u32>>, key: (i32, i32), d: &[u32]) {
    let e = map.entry(key).or_default();
    e.extend_from_slice(d);
    e.sort();
}

/// The weight spectral sequence on all `k+` classes of the grid.
pub fn e1_page(model: &LocalModel, m: u32, max_num: u64, max_den: u32) -> Result<E1Page> {
    let weights = plus_weight_grid(model, max_num, max_den);
    let mut page = E1Page {
        model: *model,
        m,
        weights: weights.clone(),
        e1: BTreeMap::new(),
        e2: BTreeMap::new(),
        e_inf: BTreeMap::new(),
        abutment: BTreeMap::new(),
        d1: Vec::new(),
    };
    for kplus in &weights {
        let (c, filt) = filtered_class(model, m, kplus)?;
        let e1 = filtered_page(&c, &filt, 1)?;
        for ((k, h), d) in &e1 {
            let entry = page.e1.entry((-k, h + k)).or_insert_with(|| E1Entry {
                divisors: vec![],
                strata: vec![],
            });
            entry.divisors.extend_from_slice(d);
            entry.divisors.sort();
        }
        for ((k, h), d) in filtered_page(&c, &filt, 2)? {
            push_divisors(&mut page.e2, (-k, h + k), &d);
        }
        for ((k, h), d) in filtered_page(&c, &filt, limit_page(&filt))? {
            push_divisors(&mut page.e_inf, (-k, h + k), &d);
        }
        let total = homology_of(&c)?;
        for h in 0..c.len() as i32 {
            let d = total.at(h);
            if !d.is_empty() {
                let e = page.abutment.entry(h).or_default();
                e.extend_from_slice(d);
                e.sort();
            }
        }
        for i in 0..c.maps.len() {
            let labels: Vec<i32> = filt[i].clone();
            let (lo, hi) = match (labels.iter().min(), labels.iter().max()) {
                (Some(a), Some(b)) => (*a, *b),
                _ => continue,
            };
            for k in lo..=hi {
                let mat = filtration_component(&c, &filt, i, k, k - 1);
                if !mat.is_zero() {
                    page.d1.push(D1Block {
                        kplus: kplus.clone(),
                        k,
                        h: i as i32,
                        matrix: mat,
                    });
                }
            }
        }
    }
    for ((pk, q), entry) in page.e1.iter_mut() {
        let k = -pk;
        let h = q - k;
        let semistable = model.is_semistable();
        for j in 0..=(model.generators() as i32) {
            let codim = if semistable { 2 * j + k + 1 } else { k };
            if j < (-k).max(0) || codim < 0 || codim as usize > model.e {
                continue;
            }
            if !semistable && j > 0 {
                break;
            }
            let twist = if semistable { -j - k } else { -k };
            let deg = if semistable { h - 2 * j - k } else { h - k };
            if deg >= 0 {
                entry.strata.push((j as usize, codim as usize, twist));
            }
        }
    }
    Ok(page)
}

/// Divisors of `H^h(Gr_k)` per `(k, h)` computed directly on the graded pieces.
pub fn graded_homology(c: &ComplexPresentation, filt: &[Vec<i32>]) -> Result<BTreeMap<(i32, i32), Vec<u32>>> {
    let labels: Vec<i32> = filt.iter().flatten().copied().collect();
    let mut out = BTreeMap::new();
    let (Some(lo), Some(hi)) = (labels.iter().min(), labels.iter().max()) else {
        return Ok(out);
    };
    for k in *lo..=*hi {
        let h = homology_of(&graded_piece(c, filt, k)?)?;
        for deg in 0..c.len() as i32 {
            if !h.at(deg).is_empty() {
                out.insert((k, deg), h.at(deg).to_vec());
            }
        }
    }
    Ok(out)
}

/// `E_1` predicted from the strata: `H^h(Gr_k)` as a sum of stratum cohomology
/// groups of the residue weights.
pub fn strata_prediction(model: &LocalModel, m: u32, kplus: &Weight) -> Result<BTreeMap<(i32, i32), Vec<u32>>> {
    let mut out: BTreeMap<(i32, i32), Vec<u32>> = BTreeMap::new();
    let zeros: Vec<usize> = divisor_positions(model)?
        .into_iter()
        .filter(|i| kplus.0[*i].is_zero())
        .collect();
    for mask in 0u64..(1u64 << zeros.len()) {
        let set: Vec<usize> = zeros.iter().enumerate().filter(|(b, _)| mask >> b & 1 == 1).map(|(_, i)| *i).collect();
        let codim = set.len() as i32;
        if model.is_semistable() && codim == 0 {
            continue;
        }
        let st = stratum(model, &set)?;
        let k = kplus.drop_positions(&set);
        if k.validate(&st.model).is_err() {
            continue;
        }
        let h = homology_of(&weight_subcomplex(&st.model, m, &k, Variant::Absolute)?)?;
        for q in 0..=(st.model.generators() as i32) {
            let d = h.at(q);
            if d.is_empty() {
                continue;
            }
            if model.is_semistable() {
                // codim = 2j + k + 1 with j >= max(0, -k): every k of the right parity
                for j in 0..codim {
                    let k = codim - 2 * j - 1;
                    if j < (-k).max(0) {
                        continue;
                    }
                    let hdeg = q + 2 * j + k;
                    push_divisors(&mut out, (k, hdeg), d);
                }
            } else {
                push_divisors(&mut out, (codim, q + codim), d);
            }
        }
    }
    Ok(out)
}

/// `underline(p^k F)`: `p^k F` of any lift one level up.
pub fn underline_pf(x: &DrwElement, k: u32) -> Result<DrwElement> {
    let y = x.canonical_lift()?.frobenius()?;
    Ok(y.scale(&BigInt::from(x.model().p).pow(k)))
}

/// Frobenius of `W_m(O)` on a degree-zero element, by p-th powers of Witt coordinates.
pub fn witt_frobenius(x: &DrwElement) -> Result<DrwElement> {
    let w = x.to_witt_vector()?;
    let p = w.prime();
    let q = BigInt::from(p);
    let coords: Vec<Poly> = w.coords().iter().map(|c| c.pow(p).reduce_mod(&q)).collect();
    DrwElement::from_witt_vector(x.model(), &WittVectorPoly::new(p, w.nvars(), coords)?)
}

/// `Phi~^{(j)} = Res^{-1} o Phi o Res` on `A^{0j}`.
pub fn phi_tilde(model: &LocalModel, x: &DrwElement, j: usize) -> Result<DrwElement> {
    let x = project_above(x, j + 1);
    let mut out = DrwElement::zero(model, x.level())?;
    for (set, y) in residue(&x, j + 1)? {
        out = out.add(&wedge_from_stratum(model, &set, &witt_frobenius(&y)?)?)?;
    }
    Ok(out)
}

/// `Psi~` on `A^{ij}`: `Phi~` on column zero and `underline(p^i F)` elsewhere.
pub fn psi_tilde(model: &LocalModel, i: usize, j: usize, x: &DrwElement) -> Result<DrwElement> {
    if i == 0 {
        phi_tilde(model, x, j)
    } else {
        Ok(project_above(&underline_pf(x, i as u32)?, j + 1))
    }
}

/// The Frobenius of a stratum form of degree `q`: `Phi` in degree zero and
/// `underline(p^q F)` above.
pub fn stratum_frobenius(y: &DrwElement) -> Result<DrwElement> {
    match y.degree() {
        None => Ok(y.clone()),
        Some(0) => witt_frobenius(y),
        Some(q) => underline_pf(y, q as u32),
    }
}

/// Matrix of `Res` from weight `k` (poles at `J`) to the weight `k` without `J` on
/// `Y_J`, in the generator bases.
pub fn residue_matrix(model: &LocalModel, m: u32, k: &Weight) -> Result<IntMatrix> {
    k.validate(model)?;
    let set = k.poles();
    let st = stratum(model, &set)?;
    let src: Vec<BasisKey> = DrwElement::keys_of_weight(model, k)
        .into_iter()
        .filter(|x| x.alive_at(model.p, m))
        .collect();
    let dst: Vec<BasisKey> = DrwElement::keys_of_weight(&st.model, &k.drop_positions(&set))
        .into_iter()
        .filter(|x| x.alive_at(model.p, m))
        .collect();
    let mut out = IntMatrix::zeros(dst.len(), src.len());
    for (c, key) in src.iter().enumerate() {
        let x = generator(model, m, key)?;
        if let Some(y) = residue(&x, set.len())?.get(&set) {
            for (r, v) in crate::drw::coordinates(y, &dst)?.into_iter().enumerate() {
                if v != 0 {
                    let u = dst[r].u(model.p);
                    let q = model.p.pow(m - u) as i128;
                    let v = (v / model.p.pow(u)) as i128;
                    out.set(r, c, if v > q / 2 { v - q } else { v });
                }
            }
        }
    }
    Ok(out)
}

/// Whether every row and column has exactly one entry, equal to `1` or `-1`.
pub fn is_signed_permutation(mat: &IntMatrix) -> bool {
    let rows_ok = (0..mat.rows).all(|r| {
        let nz: Vec<i128> = mat.row(r).iter().copied().filter(|v| *v != 0).collect();
        nz.len() == 1 && nz[0].abs() == 1
    });
    let cols_ok = (0..mat.cols).all(|c| mat.column(c).iter().filter(|v| **v != 0).count() == 1);
    mat.rows == mat.cols && rows_ok && cols_ok
}

/// `p^i F` kills the kernel `V^m y + dV^m y'` of restriction to level `m`, for `y` of
/// degree `i` and `y'` of degree `i - 1` at level one.
pub fn kills_restriction_kernel(y: &DrwElement, y2: &DrwElement, m: u32, i: u32) -> Result<bool> {
    if y.level() != 1 || y2.level() != 1 {
        return Err(Error::OutOfRange("kernel elements live at level one".into()));
    }
    let mut a = y.clone();
    let mut b = y2.clone();
    for _ in 0..m {
        a = a.verschiebung()?;
        b = b.verschiebung()?;
    }
    let z = a.add(&b.differential()?)?.frobenius()?;
    Ok(z.scale(&BigInt::from(y.model().p).pow(i)).is_zero())
}

/// The `Gr_k` conjugation identity on one generator of `A^{ij}`:
/// `Res(Psi~ x) = p^{j+k} Psi_Y(Res x)` with `k = level - 2j - 1`.
pub fn gr_conjugation_holds(st: &Steenbrink, i: usize, j: usize, key: &BasisKey) -> Result<bool> {
    let lvl = filtration_level(key);
    let k = Steenbrink::weight_label(i, j, key);
    let x = generator(&st.model, st.m, key)?;
    let lhs = residue(&project_gr(&psi_tilde(&st.model, i, j, &x)?, lvl), lvl)?;
    let s = BigInt::from(st.model.p).pow((j as i32 + k) as u32);
    let mut rhs = StratumFamily::new();
    for (set, y) in residue(&x, lvl)? {
        let z = stratum_frobenius(&y)?.scale(&s);
        if !z.is_zero() {
            rhs.insert(set, z);
        }
    }
    Ok(lhs == rhs)
}

/// `Psi~` commutes with both maps of the double complex on every generator.
pub fn psi_commutes(st: &Steenbrink) -> Result<bool> {
    for (i, j) in st.cells() {
        for key in st.cell(i, j) {
            let x = generator(&st.model, st.m, &key)?;
            let a = psi_tilde(&st.model, i + 1, j, &st.horizontal(i, j, &x)?)?;
            let b = st.horizontal(i, j, &psi_tilde(&st.model, i, j, &x)?)?;
            let c = psi_tilde(&st.model, i, j + 1, &st.vertical(i, j, &x)?)?;
            let d = st.vertical(i, j, &psi_tilde(&st.model, i, j, &x)?)?;
            if a != b || c != d {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests;
