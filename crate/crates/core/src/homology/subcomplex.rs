//! Weight pieces of the de Rham-Witt, relative, lift and Steenbrink-row complexes.

use super::{ComplexPresentation, IntMatrix};
use crate::drw::{coordinates, relative_keys, BasisKey, DrwElement};
use crate::error::{Error, Result};
use crate::lift_dr::{self, LiftForm};
use crate::weights::{LocalModel, Weight};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Variant {
    /// `W_m Lambda` in weight `k`.
    Absolute,
    /// The relative complex over the log point on the `k+` class of `k`.
    Relative,
    /// The lifted log de Rham complex in the p-basic basis (integral `k`).
    Lift,
    /// Row `j` of the Steenbrink double complex on the `k+` class of `k`.
    SteenbrinkRow(usize),
}

impl std::fmt::Display for Variant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Variant::Absolute => write!(f, "absolute"),
            Variant::Relative => write!(f, "relative"),
            Variant::Lift => write!(f, "lift"),
            Variant::SteenbrinkRow(j) => write!(f, "steenbrink-row:{j}"),
        }
    }
}

impl std::str::FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "absolute" => Ok(Variant::Absolute),
            "relative" => Ok(Variant::Relative),
            "lift" => Ok(Variant::Lift),
            _ => match s.strip_prefix("steenbrink-row:") {
                Some(j) => j
                    .parse()
                    .map(Variant::SteenbrinkRow)
                    .map_err(|_| Error::Malformed(format!("bad row index in {s}"))),
                None => Err(Error::Malformed(format!("unknown variant {s}"))),
            },
        }
    }
}

/// The weight `k` piece of the chosen complex.
pub fn weight_subcomplex(model: &LocalModel, m: u32, k: &Weight, variant: Variant) -> Result<ComplexPresentation> {
    k.validate(model)?;
    match variant {
        Variant::Absolute => {
            let keys = DrwElement::keys_of_weight(model, k);
            drw_presentation(model, m, group_by_degree(model, keys), 0, |x| x.differential())
        }
        Variant::Relative => {
            let keys = relative_keys(model, &k.k_plus());
            // the relative complex of a log point model
            DrwElement::theta(model, m)?;
            drw_presentation(model, m, group_by_degree(model, keys), 0, |x| {
                x.differential()?.to_relative()
            })
        }
        Variant::Lift => lift_presentation(model, m, k),
        Variant::SteenbrinkRow(j) => crate::filtration_ss::steenbrink_row(model, m, &k.k_plus(), j),
    }
}

/// Splits keys into degrees `0..=generators`.
pub fn group_by_degree(model: &LocalModel, keys: Vec<BasisKey>) -> Vec<Vec<BasisKey>> {
    let mut out = vec![Vec::new(); model.generators() + 1];
    for k in keys {
        let d = k.degree();
        out[d].push(k);
    }
    out
}

/// Order exponent of the generator `eps(p^u, key)` at level `m`.
pub fn generator_order(model: &LocalModel, m: u32, key: &BasisKey) -> u32 {
    m.saturating_sub(key.u(model.p))
}

/// Presents a complex whose groups are spanned by `eps(p^u, key)` and whose maps are
/// given by `op`. Dead keys are dropped.
pub fn drw_presentation(
    model: &LocalModel,
    m: u32,
    bases: Vec<Vec<BasisKey>>,
    lo: i32,
    op: impl Fn(&DrwElement) -> Result<DrwElement>,
) -> Result<ComplexPresentation> {
    let groups = bases
        .into_iter()
        .map(|keys| vec![Block { model: *model, keys }])
        .collect();
    block_presentation(model.p, m, lo, groups, |_, _, x| Ok(vec![op(x)?]))
}

/// A summand of a group: the span of `eps(p^u, key)` over a key list of one model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub model: LocalModel,
    pub keys: Vec<BasisKey>,
}

/// Presents a complex whose groups are direct sums of blocks. `op(i, b, x)` maps a
/// generator `x` of block `b` in group `i` to its components in the blocks of group
/// `i + 1`. Dead keys are dropped.
pub fn block_presentation(
    p: u64,
    m: u32,
    lo: i32,
    groups: Vec<Vec<Block>>,
    op: impl Fn(usize, usize, &DrwElement) -> Result<Vec<DrwElement>>,
) -> Result<ComplexPresentation> {
    let groups: Vec<Vec<Block>> = groups
        .into_iter()
        .map(|g| {
            g.into_iter()
                .map(|b| Block {
                    keys: b.keys.into_iter().filter(|k| k.alive_at(p, m)).collect(),
                    model: b.model,
                })
                .collect()
        })
        .collect();
    let orders: Vec<Vec<u32>> = groups
        .iter()
        .map(|g| {
            g.iter()
                .flat_map(|b| b.keys.iter().map(|k| generator_order(&b.model, m, k)))
                .collect()
        })
        .collect();
    let mut maps = Vec::new();
    for i in 0..groups.len().saturating_sub(1) {
        let (src, dst) = (&groups[i], &groups[i + 1]);
        let mut mat = IntMatrix::zeros(orders[i + 1].len(), orders[i].len());
        let mut col = 0;
        for (bi, block) in src.iter().enumerate() {
            for key in &block.keys {
                let x = generator(&block.model, m, key)?;
                let images = op(i, bi, &x)?;
                if images.len() != dst.len() {
                    return Err(Error::Shape(format!(
                        "map {i} returned {} components for {} blocks",
                        images.len(),
                        dst.len()
                    )));
                }
                let mut row = 0;
                for (y, target) in images.iter().zip(dst) {
                    for (r, v) in coordinates(y, &target.keys)?.into_iter().enumerate() {
                        if v != 0 {
                            let pu = p.pow(target.keys[r].u(p));
                            debug_assert_eq!(v % pu, 0);
                            mat.set(row + r, col, (v / pu) as i128);
                        }
                    }
                    row += target.keys.len();
                }
                col += 1;
            }
        }
        maps.push(mat);
    }
    ComplexPresentation::new(p, lo, orders, maps)
}

/// `eps(p^u, key)`, the generator of the cyclic summand of `key`.
pub fn generator(model: &LocalModel, m: u32, key: &BasisKey) -> Result<DrwElement> {
    let c = num_bigint::BigInt::from(model.p).pow(key.u(model.p));
    DrwElement::from_terms(model, m, [(key.clone(), c)])
}

fn lift_presentation(model: &LocalModel, m: u32, k: &Weight) -> Result<ComplexPresentation> {
    if !k.is_integral() {
        return Err(Error::NotIntegral(format!("lift complex needs integral weight, got {k}")));
    }
    let (raw, basic, mat) = lift_dr::p_basic_matrix(model, m, k)?;
    let bases = group_by_degree(model, basic.clone());
    let orders = bases.iter().map(|b| vec![m; b.len()]).collect();
    let q = model.p.pow(m);
    let mut maps = Vec::new();
    for i in 0..bases.len() - 1 {
        let (src, dst) = (&bases[i], &bases[i + 1]);
        let mut out = IntMatrix::zeros(dst.len(), src.len());
        for (c, key) in src.iter().enumerate() {
            let dphi: LiftForm = lift_dr::make_p_basic(model, m, key)?.d_lift();
            let coords = lift_dr::solve_unimodular(model.p, q, &mat, &lift_dr::raw_coordinates(&dphi, &raw)?)?;
            for (pos, v) in coords.into_iter().enumerate() {
                if v == 0 {
                    continue;
                }
                let r = dst
                    .iter()
                    .position(|x| *x == basic[pos])
                    .ok_or_else(|| Error::Shape("differential leaves the degree".into()))?;
                out.set(r, c, v as i128);
            }
        }
        maps.push(out);
    }
    ComplexPresentation::new(model.p, 0, orders, maps)
}
