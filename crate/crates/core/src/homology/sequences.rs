//! The `theta ^` sequence and the Mayer-Vietoris sequence on one `k+` class.

use super::{block_presentation, group_by_degree, ComplexPresentation, Block};
use crate::drw::{keys_of_plus_class, relative_keys, DrwElement, MvMap, MvTarget};
use crate::error::{Error, Result};
use crate::weights::{LocalModel, Weight};

fn alive(model: &LocalModel, m: u32, kplus: &Weight) -> Vec<crate::drw::BasisKey> {
    keys_of_plus_class(model, kplus)
        .into_iter()
        .filter(|k| k.alive_at(model.p, m))
        .collect()
}

/// `W_m Lambda^0 -> W_m Lambda^1 -> ...` with every map `theta ^`, on the `k+` class.
pub fn theta_complex(model: &LocalModel, m: u32, kplus: &Weight) -> Result<ComplexPresentation> {
    DrwElement::theta(model, m)?;
    let groups = group_by_degree(model, alive(model, m, kplus))
        .into_iter()
        .map(|keys| vec![Block { model: *model, keys }])
        .collect();
    block_presentation(model.p, m, 0, groups, |_, _, x| Ok(vec![x.wedge_theta()?]))
}

/// `theta ^ : Lambda^{i-1} -> Lambda^i` as a two-term complex; its top homology is the
/// relative quotient in degree `i`.
pub fn theta_cokernel(model: &LocalModel, m: u32, kplus: &Weight, i: usize) -> Result<ComplexPresentation> {
    if i == 0 {
        return Err(Error::OutOfRange("the quotient starts in degree 1".into()));
    }
    let by_deg = group_by_degree(model, alive(model, m, kplus));
    let groups = vec![
        vec![Block {
            model: *model,
            keys: by_deg[i - 1].clone(),
        }],
        vec![Block {
            model: *model,
            keys: by_deg[i].clone(),
        }],
    ];
    block_presentation(model.p, m, 0, groups, |_, _, x| Ok(vec![x.wedge_theta()?]))
}

/// Orders of the relative basis in degree `i` (the expected quotient divisors).
pub fn relative_orders(model: &LocalModel, m: u32, kplus: &Weight, i: usize) -> Vec<u32> {
    let mut out: Vec<u32> = relative_keys(model, kplus)
        .into_iter()
        .filter(|k| k.degree() == i && k.alive_at(model.p, m))
        .map(|k| super::generator_order(model, m, &k))
        .collect();
    out.sort();
    out
}

/// The `k+` class on `Z` matching the class on `X`, if the restriction can be nonzero.
fn z_class(x: &LocalModel, kplus: &Weight) -> Option<Weight> {
    let d = x.d - 1;
    if kplus.0[d].is_zero() {
        Some(kplus.drop_positions(&[d]))
    } else {
        None
    }
}

/// `0 -> Lambda_X -> Lambda_{Z_1} + Lambda_{Z_2} -> Lambda_Z -> 0` on the `k+` class,
/// placed in degrees `-1, 0, 1`. The second map is `(a, b) -> a|_Z - b|_Z`.
pub fn mv_sequence(x: &LocalModel, m: u32, kplus: &Weight) -> Result<ComplexPresentation> {
    let r1 = MvMap::from_x(x, MvTarget::Z1)?;
    let r2 = MvMap::from_x(x, MvTarget::Z2)?;
    let z = MvMap::from_x(x, MvTarget::Z)?.target;
    let s1 = MvMap::to_z(x, MvTarget::Z1)?;
    let s2 = MvMap::to_z(x, MvTarget::Z2)?;
    let class = |model: &LocalModel, k: &Weight| -> Vec<crate::drw::BasisKey> {
        if k.validate(model).is_ok() {
            alive(model, m, k)
        } else {
            Vec::new()
        }
    };
    let mut swapped = kplus.clone();
    swapped.0.swap(0, x.d - 1);
    let zkeys = z_class(x, kplus).map(|k| class(&z, &k)).unwrap_or_default();
    let groups = vec![
        vec![Block {
            model: *x,
            keys: class(x, kplus),
        }],
        vec![
            Block {
                model: r1.target,
                keys: class(&r1.target, kplus),
            },
            Block {
                model: r2.target,
                keys: class(&r2.target, &swapped),
            },
        ],
        vec![Block { model: z, keys: zkeys }],
    ];
    block_presentation(x.p, m, -1, groups, |g, b, v| match (g, b) {
        (0, _) => Ok(vec![r1.apply(v)?, r2.apply(v)?]),
        (1, 0) => Ok(vec![s1.apply(v)?]),
        _ => Ok(vec![s2.apply(v)?.neg()]),
    })
}
