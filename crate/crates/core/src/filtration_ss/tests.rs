use super::*;
use crate::homology::{homology_of, HomologyReport};
use crate::weights::weight_grid;

fn models() -> Vec<LocalModel> {
    vec![
        LocalModel::semistable(3, 2, 2, 0, 2).unwrap(),
        LocalModel::semistable(2, 3, 2, 1, 2).unwrap(),
        LocalModel::semistable(2, 3, 3, 0, 3).unwrap(),
    ]
}

fn sncd() -> LocalModel {
    LocalModel::poly(3, 2, 2, 1).unwrap()
}

fn all_keys(model: &LocalModel, m: u32, max_num: u64, max_den: u32) -> Vec<BasisKey> {
    weight_grid(model, max_num, max_den)
        .iter()
        .flat_map(|k| DrwElement::keys_of_weight(model, k))
        .filter(|k| k.alive_at(model.p, m))
        .collect()
}

#[test]
fn strata_are_polynomial_models() {
    let model = LocalModel::semistable(2, 3, 3, 0, 3).unwrap();
    let st = stratum(&model, &[0, 2]).unwrap();
    assert_eq!(st.model, LocalModel::poly(2, 1, 0, 0).unwrap());
    assert_eq!(st.index_map, vec![None, Some(0), None]);
    assert_eq!(stratum(&model, &[]).unwrap().model, model);
    assert!(stratum(&model, &[1, 1]).is_err());
    assert_eq!(strata_sets(&model, 2).unwrap().len(), 3);
    assert!(stratum(&LocalModel::semistable(2, 3, 3, 0, 2).unwrap(), &[0]).is_err());
}

#[test]
fn residue_inverts_wedge() {
    for model in models().into_iter().chain([sncd()]) {
        for key in all_keys(&model, 2, 2, 1) {
            let (set, r, neg) = residue_key(&model, &key).unwrap();
            let (back, neg2) = wedge_key(&model, &set, &r).unwrap();
            assert_eq!(back, key);
            assert_eq!(neg, neg2);
        }
    }
}

#[test]
fn wedge_matches_product_with_dlogs() {
    for model in models().into_iter().chain([sncd()]) {
        let m = 2;
        for set_size in 1..=model.e {
            for set in strata_sets(&model, set_size).unwrap() {
                let st = stratum(&model, &set).unwrap();
                for key in all_keys(&st.model, m, 2, 1) {
                    let y = generator(&st.model, m, &key).unwrap();
                    let a = wedge_from_stratum(&model, &set, &y).unwrap();
                    let b = wedge_via_product(&model, &set, &y).unwrap();
                    assert_eq!(a, b, "{set:?} {key:?}");
                    let back = residue(&a, set.len()).unwrap();
                    assert_eq!(back.get(&set), Some(&y));
                }
            }
        }
    }
}

#[test]
fn residue_rejects_higher_levels() {
    let model = LocalModel::semistable(3, 2, 2, 0, 2).unwrap();
    let x = DrwElement::dlog_x(&model, 1, 0).unwrap();
    assert!(residue(&x, 0).is_err());
    assert_eq!(residue(&x, 1).unwrap().len(), 1);
    assert!(residue(&x, 2).unwrap().is_empty());
}

#[test]
fn gys1_square_commutes() {
    for model in models() {
        for key in all_keys(&model, 2, 2, 1) {
            let x = generator(&model, 2, &key).unwrap();
            assert!(gys1_holds(&x, filtration_level(&key)).unwrap(), "{key:?}");
        }
    }
}

#[test]
fn pole_count_filtration_is_the_image_filtration() {
    for model in [LocalModel::semistable(3, 2, 2, 0, 2).unwrap(), sncd()] {
        for k in weight_grid(&model, 2, 1) {
            for deg in 0..=model.generators() {
                for j in 0..=model.e {
                    assert!(p_characterization_holds(&model, 2, &k, deg, j).unwrap(), "{k} {deg} {j}");
                }
            }
        }
    }
}

#[test]
fn steenbrink_squares_anticommute_and_rows_close() {
    for model in models() {
        for kplus in plus_weight_grid(&model, 2, 1) {
            let st = Steenbrink::new(&model, 2, &kplus).unwrap();
            assert!(st.squares_anticommute().unwrap(), "{kplus}");
            for j in 0..model.e {
                st.row(j).unwrap();
            }
        }
    }
}

#[test]
fn columns_resolve_the_relative_complex() {
    for model in models() {
        for m in 1..=2 {
            for kplus in plus_weight_grid(&model, 2, 1) {
                let st = Steenbrink::new(&model, m, &kplus).unwrap();
                for i in 0..model.generators() {
                    let h = homology_of(&st.resolution(i).unwrap()).unwrap();
                    assert!(h.is_zero(), "{kplus} i={i}: {h}");
                }
                let (tot, _) = st.total().unwrap();
                let a = homology_of(&tot).unwrap();
                let b = homology_of(&st.relative().unwrap()).unwrap();
                assert!(a.same_groups(&b), "{kplus}: {a} vs {b}");
            }
        }
    }
}

#[test]
fn d1_is_the_restriction_map() {
    for model in models() {
        for kplus in plus_weight_grid(&model, 2, 1) {
            let st = Steenbrink::new(&model, 2, &kplus).unwrap();
            assert!(d1_identification_holds(&st).unwrap(), "{kplus}");
        }
    }
}

fn e1_matches_strata(model: &LocalModel, m: u32) {
    for kplus in plus_weight_grid(model, 2, 1) {
        let (c, filt) = filtered_class(model, m, &kplus).unwrap();
        let e1 = filtered_page(&c, &filt, 1).unwrap();
        assert_eq!(e1, graded_homology(&c, &filt).unwrap(), "{kplus}");
        assert_eq!(e1, strata_prediction(model, m, &kplus).unwrap(), "{kplus}");
        let einf = filtered_page(&c, &filt, limit_page(&filt)).unwrap();
        let total: HomologyReport = homology_of(&c).unwrap();
        for h in 0..c.len() as i32 {
            let len: u32 = einf.iter().filter(|((_, x), _)| *x == h).map(|(_, d)| d.iter().sum::<u32>()).sum();
            assert_eq!(len, total.length(h), "{kplus} h={h}");
        }
    }
}

#[test]
fn e1_is_stratum_cohomology() {
    for model in models() {
        e1_matches_strata(&model, 1);
        e1_matches_strata(&model, 2);
    }
    e1_matches_strata(&sncd(), 2);
}

#[test]
fn e1_page_aggregates() {
    let model = LocalModel::semistable(3, 2, 2, 0, 2).unwrap();
    let page = e1_page(&model, 2, 2, 1).unwrap();
    for (h, d) in &page.abutment {
        let len: u32 = page.e_inf.iter().filter(|((pk, q), _)| pk + q == *h).map(|(_, d)| d.iter().sum::<u32>()).sum();
        assert_eq!(len, d.iter().sum::<u32>());
    }
    for ((pk, q), entry) in &page.e1 {
        assert!(!entry.divisors.is_empty());
        for (j, codim, twist) in &entry.strata {
            assert_eq!(*codim as i32, 2 * *j as i32 - pk + 1);
            assert_eq!(*twist, -(*j as i32) + pk);
            let _ = q;
        }
    }
}

#[test]
fn frobenius_on_column_zero() {
    let model = LocalModel::semistable(3, 2, 2, 0, 2).unwrap();
    let m = 2;
    for key in all_keys(&model, m, 3, 0) {
        let lvl = filtration_level(&key);
        if key.degree() != lvl {
            continue;
        }
        // cells A^{0j} with j = lvl - 1
        if lvl == 0 {
            continue;
        }
        let x = generator(&model, m, &key).unwrap();
        let a = phi_tilde(&model, &x, lvl - 1).unwrap();
        let b = project_above(&underline_pf(&x, 0).unwrap(), lvl);
        assert_eq!(a, b, "{key:?}");
    }
}

#[test]
fn witt_frobenius_is_frobenius_in_degree_zero() {
    let model = LocalModel::poly(3, 1, 0, 0).unwrap();
    for key in all_keys(&model, 2, 4, 1) {
        if key.degree() != 0 {
            continue;
        }
        let x = generator(&model, 2, &key).unwrap();
        assert_eq!(witt_frobenius(&x).unwrap(), underline_pf(&x, 0).unwrap(), "{key:?}");
    }
}

#[test]
fn psi_commutes_with_differentials() {
    for model in models() {
        for kplus in plus_weight_grid(&model, 3, 0) {
            let st = Steenbrink::new(&model, 2, &kplus).unwrap();
            assert!(psi_commutes(&st).unwrap(), "{kplus}");
        }
    }
}

#[test]
fn gr_conjugation() {
    for model in models() {
        for m in 1..=2 {
            for kplus in plus_weight_grid(&model, 3, 1) {
                let st = Steenbrink::new(&model, m, &kplus).unwrap();
                for (i, j) in st.cells() {
                    for key in st.cell(i, j) {
                        assert!(gr_conjugation_holds(&st, i, j, &key).unwrap(), "({i},{j}) {key:?}");
                    }
                }
            }
        }
    }
}

#[test]
fn frobenius_factors_through_restriction() {
    let model = LocalModel::semistable(2, 2, 2, 0, 2).unwrap();
    let keys = all_keys(&model, 1, 3, 0);
    for m in 1..=2 {
        for i in 0..=model.generators() {
            let zero = DrwElement::zero(&model, 1).unwrap();
            for a in keys.iter().filter(|k| k.degree() == i) {
                let y = generator(&model, 1, a).unwrap();
                assert!(kills_restriction_kernel(&y, &zero, m, i as u32).unwrap(), "{a:?}");
                for b in keys.iter().filter(|k| k.degree() + 1 == i) {
                    let y2 = generator(&model, 1, b).unwrap();
                    assert!(kills_restriction_kernel(&zero, &y2, m, i as u32).unwrap(), "{b:?}");
                    assert!(kills_restriction_kernel(&y, &y2, m, i as u32).unwrap(), "{a:?} {b:?}");
                }
            }
        }
    }
}

#[test]
fn residue_is_a_signed_permutation() {
    for model in models().into_iter().chain([sncd()]) {
        for k in weight_grid(&model, 2, 1) {
            let mat = residue_matrix(&model, 2, &k).unwrap();
            assert!(is_signed_permutation(&mat), "{k}: {mat:?}");
        }
    }
}
