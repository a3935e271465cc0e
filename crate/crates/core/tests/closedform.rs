use std::collections::BTreeMap;

use proptest::prelude::*;

use trischeme::actions::{self, ActionSpec, Epsilon, Flavor, SPORADIC};
use trischeme::closedform::{
    match_predicted, predict, predict_agl_h, predict_projective, predict_psl2_tensor, predict_pgl_tensor,
    predict_ree, predict_sp, predict_suzuki, resolve_anchors, sporadic_prediction, table_tsv, ClosedFormError,
    MatchReport, Prediction, RelLabel,
};
use trischeme::scheme::{build_scheme, build_scheme_from_stabilizer, intersection_tensor, triple_orbit_oracle};
use trischeme::Tensor;

fn check(spec: &ActionSpec) -> MatchReport {
    let pred = predict(spec).unwrap();
    check_with(spec, &pred)
}

fn check_with(spec: &ActionSpec, pred: &Prediction) -> MatchReport {
    let (g, domain) = spec.build_group().unwrap();
    let s = build_scheme(&g).unwrap();
    let t: Tensor = intersection_tensor(&s).unwrap();
    let fixed = match &pred.tensor {
        Some(pt) => resolve_anchors(&s, &domain, pt).unwrap(),
        None => BTreeMap::new(),
    };
    match_predicted(&s, Some(&t), pred, &fixed)
}

#[test]
fn stored_tables_match_the_embedded_data() {
    let dir = actions::default_data_dir().join("tables");
    for n in 1..=5u8 {
        let stored = std::fs::read_to_string(dir.join(format!("table{n}.tsv"))).unwrap();
        assert_eq!(stored, table_tsv(n).unwrap(), "table {n}");
    }
    assert!(matches!(table_tsv(6), Err(ClosedFormError::UnknownTable(_))));
}

#[test]
fn sporadic_rows_match_computed_schemes() {
    let dir = actions::default_data_dir();
    for (key, _, _) in SPORADIC {
        let (g, _) = actions::load_sporadic(key, &dir).unwrap();
        let s = build_scheme(&g).unwrap();
        let pred = sporadic_prediction(key).unwrap();
        assert_eq!(pred.scheme.nu, g.degree() as u64);
        assert!(pred.scheme.is_consistent(), "{key}");
        let t: Tensor = intersection_tensor(&s).unwrap();
        let r = match_predicted(&s, Some(&t), &pred, &BTreeMap::new());
        assert!(r.passed(), "{key}: {r:?}");
        assert_eq!(r.tensor.is_some(), ["PSL2_11", "A7", "HS", "CO3"].contains(key));
    }
    assert!(sporadic_prediction("J1").is_err());
}

#[test]
fn table_valencies_agree_with_table_one() {
    for key in ["PSL2_11", "A7", "HS", "CO3"] {
        let pred = sporadic_prediction(key).unwrap();
        let t = pred.tensor.unwrap();
        let mut from_entries: Vec<u64> = t.labels.iter().map(|&l| t.derived_valency(l)).collect();
        from_entries.sort();
        let mut listed: Vec<u64> = pred.scheme.valencies.iter().flat_map(|&(v, m)| vec![v; m as usize]).collect();
        listed.sort();
        assert_eq!(from_entries, listed, "{key}");
    }
}

#[test]
fn hs_bijection_is_found() {
    let (g, _) = actions::load_sporadic("HS", &actions::default_data_dir()).unwrap();
    let s = build_scheme(&g).unwrap();
    let t: Tensor = intersection_tensor(&s).unwrap();
    let r = match_predicted(&s, Some(&t), &sporadic_prediction("HS").unwrap(), &BTreeMap::new());
    let b: BTreeMap<String, usize> = r.tensor.unwrap().bijection.into_iter().collect();
    for (name, valency) in [("4", 72), ("5", 90), ("6", 12)] {
        assert_eq!(s.third_valency(b[name]), valency);
    }
}

#[test]
fn projective_predictions() {
    let specs = [
        ActionSpec::Projective { k: 2, n: 5, flavor: Flavor::Pgl },
        ActionSpec::Projective { k: 2, n: 8, flavor: Flavor::PGammaL },
        ActionSpec::Projective { k: 2, n: 5, flavor: Flavor::Psl },
        ActionSpec::Projective { k: 2, n: 7, flavor: Flavor::Psl },
        ActionSpec::Projective { k: 2, n: 9, flavor: Flavor::Psl },
        ActionSpec::Projective { k: 2, n: 11, flavor: Flavor::Psl },
        ActionSpec::Projective { k: 2, n: 4, flavor: Flavor::Psl },
        ActionSpec::Projective { k: 2, n: 7, flavor: Flavor::PSigmaL },
        ActionSpec::Projective { k: 3, n: 2, flavor: Flavor::Pgl },
        ActionSpec::Projective { k: 3, n: 3, flavor: Flavor::Psl },
        ActionSpec::Projective { k: 4, n: 2, flavor: Flavor::Pgl },
    ];
    for spec in &specs {
        let r = check(spec);
        assert!(r.passed(), "{spec:?}: {r:?}");
        assert!(r.tensor.unwrap().entries_checked > 0);
    }
    assert!(matches!(
        predict(&ActionSpec::Projective { k: 2, n: 9, flavor: Flavor::PSigmaL }),
        Err(ClosedFormError::Unsupported(_))
    ));
}

#[test]
fn psl2_tensor_pairs_w_and_s() {
    // swapping w and s maps the tensor to itself
    for n in [5, 7, 9, 11, 13] {
        let t = predict_psl2_tensor(n).unwrap();
        let swap = |l: RelLabel| match l {
            RelLabel::W => RelLabel::S,
            RelLabel::S => RelLabel::W,
            other => other,
        };
        for (&[i, j, k, l], &v) in &t.entries {
            assert_eq!(t.get(swap(i), swap(j), swap(k), swap(l)), v, "n = {n}");
        }
        assert_eq!(t.derived_valency(RelLabel::W), (n - 1) / 2);
        assert_eq!(t.derived_valency(RelLabel::S), (n - 1) / 2);
    }
    assert!(predict_psl2_tensor(8).is_err());
}

#[test]
fn affine_predictions() {
    let specs = [
        ActionSpec::AglH { k: 1, p: 5, alpha: 1, frak_a: 1 },
        ActionSpec::AglH { k: 1, p: 7, alpha: 1, frak_a: 1 },
        ActionSpec::AglH { k: 1, p: 2, alpha: 3, frak_a: 1 },
        ActionSpec::AglH { k: 1, p: 2, alpha: 3, frak_a: 3 },
        ActionSpec::AglH { k: 1, p: 2, alpha: 4, frak_a: 2 },
        ActionSpec::AglH { k: 1, p: 3, alpha: 2, frak_a: 1 },
        ActionSpec::AglH { k: 2, p: 3, alpha: 1, frak_a: 1 },
        ActionSpec::AglH { k: 2, p: 2, alpha: 2, frak_a: 1 },
        ActionSpec::AglH { k: 3, p: 2, alpha: 1, frak_a: 1 },
    ];
    for spec in &specs {
        let r = check(spec);
        assert!(r.passed(), "{spec:?}: {r:?}");
    }
}

#[test]
fn affine_sizes_agree_with_the_orbit_oracle() {
    for (k, p, alpha, frak_a) in [(1, 5, 1, 1), (1, 2, 3, 1), (2, 3, 1, 1), (2, 2, 1, 1), (1, 3, 2, 1)] {
        let (g, _) = actions::build_agl_h(k, p, alpha, frak_a).unwrap();
        let oracle = triple_orbit_oracle(&g, 30).unwrap();
        let pred = predict_agl_h(k as u32, p, alpha, frak_a).unwrap();
        assert_eq!(pred.size, oracle.count as u64, "AGL_H({k},{p}^{alpha},{frak_a})");
    }
    assert_eq!(predict_agl_h(1, 5, 1, 1).unwrap().size, 7);
    assert_eq!(predict_agl_h(1, 2, 3, 1).unwrap().size, 6);
    let agl23 = predict_agl_h(2, 3, 1, 1).unwrap();
    assert_eq!((agl23.size, agl23.valencies.clone()), (6, vec![(1, 1), (6, 1)]));
}

#[test]
fn other_families_match() {
    let specs = [
        ActionSpec::SymAlt { n: 5, alternating: false },
        ActionSpec::SymAlt { n: 4, alternating: true },
        ActionSpec::SymAlt { n: 7, alternating: true },
        ActionSpec::Pgu3 { q: 2 },
        ActionSpec::Pgu3 { q: 3 },
        ActionSpec::Psu3 { q: 2 },
        ActionSpec::Psu3 { q: 5 },
        ActionSpec::Sp2k2 { k: 2, epsilon: Epsilon::Plus },
        ActionSpec::Sp2k2 { k: 2, epsilon: Epsilon::Minus },
        ActionSpec::Sp2k2 { k: 3, epsilon: Epsilon::Plus },
        ActionSpec::Sp2k2 { k: 3, epsilon: Epsilon::Minus },
    ];
    for spec in &specs {
        let r = check(spec);
        assert!(r.passed(), "{spec:?}: {r:?}");
    }
}

#[test]
fn stabilizer_families_match() {
    for spec in [ActionSpec::Suzuki { q: 8 }, ActionSpec::Ree { q: 3 }, ActionSpec::Ree { q: 27 }] {
        let st = spec.build_stabilizer().unwrap();
        let s = build_scheme_from_stabilizer(&st).unwrap();
        let r = match_predicted::<u64>(&s, None, &predict(&spec).unwrap(), &BTreeMap::new());
        assert!(r.passed(), "{spec:?}: {r:?}");
    }
}

#[test]
fn perturbed_predictions_are_rejected() {
    let spec = ActionSpec::Projective { k: 3, n: 2, flavor: Flavor::Pgl };
    let mut pred = predict(&spec).unwrap();
    let t = pred.tensor.as_mut().unwrap();
    let (w, x) = (RelLabel::W, RelLabel::X);
    t.set(x, x, x, x, t.get(x, x, x, x) + 1);
    let r = check_with(&spec, &pred);
    assert!(!r.passed());
    let tm = r.tensor.unwrap();
    assert!(!tm.matched);
    assert!(tm.discrepancy.is_some());

    let mut pred = predict(&spec).unwrap();
    pred.scheme.size += 1;
    let r = check_with(&spec, &pred);
    assert!(!r.size_ok && r.valencies_ok);

    // anchored labels cannot be swapped
    let mut pred = predict(&spec).unwrap();
    let t = pred.tensor.as_mut().unwrap();
    for a in t.anchors.iter_mut() {
        a.0 = if a.0 == w { x } else { w };
    }
    assert!(!check_with(&spec, &pred).passed());
}

#[test]
fn pgl_tensor_without_anchors_still_matches() {
    let spec = ActionSpec::Projective { k: 3, n: 3, flavor: Flavor::Pgl };
    let mut pred = predict(&spec).unwrap();
    pred.tensor.as_mut().unwrap().anchors.clear();
    assert!(check_with(&spec, &pred).passed());
    let t = predict_pgl_tensor(3, 3).unwrap();
    assert_eq!(t.derived_valency(RelLabel::W), 2);
    assert_eq!(t.derived_valency(RelLabel::X), 9);
}

proptest! {
    #[test]
    fn projective_valencies_add_up(k in 2u32..5, n in prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27])) {
        for flavor in [Flavor::Psl, Flavor::Pgl, Flavor::PGammaL] {
            prop_assert!(predict_projective(k, n, flavor).unwrap().is_consistent());
        }
        let t = predict_pgl_tensor(k, n).unwrap();
        for &l in &t.labels {
            prop_assert_eq!(t.derived_valency(l), t.valency[&l]);
        }
    }

    #[test]
    fn affine_valencies_add_up(k in 1u32..4, p in prop::sample::select(vec![2u32, 3, 5, 7]), alpha in 1u32..5) {
        for frak_a in (1..=alpha).filter(|d| alpha % d == 0) {
            if (p as u64).pow(alpha * k) > 1 << 20 {
                continue;
            }
            prop_assert!(predict_agl_h(k, p, alpha, frak_a).unwrap().is_consistent());
        }
    }

    #[test]
    fn other_valencies_add_up(k in 2u32..8, e in 1u32..6) {
        prop_assert!(predict_sp(k, Epsilon::Plus).unwrap().is_consistent());
        prop_assert!(predict_sp(k, Epsilon::Minus).unwrap().is_consistent());
        let q3 = 3u64.pow(2 * e - 1);
        prop_assert!(predict_ree(q3).unwrap().is_consistent());
        if e >= 2 {
            prop_assert!(predict_suzuki(2u64.pow(2 * e - 1)).unwrap().is_consistent());
        }
    }
}
