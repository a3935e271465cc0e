mod common;

use std::collections::BTreeSet;

use num_bigint::BigUint;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trischeme::actions::{self, build_agl_h, build_projective, build_pgu3, build_psu3, build_sym_alt, Flavor};
use trischeme::permgrp::{
    compose, group_order, inverse, is_two_transitive, orbit_with_tree, stabilizer, transporter, two_point_stabilizer,
    Perm, PermGroup,
};

fn perm_strategy(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n).collect::<Vec<usize>>()).prop_shuffle().prop_map(|v| Perm::from_images(v).unwrap())
}

fn group_strategy() -> impl Strategy<Value = PermGroup> {
    (3usize..9).prop_flat_map(|n| prop::collection::vec(perm_strategy(n), 1..4).prop_map(move |g| PermGroup::new(n, g).unwrap()))
}

/// Ordered pairs of distinct points reachable from (0,1), by brute force.
fn pair_orbit_size(g: &PermGroup) -> usize {
    let mut seen = BTreeSet::from([(0, 1)]);
    let mut stack = vec![(0, 1)];
    while let Some((x, y)) = stack.pop() {
        for p in g.generators() {
            let img = (p.apply(x), p.apply(y));
            if seen.insert(img) {
                stack.push(img);
            }
        }
    }
    seen.len()
}

proptest! {
    #[test]
    fn inverse_is_an_involution(p in perm_strategy(9)) {
        prop_assert_eq!(inverse(&inverse(&p)), p.clone());
        prop_assert!(compose(&p, &inverse(&p)).unwrap().is_identity());
    }

    #[test]
    fn composition_is_associative(a in perm_strategy(7), b in perm_strategy(7), c in perm_strategy(7)) {
        let left = compose(&compose(&a, &b).unwrap(), &c).unwrap();
        let right = compose(&a, &compose(&b, &c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn transporters_reach_every_orbit_point(g in group_strategy(), root in 0usize..3) {
        let tree = orbit_with_tree(&g, root).unwrap();
        for &y in tree.orbit() {
            prop_assert_eq!(transporter(&tree, y).unwrap().apply(root), y);
        }
    }

    #[test]
    fn orbit_stabilizer(g in group_strategy(), x in 0usize..3) {
        let orbit = orbit_with_tree(&g, x).unwrap().orbit().len();
        let stab = stabilizer(&g, x).unwrap();
        prop_assert!(stab.generators().iter().all(|p| p.apply(x) == x));
        prop_assert_eq!(group_order(&stab) * BigUint::from(orbit), group_order(&g));
    }

    #[test]
    fn two_point_stabilizer_fixes_both(g in group_strategy()) {
        let st = two_point_stabilizer(&g, 0, 1).unwrap();
        prop_assert!(st.generators().iter().all(|p| p.apply(0) == 0 && p.apply(1) == 1));
    }

    #[test]
    fn two_transitivity_matches_brute_force(g in group_strategy()) {
        let n = g.degree();
        prop_assert_eq!(is_two_transitive(&g).unwrap(), pair_orbit_size(&g) == n * (n - 1));
    }
}

#[test]
fn orbit_examples() {
    let (s4, _) = build_sym_alt(4, false).unwrap();
    assert_eq!(orbit_with_tree(&s4, 0).unwrap().orbit().len(), 4);
    let trivial = PermGroup::trivial(5);
    assert_eq!(orbit_with_tree(&trivial, 2).unwrap().orbit(), &[2]);
    let (agl15, _) = build_agl_h(1, 5, 1, 1).unwrap();
    let st = two_point_stabilizer(&agl15, 0, 1).unwrap();
    assert_eq!(orbit_with_tree(&st, 2).unwrap().orbit().len(), 1);
}

#[test]
fn transporter_in_s3() {
    let (s3, _) = build_sym_alt(3, false).unwrap();
    let tree = orbit_with_tree(&s3, 0).unwrap();
    assert!(transporter(&tree, 0).unwrap().is_identity());
    assert_eq!(transporter(&tree, 2).unwrap().apply(0), 2);
}

#[test]
fn stabilizer_orders() {
    let (s4, _) = build_sym_alt(4, false).unwrap();
    assert_eq!(group_order(&stabilizer(&s4, 0).unwrap()), BigUint::from(6u32));
    assert_eq!(group_order(&stabilizer(&PermGroup::trivial(4), 1).unwrap()), BigUint::from(1u32));
    let (pgl25, _) = build_projective(2, 5, Flavor::Pgl).unwrap();
    assert_eq!(group_order(&pgl25), BigUint::from(120u32));
    assert_eq!(group_order(&stabilizer(&pgl25, 0).unwrap()), BigUint::from(20u32));
}

#[test]
fn two_point_stabilizer_orbits() {
    for n in [5, 6, 7] {
        let (g, _) = build_sym_alt(n, false).unwrap();
        let st = two_point_stabilizer(&g, 0, 1).unwrap();
        assert_eq!(orbit_with_tree(&st, 2).unwrap().orbit().len(), n - 2);
    }
    let (a4, _) = build_sym_alt(4, true).unwrap();
    let st = two_point_stabilizer(&a4, 0, 1).unwrap();
    assert!(st.generators().iter().all(|p| p.is_identity()));
    let (agl17, _) = build_agl_h(1, 7, 1, 1).unwrap();
    let st = two_point_stabilizer(&agl17, 0, 1).unwrap();
    assert_eq!(st.orbits().iter().filter(|o| o.len() == 1).count(), 7);
    assert!(two_point_stabilizer(&agl17, 3, 3).is_err());
}

#[test]
fn two_transitivity_examples() {
    let (s4, _) = build_sym_alt(4, false).unwrap();
    assert!(is_two_transitive(&s4).unwrap());
    let cyclic = PermGroup::new(4, vec![Perm::from_cycles(4, &[&[0, 1, 2, 3]]).unwrap()]).unwrap();
    assert!(!is_two_transitive(&cyclic).unwrap());
    assert!(is_two_transitive(&PermGroup::trivial(2)).is_err());
    let (hs, _) = actions::load_sporadic("HS", &actions::default_data_dir()).unwrap();
    assert_eq!(hs.degree(), 176);
    assert!(is_two_transitive(&hs).unwrap());
}

#[test]
fn orders_of_families() {
    let (s5, _) = build_sym_alt(5, false).unwrap();
    assert_eq!(group_order(&s5), BigUint::from(120u32));
    let (pgu, _) = build_pgu3(2).unwrap();
    let (psu, _) = build_psu3(2).unwrap();
    assert_eq!(group_order(&pgu), group_order(&psu) * BigUint::from(3u32));
}

#[test]
fn random_words_stay_in_the_group() {
    let (g, _) = build_projective(2, 7, Flavor::Psl).unwrap();
    let chain = trischeme::permgrp::StabChain::new(&g, &[]).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..50 {
        assert!(chain.contains(&common::random_element(&g, 20, &mut rng)));
    }
    // PSL(2,7) on 8 points contains no transpositions
    assert!(!chain.contains(&Perm::from_cycles(8, &[&[0, 1]]).unwrap()));
}

#[test]
fn known_order_chains_agree_with_the_deterministic_ones() {
    for (n, alternating) in [(6, false), (7, true), (9, false), (12, true)] {
        let (g, _) = build_sym_alt(n, alternating).unwrap();
        assert!(g.known_order().is_some());
        let plain = PermGroup::new(n, g.generators().to_vec()).unwrap();
        assert_eq!(group_order(&g), group_order(&plain));
        let a = two_point_stabilizer(&g, 0, 1).unwrap();
        let b = two_point_stabilizer(&plain, 0, 1).unwrap();
        assert_eq!(group_order(&a), group_order(&b));
        let sets = |g: &PermGroup| g.orbits().into_iter().map(BTreeSet::from_iter).collect::<BTreeSet<BTreeSet<usize>>>();
        assert_eq!(sets(&a), sets(&b));
    }
    // an overstated order falls back to the full check
    let (pgl, _) = build_projective(2, 5, Flavor::Pgl).unwrap();
    let inflated = pgl.clone().with_known_order(BigUint::from(240u32));
    assert_eq!(group_order(&inflated), BigUint::from(120u32));
}

#[test]
fn large_symmetric_groups_are_two_transitive() {
    let (g, _) = build_sym_alt(250, false).unwrap();
    assert!(is_two_transitive(&g).unwrap());
    let (a, _) = build_sym_alt(201, true).unwrap();
    let st = two_point_stabilizer(&a, 0, 1).unwrap();
    assert_eq!(orbit_with_tree(&st, 2).unwrap().orbit().len(), 199);
}
