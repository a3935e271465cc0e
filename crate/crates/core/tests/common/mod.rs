#![allow(dead_code)]

use rand::Rng;
use trischeme::permgrp::{Perm, PermGroup};
use trischeme::scheme::{Label, TripleScheme};

/// A random word of the given length in the generators of `g`.
pub fn random_element(g: &PermGroup, len: usize, rng: &mut impl Rng) -> Perm {
    let gens = g.generators();
    (0..len).fold(Perm::identity(g.degree()), |acc, _| acc.then(&gens[rng.gen_range(0..gens.len())]))
}

/// The unique nontrivial label with this third valency.
pub fn label_with_valency(s: &TripleScheme, v: usize) -> Label {
    let found: Vec<Label> = (4..s.size()).filter(|&i| s.third_valency(i) == v).collect();
    assert_eq!(found.len(), 1, "valency {v} is not unique in {s:?}");
    found[0]
}
