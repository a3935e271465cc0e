//! The association scheme on triples of a two-transitive group.
//!
//! Nontrivial relations are the orbits of the two-point stabilizer G_{a,b} on
//! the remaining points; the relation of an arbitrary triple (x,y,z) of
//! distinct points is found by carrying (x,y) to (a,b) along a Schreier tree
//! on ordered pairs and looking up the image of z.

use std::collections::HashMap;
use std::fmt;

use num_traits::PrimInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::actions::StabilizerMapSet;
use crate::permgrp::{bfs_orbit, PermError, Perm, PermGroup, StabChain};

pub type Label = usize;

/// Default cap on ν for exhaustive axiom checks.
pub const EXHAUSTIVE_CAP: usize = 40;
/// Default cap on ν for the brute-force triple-orbit oracle.
pub const ORACLE_CAP: usize = 30;

const NO_LABEL: Label = usize::MAX;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SchemeError {
    #[error("the group is not two-transitive")]
    NotTwoTransitive,
    #[error("the stabilizer map set is not closed under composition")]
    NotClosed,
    #[error("{what}: {nu} points exceeds the cap of {cap}")]
    CapExceeded { what: &'static str, nu: usize, cap: usize },
    #[error("not available for a scheme built from a stabilizer: {0}")]
    Unsupported(&'static str),
    #[error("label {0} out of range")]
    BadLabel(Label),
    #[error(transparent)]
    Perm(#[from] PermError),
}

/// A permutation of the three coordinates. Applying `s` to (t0,t1,t2) gives
/// (t[s0], t[s1], t[s2]).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct S3Perm([u8; 3]);

impl S3Perm {
    pub const ALL: [S3Perm; 6] = [
        S3Perm([0, 1, 2]),
        S3Perm([0, 2, 1]),
        S3Perm([1, 0, 2]),
        S3Perm([1, 2, 0]),
        S3Perm([2, 0, 1]),
        S3Perm([2, 1, 0]),
    ];
    pub const IDENTITY: S3Perm = S3Perm([0, 1, 2]);
    /// (x1,x2,x3) -> (x2,x3,x1)
    pub const ROTATE: S3Perm = S3Perm([1, 2, 0]);
    /// (x1,x2,x3) -> (x1,x3,x2)
    pub const SWAP23: S3Perm = S3Perm([0, 2, 1]);

    pub fn new(s: [u8; 3]) -> Option<Self> {
        let mut seen = [false; 3];
        for &x in &s {
            if x > 2 || seen[x as usize] {
                return None;
            }
            seen[x as usize] = true;
        }
        Some(S3Perm(s))
    }

    pub fn apply<T: Copy>(self, t: [T; 3]) -> [T; 3] {
        [t[self.0[0] as usize], t[self.0[1] as usize], t[self.0[2] as usize]]
    }

    /// The permutation equivalent to applying `self`, then `other`.
    pub fn then(self, other: S3Perm) -> S3Perm {
        S3Perm([self.0[other.0[0] as usize], self.0[other.0[1] as usize], self.0[other.0[2] as usize]])
    }

    pub fn index(self) -> usize {
        S3Perm::ALL.iter().position(|&s| s == self).unwrap()
    }
}

/// Label of a triple with a repeated point, following the fixed order of the
/// trivial relations; `None` for three distinct points.
#[inline]
pub fn trivial_label(x: usize, y: usize, z: usize) -> Option<Label> {
    match (x == y, y == z, x == z) {
        (true, true, _) => Some(0),
        (false, true, _) => Some(1),
        (_, false, true) => Some(2),
        (true, false, _) => Some(3),
        _ => None,
    }
}

/// Schreier tree on the orbit of an ordered pair under componentwise action.
#[derive(Clone)]
struct PairTree {
    nu: usize,
    root: usize,
    inv_gens: Vec<Perm>,
    // generator index along which each pair was reached
    edge: Vec<u16>,
}

const EDGE_NONE: u16 = u16::MAX;
const EDGE_ROOT: u16 = u16::MAX - 1;

impl PairTree {
    fn new(g: &PermGroup, a: usize, b: usize) -> Self {
        let nu = g.degree();
        assert!(g.generators().len() < EDGE_ROOT as usize, "too many generators");
        let root = a * nu + b;
        let mut edge = vec![EDGE_NONE; nu * nu];
        edge[root] = EDGE_ROOT;
        let mut queue = vec![root];
        let mut i = 0;
        while i < queue.len() {
            let pr = queue[i];
            let (x, y) = (pr / nu, pr % nu);
            for (gi, gen) in g.generators().iter().enumerate() {
                let np = gen.apply(x) * nu + gen.apply(y);
                if edge[np] == EDGE_NONE {
                    edge[np] = gi as u16;
                    queue.push(np);
                }
            }
            i += 1;
        }
        PairTree { nu, root, inv_gens: g.generators().iter().map(Perm::inverse).collect(), edge }
    }

    /// Image of `z` under an element carrying (x,y) to the root pair.
    #[inline]
    fn carry(&self, mut x: usize, mut y: usize, mut z: usize) -> usize {
        let mut pr = x * self.nu + y;
        while pr != self.root {
            let gi = self.edge[pr];
            debug_assert!(gi != EDGE_NONE, "pair outside the orbit");
            let h = &self.inv_gens[gi as usize];
            x = h.apply(x);
            y = h.apply(y);
            z = h.apply(z);
            pr = x * self.nu + y;
        }
        z
    }
}

#[derive(Clone)]
pub struct TripleScheme {
    nu: usize,
    base: (usize, usize),
    point_label: Vec<Label>,
    reps: Vec<[usize; 3]>,
    third: Vec<usize>,
    s3: Option<Vec<[Label; 6]>>,
    pair: Option<PairTree>,
}

impl fmt::Debug for TripleScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TripleScheme")
            .field("nu", &self.nu)
            .field("m", &self.m())
            .field("base", &self.base)
            .field("third_valencies", &self.third)
            .finish()
    }
}

/// Labels the orbits of `gens` on the points other than `a`, `b`, from 4 up,
/// in discovery order from the smallest unvisited point.
fn label_orbits(nu: usize, a: usize, b: usize, gens: &[Perm]) -> (Vec<Label>, Vec<[usize; 3]>, Vec<usize>) {
    let mut seen = vec![false; nu];
    seen[a] = true;
    seen[b] = true;
    let mut point_label = vec![NO_LABEL; nu];
    let mut reps = vec![[a, a, a], [a, b, b], [a, b, a], [a, a, b]];
    let mut third = vec![0, 1, 1, 0];
    for c in 0..nu {
        if seen[c] {
            continue;
        }
        let orbit = bfs_orbit(gens, c, &mut seen);
        let label = reps.len();
        for &x in &orbit {
            point_label[x] = label;
        }
        reps.push([a, b, c]);
        third.push(orbit.len());
    }
    (point_label, reps, third)
}

pub fn build_scheme(g: &PermGroup) -> Result<TripleScheme, SchemeError> {
    let nu = g.degree();
    if nu < 3 {
        return Err(SchemeError::NotTwoTransitive);
    }
    let chain = StabChain::new(g, &[0, 1])?;
    if chain.orbit_len(0) != nu || chain.orbit_len(1) != nu - 1 {
        return Err(SchemeError::NotTwoTransitive);
    }
    let stab = chain.stabilizer_group(2);
    let (point_label, reps, third) = label_orbits(nu, 0, 1, stab.generators());
    let mut s = TripleScheme {
        nu,
        base: (0, 1),
        point_label,
        reps,
        third,
        s3: None,
        pair: Some(PairTree::new(g, 0, 1)),
    };
    s.fill_s3();
    Ok(s)
}

/// Sizes and third valencies from an explicit two-point stabilizer.
pub fn build_scheme_from_stabilizer(st: &StabilizerMapSet) -> Result<TripleScheme, SchemeError> {
    if !st.is_closed() {
        return Err(SchemeError::NotClosed);
    }
    let nu = st.domain().len();
    let (a, b) = st.base();
    let (point_label, reps, third) = label_orbits(nu, a, b, st.maps());
    Ok(TripleScheme { nu, base: (a, b), point_label, reps, third, s3: None, pair: None })
}

impl TripleScheme {
    fn fill_s3(&mut self) {
        let table: Vec<[Label; 6]> = self
            .reps
            .iter()
            .map(|&r| {
                let mut row = [0; 6];
                for (i, s) in S3Perm::ALL.iter().enumerate() {
                    let t = s.apply(r);
                    row[i] = self.classify(t[0], t[1], t[2]);
                }
                row
            })
            .collect();
        self.s3 = Some(table);
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Largest relation label.
    pub fn m(&self) -> Label {
        self.reps.len() - 1
    }

    /// Number of relations |X| = m + 1.
    pub fn size(&self) -> usize {
        self.reps.len()
    }

    pub fn base(&self) -> (usize, usize) {
        self.base
    }

    /// True when built from a full group (so every triple can be classified).
    pub fn has_group(&self) -> bool {
        self.pair.is_some()
    }

    pub fn representative(&self, i: Label) -> [usize; 3] {
        self.reps[i]
    }

    pub fn representatives(&self) -> &[[usize; 3]] {
        &self.reps
    }

    pub fn third_valency(&self, i: Label) -> usize {
        self.third[i]
    }

    pub fn third_valencies(&self) -> &[usize] {
        &self.third
    }

    /// Relation of (a, b, z) for z outside the base pair.
    pub fn point_label(&self, z: usize) -> Option<Label> {
        let l = self.point_label[z];
        (l != NO_LABEL).then_some(l)
    }

    /// Sorted multiset of nontrivial third valencies as (valency, count).
    pub fn valency_multiset(&self) -> Vec<(usize, usize)> {
        let mut counts: std::collections::BTreeMap<usize, usize> = Default::default();
        for &v in &self.third[4..] {
            *counts.entry(v).or_default() += 1;
        }
        counts.into_iter().collect()
    }

    pub fn classify_triple(&self, x: usize, y: usize, z: usize) -> Result<Label, SchemeError> {
        if x >= self.nu || y >= self.nu || z >= self.nu {
            return Err(SchemeError::BadLabel(x.max(y).max(z)));
        }
        if let Some(l) = trivial_label(x, y, z) {
            return Ok(l);
        }
        match &self.pair {
            Some(tree) => Ok(self.point_label[tree.carry(x, y, z)]),
            None if (x, y) == self.base => Ok(self.point_label[z]),
            None => Err(SchemeError::Unsupported("classification away from the base pair")),
        }
    }

    /// Relation label of a triple. Panics on a stabilizer-route scheme unless
    /// the triple starts with the base pair.
    #[inline]
    pub fn classify(&self, x: usize, y: usize, z: usize) -> Label {
        if let Some(l) = trivial_label(x, y, z) {
            return l;
        }
        match &self.pair {
            Some(tree) => self.point_label[tree.carry(x, y, z)],
            None => {
                assert_eq!((x, y), self.base, "classification away from the base pair");
                self.point_label[z]
            }
        }
    }

    pub fn s3_image(&self, i: Label, sigma: S3Perm) -> Result<Label, SchemeError> {
        if i > self.m() {
            return Err(SchemeError::BadLabel(i));
        }
        let table = self.s3.as_ref().ok_or(SchemeError::Unsupported("coordinate permutations"))?;
        Ok(table[i][sigma.index()])
    }

    /// (n1, n2, n3) for every label.
    pub fn valencies(&self) -> Result<Vec<[usize; 3]>, SchemeError> {
        let table = self.s3.as_ref().ok_or(SchemeError::Unsupported("first and second valencies"))?;
        let (rot, swap) = (S3Perm::ROTATE.index(), S3Perm::SWAP23.index());
        Ok((0..self.size()).map(|i| [self.third[table[i][rot]], self.third[table[i][swap]], self.third[i]]).collect())
    }

    /// p_ijk^l counted at an explicit representative of R_l.
    pub fn intersection_number_at(&self, i: Label, j: Label, k: Label, rep: [usize; 3]) -> u64 {
        let [x, y, z] = rep;
        (0..self.nu)
            .filter(|&w| self.classify(w, y, z) == i && self.classify(x, w, z) == j && self.classify(x, y, w) == k)
            .count() as u64
    }

    pub fn intersection_number(&self, i: Label, j: Label, k: Label, l: Label) -> Result<u64, SchemeError> {
        if self.pair.is_none() {
            return Err(SchemeError::Unsupported("intersection numbers"));
        }
        for x in [i, j, k, l] {
            if x > self.m() {
                return Err(SchemeError::BadLabel(x));
            }
        }
        Ok(self.intersection_number_at(i, j, k, self.reps[l]))
    }

    /// Counts (i,j,k) over w for a fixed triple, as a dense (m+1)^3 slice.
    fn count_slice<T: PrimInt>(&self, rep: [usize; 3]) -> Vec<T> {
        let s = self.size();
        let [x, y, z] = rep;
        let mut out = vec![T::zero(); s * s * s];
        for w in 0..self.nu {
            let (i, j, k) = (self.classify(w, y, z), self.classify(x, w, z), self.classify(x, y, w));
            let c = &mut out[(i * s + j) * s + k];
            *c = *c + T::one();
        }
        out
    }

    /// Replaces the label of one point; the result is generally not a scheme.
    /// Exists to exercise the verifiers with corrupted input.
    pub fn with_point_label(mut self, point: usize, label: Label) -> Self {
        self.point_label[point] = label;
        self
    }
}

/// Dense p_ijk^l, indexed [i][j][k][l].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionTensor<T> {
    nu: usize,
    size: usize,
    data: Vec<T>,
}

impl<T: PrimInt> IntersectionTensor<T> {
    pub fn zeros(nu: usize, size: usize) -> Self {
        IntersectionTensor { nu, size, data: vec![T::zero(); size.pow(4)] }
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    /// Number of relations (m + 1).
    pub fn size(&self) -> usize {
        self.size
    }

    #[inline]
    fn idx(&self, i: Label, j: Label, k: Label, l: Label) -> usize {
        ((i * self.size + j) * self.size + k) * self.size + l
    }

    pub fn get(&self, i: Label, j: Label, k: Label, l: Label) -> T {
        self.data[self.idx(i, j, k, l)]
    }

    pub fn set(&mut self, i: Label, j: Label, k: Label, l: Label, v: T) {
        let ix = self.idx(i, j, k, l);
        self.data[ix] = v;
    }

    /// Nonzero entries in (i,j,k,l) order.
    pub fn nonzero(&self) -> Vec<([Label; 4], T)> {
        let s = self.size;
        let mut out = Vec::new();
        for i in 0..s {
            for j in 0..s {
                for k in 0..s {
                    for l in 0..s {
                        let v = self.get(i, j, k, l);
                        if !v.is_zero() {
                            out.push(([i, j, k, l], v));
                        }
                    }
                }
            }
        }
        out
    }

    /// Nested arrays [i][j][k][l].
    pub fn to_nested(&self) -> Vec<Vec<Vec<Vec<T>>>> {
        let s = self.size;
        (0..s)
            .map(|i| (0..s).map(|j| (0..s).map(|k| (0..s).map(|l| self.get(i, j, k, l)).collect()).collect()).collect())
            .collect()
    }
}

pub fn intersection_tensor<T: PrimInt + Send + Sync>(s: &TripleScheme) -> Result<IntersectionTensor<T>, SchemeError> {
    if s.pair.is_none() {
        return Err(SchemeError::Unsupported("intersection tensor"));
    }
    let size = s.size();
    let slices: Vec<Vec<T>> = s.reps.par_iter().map(|&r| s.count_slice::<T>(r)).collect();
    let mut t = IntersectionTensor::zeros(s.nu, size);
    for (l, slice) in slices.iter().enumerate() {
        for (ijk, &v) in slice.iter().enumerate() {
            t.data[ijk * size + l] = v;
        }
    }
    Ok(t)
}

/// True iff p_ijk^l is symmetric in (i,j,k) for nontrivial i, j, k.
pub fn is_commutative<T: PrimInt>(t: &IntersectionTensor<T>) -> bool {
    let s = t.size;
    for i in 4..s {
        for j in 4..s {
            for k in 4..s {
                for l in 0..s {
                    let v = t.get(i, j, k, l);
                    let perms = [(i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)];
                    if perms.iter().any(|&(a, b, c)| t.get(a, b, c, l) != v) {
                        return false;
                    }
                }
            }
        }
    }
    true
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "mode", rename_all = "lowercase")]
pub enum VerifyMode {
    Exhaustive { cap: usize },
    Sampled { seed: u64, samples: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConditionReport {
    pub condition: u8,
    pub name: &'static str,
    pub passed: bool,
    pub checked: u64,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AxiomReport {
    pub mode: VerifyMode,
    pub conditions: Vec<ConditionReport>,
}

impl AxiomReport {
    pub fn passed(&self) -> bool {
        self.conditions.iter().all(|c| c.passed)
    }
}

struct Check {
    report: ConditionReport,
}

impl Check {
    fn new(condition: u8, name: &'static str) -> Self {
        Check { report: ConditionReport { condition, name, passed: true, checked: 0, first_failure: None } }
    }

    fn record(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.report.checked += 1;
        if !ok && self.report.passed {
            self.report.passed = false;
            self.report.first_failure = Some(what());
        }
    }
}

/// Checks the four AST conditions (plus invariance under the generators of
/// `g`) either on every pair/triple or on a seeded random sample.
pub fn verify_axioms(s: &TripleScheme, g: &PermGroup, mode: VerifyMode) -> Result<AxiomReport, SchemeError> {
    if s.pair.is_none() {
        return Err(SchemeError::Unsupported("axiom verification"));
    }
    let nu = s.nu;
    let (pairs, triples): (Vec<(usize, usize)>, Vec<[usize; 3]>) = match mode {
        VerifyMode::Exhaustive { cap } => {
            if nu > cap {
                return Err(SchemeError::CapExceeded { what: "exhaustive verification", nu, cap });
            }
            let pairs = (0..nu).flat_map(|x| (0..nu).map(move |y| (x, y))).filter(|(x, y)| x != y).collect();
            let triples =
                (0..nu).flat_map(|x| (0..nu).flat_map(move |y| (0..nu).map(move |z| [x, y, z]))).collect();
            (pairs, triples)
        }
        VerifyMode::Sampled { seed, samples } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let pairs = (0..samples)
                .map(|_| {
                    let x = rng.gen_range(0..nu);
                    let y = (x + rng.gen_range(1..nu)) % nu;
                    (x, y)
                })
                .collect();
            let mut triples: Vec<[usize; 3]> =
                (0..samples).map(|_| [rng.gen_range(0..nu), rng.gen_range(0..nu), rng.gen_range(0..nu)]).collect();
            // make sure every relation is exercised at least once
            triples.extend(s.reps.iter().copied());
            (pairs, triples)
        }
    };
    let size = s.size();
    let tensor: IntersectionTensor<u64> = intersection_tensor(s)?;

    let mut c1 = Check::new(1, "third valencies constant");
    for &(x, y) in &pairs {
        let mut counts = vec![0usize; size];
        for z in 0..nu {
            counts[s.classify(x, y, z)] += 1;
        }
        let bad = (0..size).find(|&i| counts[i] != s.third[i]);
        c1.record(bad.is_none(), || {
            let i = bad.unwrap();
            format!("pair ({x},{y}): relation {i} has {} third points, expected {}", counts[i], s.third[i])
        });
    }

    let mut c2 = Check::new(2, "intersection numbers constant");
    let results: Vec<Option<String>> = triples
        .par_iter()
        .map(|&t| {
            let l = s.classify(t[0], t[1], t[2]);
            let slice: Vec<u64> = s.count_slice(t);
            for (ijk, &v) in slice.iter().enumerate() {
                let (i, j, k) = (ijk / (size * size), ijk / size % size, ijk % size);
                let expected = tensor.get(i, j, k, l);
                if v != expected {
                    return Some(format!("triple {t:?} in R_{l}: p_{i},{j},{k} = {v}, representative gives {expected}"));
                }
            }
            None
        })
        .collect();
    for r in results {
        c2.record(r.is_none(), || r.clone().unwrap());
    }

    let mut c3 = Check::new(3, "closed under coordinate permutations");
    let mut c4 = Check::new(4, "trivial relations");
    let mut c5 = Check::new(5, "invariant under the group");
    let table = s.s3.as_ref().expect("group-built scheme");
    for &t in &triples {
        let l = s.classify(t[0], t[1], t[2]);
        for (si, sigma) in S3Perm::ALL.iter().enumerate() {
            let u = sigma.apply(t);
            let got = s.classify(u[0], u[1], u[2]);
            c3.record(got == table[l][si], || format!("triple {t:?} permuted by {sigma:?} lands in R_{got}"));
        }
        let ok = match trivial_label(t[0], t[1], t[2]) {
            Some(expected) => l == expected,
            None => (4..size).contains(&l),
        };
        c4.record(ok, || format!("triple {t:?} has label {l}"));
        for (gi, gen) in g.generators().iter().enumerate() {
            let u = [gen.apply(t[0]), gen.apply(t[1]), gen.apply(t[2])];
            let got = s.classify(u[0], u[1], u[2]);
            c5.record(got == l, || format!("generator {gi} moves {t:?} from R_{l} to R_{got}"));
        }
    }
    Ok(AxiomReport { mode, conditions: vec![c1.report, c2.report, c3.report, c4.report, c5.report] })
}

/// A partition of Ω³ as one label per triple (index (x·ν + y)·ν + z), with
/// labels numbered by first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TriplePartition {
    pub nu: usize,
    pub labels: Vec<u32>,
    pub count: usize,
}

impl TriplePartition {
    pub fn from_labels(nu: usize, raw: &[usize]) -> Self {
        let mut remap: HashMap<usize, u32> = HashMap::new();
        let labels: Vec<u32> = raw
            .iter()
            .map(|&r| {
                let next = remap.len() as u32;
                *remap.entry(r).or_insert(next)
            })
            .collect();
        TriplePartition { nu, labels, count: remap.len() }
    }
}

fn find(parent: &mut [u32], mut x: u32) -> u32 {
    while parent[x as usize] != x {
        let p = parent[x as usize];
        parent[x as usize] = parent[p as usize];
        x = p;
    }
    x
}

/// Orbits of G on Ω³ by union-find over generator moves.
pub fn triple_orbit_oracle(g: &PermGroup, cap: usize) -> Result<TriplePartition, SchemeError> {
    let nu = g.degree();
    if nu > cap {
        return Err(SchemeError::CapExceeded { what: "triple-orbit oracle", nu, cap });
    }
    let n3 = nu * nu * nu;
    let mut parent: Vec<u32> = (0..n3 as u32).collect();
    for gen in g.generators() {
        for x in 0..nu {
            for y in 0..nu {
                for z in 0..nu {
                    let t = ((x * nu + y) * nu + z) as u32;
                    let u = ((gen.apply(x) * nu + gen.apply(y)) * nu + gen.apply(z)) as u32;
                    let (rt, ru) = (find(&mut parent, t), find(&mut parent, u));
                    if rt != ru {
                        parent[rt.max(ru) as usize] = rt.min(ru);
                    }
                }
            }
        }
    }
    let roots: Vec<usize> = (0..n3 as u32).map(|t| find(&mut parent, t) as usize).collect();
    Ok(TriplePartition::from_labels(nu, &roots))
}

/// The partition of Ω³ induced by a scheme's classification.
pub fn scheme_partition(s: &TripleScheme) -> TriplePartition {
    let nu = s.nu;
    let raw: Vec<usize> = (0..nu * nu * nu).map(|t| s.classify(t / (nu * nu), t / nu % nu, t % nu)).collect();
    TriplePartition::from_labels(nu, &raw)
}
