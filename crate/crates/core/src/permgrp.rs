//! Permutations, permutation groups given by generators, Schreier trees and
//! a deterministic Schreier-Sims stabilizer chain.
//!
//! Composition convention: `compose(p, q)` applies `p` first, then `q`, so
//! `compose(p, q).apply(x) == q.apply(p.apply(x))`.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PermError {
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("image list is not a bijection on 0..{0}")]
    NotBijective(usize),
    #[error("point {point} out of range for degree {degree}")]
    PointOutOfRange { point: usize, degree: usize },
    #[error("point {0} is not in the orbit")]
    NotInOrbit(usize),
    #[error("two-point stabilizer needs distinct points, got {0} twice")]
    EqualPoints(usize),
    #[error("degree {0} is too small (need at least 3)")]
    DegreeTooSmall(usize),
    #[error("a group needs at least one generator")]
    NoGenerators,
}

/// A permutation of `0..degree`, stored as its image list.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u32>,
}

impl Perm {
    pub fn identity(degree: usize) -> Self {
        Perm { images: (0..degree as u32).collect() }
    }

    pub fn from_images(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &x in &images {
            if x >= n || seen[x] {
                return Err(PermError::NotBijective(n));
            }
            seen[x] = true;
        }
        Ok(Perm { images: images.into_iter().map(|x| x as u32).collect() })
    }

    /// Builds a permutation from disjoint cycles, e.g. `&[&[0, 1, 2]]`.
    pub fn from_cycles(degree: usize, cycles: &[&[usize]]) -> Result<Self, PermError> {
        let mut images: Vec<usize> = (0..degree).collect();
        let mut touched = vec![false; degree];
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                if x >= degree {
                    return Err(PermError::PointOutOfRange { point: x, degree });
                }
                if touched[x] {
                    return Err(PermError::NotBijective(degree));
                }
                touched[x] = true;
                images[x] = cycle[(i + 1) % cycle.len()];
            }
        }
        Perm::from_images(images)
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.images[x] as usize
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    /// `self` first, then `other`. Panics on degree mismatch; use [`compose`]
    /// for the checked version.
    pub fn then(&self, other: &Perm) -> Perm {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Perm { images: self.images.iter().map(|&x| other.images[x as usize]).collect() }
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u32; self.images.len()];
        for (i, &x) in self.images.iter().enumerate() {
            inv[x as usize] = i as u32;
        }
        Perm { images: inv }
    }

    pub fn first_moved_point(&self) -> Option<usize> {
        self.images.iter().enumerate().find(|(i, &x)| *i as u32 != x).map(|(i, _)| i)
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.images)
    }
}

pub fn compose(p: &Perm, q: &Perm) -> Result<Perm, PermError> {
    if p.degree() != q.degree() {
        return Err(PermError::DegreeMismatch(p.degree(), q.degree()));
    }
    Ok(p.then(q))
}

pub fn inverse(p: &Perm) -> Perm {
    p.inverse()
}

#[derive(Clone, Debug)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    known_order: Option<BigUint>,
}

impl PermGroup {
    pub fn new(degree: usize, generators: Vec<Perm>) -> Result<Self, PermError> {
        if generators.is_empty() {
            return Err(PermError::NoGenerators);
        }
        for g in &generators {
            if g.degree() != degree {
                return Err(PermError::DegreeMismatch(degree, g.degree()));
            }
        }
        Ok(PermGroup { degree, generators, known_order: None })
    }

    pub fn trivial(degree: usize) -> Self {
        PermGroup { degree, generators: vec![Perm::identity(degree)], known_order: None }
    }

    /// Like `new`, but drops identities and duplicates; an empty result is the
    /// trivial group.
    pub fn from_generators_dedup(degree: usize, generators: Vec<Perm>) -> Self {
        let mut seen = HashSet::new();
        let gens: Vec<Perm> =
            generators.into_iter().filter(|g| !g.is_identity() && seen.insert(g.clone())).collect();
        if gens.is_empty() {
            PermGroup::trivial(degree)
        } else {
            PermGroup { degree, generators: gens, known_order: None }
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Records the group order when it is known in advance. Stabilizer chains
    /// then stop as soon as they reach it, which avoids checking every
    /// Schreier generator of long chains such as S_n. An order that is too
    /// large only costs time; one that is too small gives an incomplete chain.
    pub fn with_known_order(mut self, order: BigUint) -> Self {
        self.known_order = Some(order);
        self
    }

    pub fn known_order(&self) -> Option<&BigUint> {
        self.known_order.as_ref()
    }

    fn check_point(&self, x: usize) -> Result<(), PermError> {
        if x >= self.degree {
            Err(PermError::PointOutOfRange { point: x, degree: self.degree })
        } else {
            Ok(())
        }
    }

    /// Orbits of the group on all points, each listed in discovery order,
    /// started from the smallest point not yet seen.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut out = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            out.push(bfs_orbit(&self.generators, start, &mut seen));
        }
        out
    }
}

/// Breadth-first orbit of `start`, marking `seen`.
pub(crate) fn bfs_orbit(gens: &[Perm], start: usize, seen: &mut [bool]) -> Vec<usize> {
    let mut orbit = vec![start];
    seen[start] = true;
    let mut i = 0;
    while i < orbit.len() {
        let x = orbit[i];
        for g in gens {
            let y = g.apply(x);
            if !seen[y] {
                seen[y] = true;
                orbit.push(y);
            }
        }
        i += 1;
    }
    orbit
}

/// Orbit of a root point with, for each reached point, the edge it was
/// discovered along.
#[derive(Clone, Debug)]
pub struct SchreierTree {
    root: usize,
    orbit: Vec<usize>,
    // point -> (predecessor, generator index)
    parent: Vec<Option<(usize, usize)>>,
    generators: Vec<Perm>,
}

impl SchreierTree {
    pub fn root(&self) -> usize {
        self.root
    }

    pub fn orbit(&self) -> &[usize] {
        &self.orbit
    }

    pub fn contains(&self, y: usize) -> bool {
        y == self.root || self.parent.get(y).is_some_and(|p| p.is_some())
    }

    pub fn parent(&self, y: usize) -> Option<(usize, usize)> {
        self.parent.get(y).copied().flatten()
    }
}

pub fn orbit_with_tree(g: &PermGroup, x: usize) -> Result<SchreierTree, PermError> {
    g.check_point(x)?;
    let mut parent = vec![None; g.degree];
    let mut seen = vec![false; g.degree];
    seen[x] = true;
    let mut orbit = vec![x];
    let mut queue = VecDeque::from([x]);
    while let Some(y) = queue.pop_front() {
        for (gi, gen) in g.generators.iter().enumerate() {
            let z = gen.apply(y);
            if !seen[z] {
                seen[z] = true;
                parent[z] = Some((y, gi));
                orbit.push(z);
                queue.push_back(z);
            }
        }
    }
    Ok(SchreierTree { root: x, orbit, parent, generators: g.generators.clone() })
}

/// A product of generators mapping `tree.root()` to `y`.
pub fn transporter(tree: &SchreierTree, y: usize) -> Result<Perm, PermError> {
    if !tree.contains(y) {
        return Err(PermError::NotInOrbit(y));
    }
    let mut edges = Vec::new();
    let mut cur = y;
    while let Some((pred, gi)) = tree.parent(cur) {
        edges.push(gi);
        cur = pred;
    }
    let degree = tree.generators.first().map_or(0, Perm::degree);
    let mut t = Perm::identity(degree);
    for &gi in edges.iter().rev() {
        t = t.then(&tree.generators[gi]);
    }
    Ok(t)
}

struct Level {
    base_point: usize,
    gens: Vec<Perm>,
    // reps[p] maps base_point to p
    reps: Vec<Option<Perm>>,
    orbit: Vec<usize>,
    // (orbit point, generator index) pairs whose Schreier generator is known
    // to sift through the levels below; growing those levels keeps it so
    checked: HashSet<(usize, usize)>,
    // generators already applied to every orbit point
    applied: usize,
}

impl Level {
    fn new(degree: usize, base_point: usize, gens: Vec<Perm>) -> Self {
        let mut level = Level { base_point, gens, reps: Vec::new(), orbit: Vec::new(), checked: HashSet::new(), applied: 0 };
        level.rebuild(degree);
        level
    }

    /// Extends the orbit and transversal after generators were added. Known
    /// representatives are kept, so checked Schreier generators stay valid.
    fn rebuild(&mut self, degree: usize) {
        if self.reps.is_empty() {
            self.reps = vec![None; degree];
            self.reps[self.base_point] = Some(Perm::identity(degree));
            self.orbit = vec![self.base_point];
        }
        let old_len = self.orbit.len();
        let mut i = 0;
        while i < self.orbit.len() {
            let b = self.orbit[i];
            let start = if i < old_len { self.applied } else { 0 };
            for s in &self.gens[start..] {
                let c = s.apply(b);
                if self.reps[c].is_none() {
                    let u = self.reps[b].as_ref().unwrap().then(s);
                    self.reps[c] = Some(u);
                    self.orbit.push(c);
                }
            }
            i += 1;
        }
        self.applied = self.gens.len();
    }
}

/// Base and strong generating set built by the deterministic Schreier-Sims
/// algorithm. Levels follow the base; level `i` holds generators of the
/// pointwise stabilizer of the first `i` base points.
pub struct StabChain {
    degree: usize,
    levels: Vec<Level>,
}

impl StabChain {
    pub fn new(g: &PermGroup, base_prefix: &[usize]) -> Result<Self, PermError> {
        for &b in base_prefix {
            g.check_point(b)?;
        }
        let degree = g.degree;
        let gens: Vec<Perm> = {
            let mut seen = HashSet::new();
            g.generators.iter().filter(|p| !p.is_identity() && seen.insert((*p).clone())).cloned().collect()
        };
        let mut base: Vec<usize> = Vec::new();
        for &b in base_prefix {
            if !base.contains(&b) {
                base.push(b);
            }
        }
        for s in &gens {
            if base.iter().all(|&b| s.apply(b) == b) {
                base.push(s.first_moved_point().unwrap());
            }
        }
        let mut levels: Vec<Level> = Vec::with_capacity(base.len());
        for (i, &b) in base.iter().enumerate() {
            let lg = gens.iter().filter(|s| base[..i].iter().all(|&c| s.apply(c) == c)).cloned().collect();
            levels.push(Level::new(degree, b, lg));
        }
        let mut chain = StabChain { degree, levels };
        match g.known_order() {
            Some(order) if !gens.is_empty() => chain.complete_to_order(&gens, order),
            _ => chain.complete(),
        }
        Ok(chain)
    }

    /// Appends a sifted residue that stopped at level `j` to levels
    /// `from..=j`, opening a new level when it fixes the whole base.
    fn add_strong(&mut self, r: Perm, from: usize, j: usize) {
        if j == self.levels.len() {
            let bp = r.first_moved_point().unwrap();
            self.levels.push(Level::new(self.degree, bp, Vec::new()));
        }
        for l in from..=j {
            self.levels[l].gens.push(r.clone());
            self.levels[l].rebuild(self.degree);
        }
    }

    /// Random Schreier-Sims: sift seeded random elements until the orbit
    /// lengths multiply to the known order, at which point the chain is
    /// complete. Falls back to the deterministic check if progress stalls,
    /// which also covers a wrong order.
    fn complete_to_order(&mut self, gens: &[Perm], order: &BigUint) {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        // product replacement with an accumulator
        let mut state: Vec<Perm> = gens.iter().cycle().take(gens.len().max(10)).cloned().collect();
        let mut acc = Perm::identity(self.degree);
        let mut next = |rng: &mut ChaCha8Rng| {
            let i = rng.gen_range(0..state.len());
            let mut j = rng.gen_range(0..state.len() - 1);
            if j >= i {
                j += 1;
            }
            state[i] = if rng.gen() { state[i].then(&state[j]) } else { state[i].then(&state[j].inverse()) };
            acc = acc.then(&state[i]);
            acc.clone()
        };
        // mixing takes longer with many generators
        for _ in 0..50 + 10 * gens.len() {
            next(&mut rng);
        }
        let mut stalled = 0u64;
        loop {
            let current = self.order();
            if current >= *order {
                break;
            }
            // a random element sifts to the identity with probability about
            // current/order, so one missing point in a long orbit can take
            // hundreds of draws to expose; allow 64 times the expected wait
            let wait = order / (order - &current) + 1u32;
            let limit = u64::try_from(wait * 64u32).unwrap_or(u64::MAX).min(1 << 22);
            let (r, j) = self.sift(next(&mut rng), 0);
            if r.is_identity() {
                stalled += 1;
                if stalled >= limit {
                    self.complete();
                    return;
                }
                continue;
            }
            stalled = 0;
            self.add_strong(r, j.min(1), j);
        }
    }

    fn sift(&self, mut h: Perm, from: usize) -> (Perm, usize) {
        for l in from..self.levels.len() {
            let level = &self.levels[l];
            let b = h.apply(level.base_point);
            match &level.reps[b] {
                None => return (h, l),
                Some(u) => h = h.then(&u.inverse()),
            }
        }
        (h, self.levels.len())
    }

    fn complete(&mut self) {
        let mut i = self.levels.len() as isize - 1;
        while i >= 0 {
            let li = i as usize;
            let mut restart = None;
            'scan: for bi in 0..self.levels[li].orbit.len() {
                let b = self.levels[li].orbit[bi];
                for si in 0..self.levels[li].gens.len() {
                    if self.levels[li].checked.contains(&(b, si)) {
                        continue;
                    }
                    let level = &self.levels[li];
                    let s = &level.gens[si];
                    let c = s.apply(b);
                    let ub = level.reps[b].as_ref().unwrap();
                    let uc = level.reps[c].as_ref().unwrap();
                    let h = ub.then(s).then(&uc.inverse());
                    if !h.is_identity() {
                        let (r, j) = self.sift(h, li + 1);
                        if !r.is_identity() {
                            restart = Some((r, j));
                            break 'scan;
                        }
                    }
                    self.levels[li].checked.insert((b, si));
                }
            }
            match restart {
                None => i -= 1,
                Some((r, j)) => {
                    self.add_strong(r, li + 1, j);
                    i = j as isize;
                }
            }
        }
    }

    pub fn base(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn order(&self) -> BigUint {
        self.levels.iter().fold(BigUint::from(1u32), |acc, l| acc * BigUint::from(l.orbit.len()))
    }

    /// Length of the basic orbit at level `i` (1 past the end of the chain).
    pub fn orbit_len(&self, i: usize) -> usize {
        self.levels.get(i).map_or(1, |l| l.orbit.len())
    }

    /// The pointwise stabilizer of the first `i` base points.
    pub fn stabilizer_group(&self, i: usize) -> PermGroup {
        let gens = self.levels.get(i).map(|l| l.gens.clone()).unwrap_or_default();
        PermGroup::from_generators_dedup(self.degree, gens)
    }

    /// Membership test by sifting.
    pub fn contains(&self, p: &Perm) -> bool {
        p.degree() == self.degree && self.sift(p.clone(), 0).0.is_identity()
    }
}

pub fn group_order(g: &PermGroup) -> BigUint {
    StabChain::new(g, &[]).expect("empty base prefix is always valid").order()
}

/// Generators of the point stabilizer `G_x`, obtained by sifting Schreier
/// generators (identity-free, deduplicated).
pub fn stabilizer(g: &PermGroup, x: usize) -> Result<PermGroup, PermError> {
    Ok(StabChain::new(g, &[x])?.stabilizer_group(1))
}

pub fn two_point_stabilizer(g: &PermGroup, a: usize, b: usize) -> Result<PermGroup, PermError> {
    if a == b {
        return Err(PermError::EqualPoints(a));
    }
    Ok(StabChain::new(g, &[a, b])?.stabilizer_group(2))
}

pub fn is_two_transitive(g: &PermGroup) -> Result<bool, PermError> {
    if g.degree < 3 {
        return Err(PermError::DegreeTooSmall(g.degree));
    }
    let chain = StabChain::new(g, &[0, 1])?;
    Ok(chain.orbit_len(0) == g.degree && chain.orbit_len(1) == g.degree - 1)
}
