//! Concrete two-transitive actions as permutation groups on indexed domains,
//! plus explicit two-point stabilizers for families where only those are
//! built (Suzuki, Ree, and the torus route for the unitary groups).

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use thiserror::Error;

use crate::galois::{is_prime, prime_power, FieldElem, FieldError, FieldSpec};
use crate::permgrp::{is_two_transitive, PermError, Perm, PermGroup, StabChain};

/// Upper bound on the number of points of a constructed domain.
pub const MAX_DOMAIN: usize = 1 << 16;

#[derive(Debug, Error)]
pub enum ActionError {
    #[error("invalid parameters: {0}")]
    Constraint(String),
    #[error("domain of {0} points exceeds the supported maximum")]
    TooLarge(usize),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {msg}")]
    Parse { path: PathBuf, line: usize, msg: String },
    #[error("unknown sporadic group {0:?}")]
    UnknownSporadic(String),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Perm(#[from] PermError),
}

fn constraint<T>(msg: impl Into<String>) -> Result<T, ActionError> {
    Err(ActionError::Constraint(msg.into()))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DomainPoint {
    /// An abstract point or symbol.
    Index(usize),
    /// Affine vector, normalized projective point, or ovoid coordinates.
    Vector(Vec<FieldElem>),
    /// Value table of a quadratic form on GF(2)^{2k}.
    Form(Vec<u8>),
    Infinity,
}

#[derive(Clone, Debug)]
pub struct LabeledDomain {
    elements: Vec<DomainPoint>,
    index: HashMap<DomainPoint, usize>,
}

impl LabeledDomain {
    pub fn new(elements: Vec<DomainPoint>) -> Result<Self, ActionError> {
        let mut index = HashMap::with_capacity(elements.len());
        for (i, e) in elements.iter().enumerate() {
            if index.insert(e.clone(), i).is_some() {
                return Err(ActionError::Validation(format!("duplicate domain element {e:?}")));
            }
        }
        Ok(LabeledDomain { elements, index })
    }

    pub fn abstract_points(n: usize) -> Self {
        Self::new((0..n).map(DomainPoint::Index).collect()).expect("indices are distinct")
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn get(&self, i: usize) -> &DomainPoint {
        &self.elements[i]
    }

    pub fn elements(&self) -> &[DomainPoint] {
        &self.elements
    }

    pub fn index_of(&self, p: &DomainPoint) -> Option<usize> {
        self.index.get(p).copied()
    }

    /// The permutation induced by a point map, failing if some image lies
    /// outside the domain or the map is not injective.
    pub fn perm_from_map<F>(&self, mut map: F) -> Result<Perm, ActionError>
    where
        F: FnMut(&DomainPoint) -> DomainPoint,
    {
        let mut images = Vec::with_capacity(self.len());
        for e in &self.elements {
            let img = map(e);
            let j = self
                .index_of(&img)
                .ok_or_else(|| ActionError::Validation(format!("{e:?} maps outside the domain to {img:?}")))?;
            images.push(j);
        }
        Perm::from_images(images).map_err(|_| ActionError::Validation("point map is not a bijection".into()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flavor {
    /// PSL(k,n)
    Psl,
    /// PGL(k,n)
    Pgl,
    /// PΓL(k,n)
    PGammaL,
    /// PΣL(k,n): PSL extended by the full Galois group
    PSigmaL,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Psl => "PSL",
            Flavor::Pgl => "PGL",
            Flavor::PGammaL => "PGammaL",
            Flavor::PSigmaL => "PSigmaL",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Epsilon {
    Plus,
    Minus,
}

impl Epsilon {
    pub fn sign(self) -> i64 {
        match self {
            Epsilon::Plus => 1,
            Epsilon::Minus => -1,
        }
    }
}

impl fmt::Display for Epsilon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Epsilon::Plus => "+",
            Epsilon::Minus => "-",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ActionSpec {
    SymAlt { n: usize, alternating: bool },
    AglH { k: usize, p: u32, alpha: u32, frak_a: u32 },
    Projective { k: usize, n: u64, flavor: Flavor },
    Pgu3 { q: u64 },
    Psu3 { q: u64 },
    Sp2k2 { k: usize, epsilon: Epsilon },
    Suzuki { q: u64 },
    Ree { q: u64 },
    FromFile { path: PathBuf },
}

/// A built action: either a full group on its domain or an explicit two-point
/// stabilizer.
pub enum BuiltAction {
    Group { group: PermGroup, domain: LabeledDomain },
    Stabilizer(StabilizerMapSet),
}

impl ActionSpec {
    /// Checks the family parameter constraints without building anything.
    pub fn validate(&self) -> Result<(), ActionError> {
        match *self {
            ActionSpec::SymAlt { n, alternating } => {
                if n < 3 || (alternating && n < 4) {
                    return constraint(format!("degree {n} too small"));
                }
            }
            ActionSpec::AglH { k, p, alpha, frak_a } => {
                if k == 0 || alpha == 0 || frak_a == 0 || alpha % frak_a != 0 {
                    return constraint("AGL_H needs k >= 1 and frak_a dividing alpha");
                }
                if !is_prime(p as u64) {
                    return constraint(format!("{p} is not prime"));
                }
            }
            ActionSpec::Projective { k, n, .. } => {
                if k < 2 || prime_power(n).is_none() {
                    return constraint("projective groups need k >= 2 and n a prime power");
                }
            }
            ActionSpec::Pgu3 { q } => {
                if prime_power(q).is_none() {
                    return constraint("q must be a prime power");
                }
            }
            ActionSpec::Psu3 { q } => {
                if prime_power(q).is_none() {
                    return constraint("q must be a prime power");
                }
            }
            ActionSpec::Sp2k2 { k, .. } => {
                if k < 2 {
                    return constraint("Sp(2k,2) needs k >= 2");
                }
            }
            ActionSpec::Suzuki { q } => {
                suzuki_exponent(q)?;
            }
            ActionSpec::Ree { q } => {
                ree_exponent(q)?;
            }
            ActionSpec::FromFile { .. } => {}
        }
        Ok(())
    }

    /// Builds the full group where one is available.
    pub fn build_group(&self) -> Result<(PermGroup, LabeledDomain), ActionError> {
        self.validate()?;
        match self {
            ActionSpec::SymAlt { n, alternating } => build_sym_alt(*n, *alternating),
            ActionSpec::AglH { k, p, alpha, frak_a } => build_agl_h(*k, *p, *alpha, *frak_a),
            ActionSpec::Projective { k, n, flavor } => build_projective(*k, *n, *flavor),
            ActionSpec::Pgu3 { q } => build_pgu3(*q),
            ActionSpec::Psu3 { q } => build_psu3(*q),
            ActionSpec::Sp2k2 { k, epsilon } => build_sp2k2(*k, *epsilon),
            ActionSpec::Suzuki { .. } | ActionSpec::Ree { .. } => {
                constraint("only the two-point stabilizer is available for this family")
            }
            ActionSpec::FromFile { path } => load_group_file(path),
        }
    }

    /// Builds the explicit two-point stabilizer where the family has one.
    pub fn build_stabilizer(&self) -> Result<StabilizerMapSet, ActionError> {
        self.validate()?;
        match self {
            ActionSpec::Suzuki { q } => suzuki_stabilizer(*q),
            ActionSpec::Ree { q } => ree_stabilizer(*q),
            ActionSpec::Pgu3 { q } => pgu3_stabilizer(*q),
            ActionSpec::Psu3 { q } => psu3_stabilizer(*q),
            _ => constraint("no explicit two-point stabilizer for this family"),
        }
    }

    /// Full group when available, stabilizer otherwise.
    pub fn build(&self) -> Result<BuiltAction, ActionError> {
        match self {
            ActionSpec::Suzuki { .. } | ActionSpec::Ree { .. } => {
                Ok(BuiltAction::Stabilizer(self.build_stabilizer()?))
            }
            _ => {
                let (group, domain) = self.build_group()?;
                Ok(BuiltAction::Group { group, domain })
            }
        }
    }
}

fn check_size(n: u64) -> Result<usize, ActionError> {
    if n > MAX_DOMAIN as u64 {
        Err(ActionError::TooLarge(n as usize))
    } else {
        Ok(n as usize)
    }
}

pub fn build_sym_alt(n: usize, alternating: bool) -> Result<(PermGroup, LabeledDomain), ActionError> {
    ActionSpec::SymAlt { n, alternating }.validate()?;
    check_size(n as u64)?;
    let gens = if alternating {
        (2..n).map(|i| Perm::from_cycles(n, &[&[0, 1, i]])).collect::<Result<Vec<_>, _>>()?
    } else {
        let cycle: Vec<usize> = (0..n).collect();
        vec![Perm::from_cycles(n, &[&[0, 1]])?, Perm::from_cycles(n, &[&cycle])?]
    };
    let mut order: BigUint = (2..=n as u64).product();
    if alternating {
        order /= 2u32;
    }
    Ok((PermGroup::new(n, gens)?.with_known_order(order), LabeledDomain::abstract_points(n)))
}

fn field_for(n: u64) -> Result<FieldSpec, ActionError> {
    let (p, alpha) = prime_power(n).ok_or_else(|| ActionError::Constraint(format!("{n} is not a prime power")))?;
    Ok(FieldSpec::new(p, alpha)?)
}

/// All vectors of length `k` over the field, in lexicographic order.
fn all_vectors(f: &FieldSpec, k: usize) -> Vec<Vec<FieldElem>> {
    let n = f.order() as usize;
    let total = n.pow(k as u32);
    (0..total)
        .map(|mut idx| {
            let mut v = vec![f.zero(); k];
            for i in (0..k).rev() {
                v[i] = f.elem((idx % n) as u32);
                idx /= n;
            }
            v
        })
        .collect()
}

/// GF(p)-basis of GF(p^α): the monomials 1, x, ..., x^{α-1}.
fn prime_field_basis(f: &FieldSpec) -> Vec<FieldElem> {
    (0..f.alpha() as usize)
        .map(|i| {
            let mut c = vec![0; f.alpha() as usize];
            c[i] = 1;
            f.from_coeffs(&c).expect("valid coefficients")
        })
        .collect()
}

fn vec_of(p: &DomainPoint) -> &[FieldElem] {
    match p {
        DomainPoint::Vector(v) => v,
        _ => unreachable!("vector domain"),
    }
}

pub fn build_agl_h(k: usize, p: u32, alpha: u32, frak_a: u32) -> Result<(PermGroup, LabeledDomain), ActionError> {
    ActionSpec::AglH { k, p, alpha, frak_a }.validate()?;
    let n = (p as u64).pow(alpha);
    check_size(n.checked_pow(k as u32).unwrap_or(u64::MAX))?;
    let f = FieldSpec::new(p, alpha)?;
    let domain = LabeledDomain::new(all_vectors(&f, k).into_iter().map(DomainPoint::Vector).collect())?;
    let basis = prime_field_basis(&f);
    let omega = f.multiplicative_generator();
    let mut gens = Vec::new();

    for i in 0..k {
        for &beta in &basis {
            gens.push(domain.perm_from_map(|pt| {
                let mut v = vec_of(pt).to_vec();
                v[i] = f.add(v[i], beta);
                DomainPoint::Vector(v)
            })?);
        }
    }
    gens.push(domain.perm_from_map(|pt| {
        let mut v = vec_of(pt).to_vec();
        v[0] = f.mul(v[0], omega);
        DomainPoint::Vector(v)
    })?);
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            for &beta in &basis {
                gens.push(domain.perm_from_map(|pt| {
                    let mut v = vec_of(pt).to_vec();
                    v[i] = f.add(v[i], f.mul(beta, v[j]));
                    DomainPoint::Vector(v)
                })?);
            }
        }
    }
    if frak_a < alpha {
        let q = (p as u64).pow(frak_a);
        gens.push(domain.perm_from_map(|pt| {
            DomainPoint::Vector(vec_of(pt).iter().map(|&x| f.powu(x, q)).collect())
        })?);
    }
    Ok((PermGroup::from_generators_dedup(domain.len(), gens), domain))
}

/// Scales a nonzero vector so its first nonzero coordinate is 1.
fn normalize_projective(f: &FieldSpec, v: &[FieldElem]) -> Vec<FieldElem> {
    let lead = *v.iter().find(|x| !x.is_zero()).expect("nonzero vector");
    let inv = f.inv(lead).expect("lead is nonzero");
    v.iter().map(|&x| f.mul(x, inv)).collect()
}

pub fn projective_points(f: &FieldSpec, k: usize) -> Vec<DomainPoint> {
    all_vectors(f, k)
        .into_iter()
        .filter(|v| v.iter().find(|x| !x.is_zero()) == Some(&f.one()))
        .map(DomainPoint::Vector)
        .collect()
}

/// Normalized projective point with the given homogeneous coordinates.
pub fn projective_point(f: &FieldSpec, v: &[FieldElem]) -> DomainPoint {
    DomainPoint::Vector(normalize_projective(f, v))
}

pub fn build_projective(k: usize, n: u64, flavor: Flavor) -> Result<(PermGroup, LabeledDomain), ActionError> {
    ActionSpec::Projective { k, n, flavor }.validate()?;
    let f = field_for(n)?;
    let deg = (n.checked_pow(k as u32).unwrap_or(u64::MAX) - 1) / (n - 1);
    check_size(deg)?;
    let domain = LabeledDomain::new(projective_points(&f, k))?;
    let basis = prime_field_basis(&f);
    let mut gens = Vec::new();
    for i in 0..k {
        for j in 0..k {
            if i == j {
                continue;
            }
            for &beta in &basis {
                gens.push(domain.perm_from_map(|pt| {
                    let mut v = vec_of(pt).to_vec();
                    v[i] = f.add(v[i], f.mul(beta, v[j]));
                    projective_point(&f, &v)
                })?);
            }
        }
    }
    if matches!(flavor, Flavor::Pgl | Flavor::PGammaL) {
        let omega = f.multiplicative_generator();
        gens.push(domain.perm_from_map(|pt| {
            let mut v = vec_of(pt).to_vec();
            v[0] = f.mul(v[0], omega);
            projective_point(&f, &v)
        })?);
    }
    if matches!(flavor, Flavor::PGammaL | Flavor::PSigmaL) && f.alpha() > 1 {
        let p = f.p() as u64;
        gens.push(domain.perm_from_map(|pt| {
            DomainPoint::Vector(vec_of(pt).iter().map(|&x| f.powu(x, p)).collect())
        })?);
    }
    Ok((PermGroup::from_generators_dedup(domain.len(), gens), domain))
}

type Mat3 = [[FieldElem; 3]; 3];

/// Unitary geometry in dimension 3 over GF(q²) with form
/// φ(u,v) = u1 v3^q + u2 v2^q + u3 v1^q.
struct Unitary {
    f: FieldSpec,
    q: u64,
}

impl Unitary {
    fn new(q: u64) -> Result<Self, ActionError> {
        let (p, a) = prime_power(q).ok_or_else(|| ActionError::Constraint(format!("{q} is not a prime power")))?;
        check_size(q.pow(3) + 1)?;
        Ok(Unitary { f: FieldSpec::new(p, 2 * a)?, q })
    }

    fn bar(&self, x: FieldElem) -> FieldElem {
        self.f.powu(x, self.q)
    }

    fn form(&self, u: &[FieldElem; 3], v: &[FieldElem; 3]) -> FieldElem {
        let f = &self.f;
        let t1 = f.mul(u[0], self.bar(v[2]));
        let t2 = f.mul(u[1], self.bar(v[1]));
        let t3 = f.mul(u[2], self.bar(v[0]));
        f.add(f.add(t1, t2), t3)
    }

    fn apply(&self, m: &Mat3, v: &[FieldElem; 3]) -> [FieldElem; 3] {
        let f = &self.f;
        let mut out = [f.zero(); 3];
        for (i, row) in m.iter().enumerate() {
            out[i] = (0..3).fold(f.zero(), |acc, j| f.add(acc, f.mul(row[j], v[j])));
        }
        out
    }

    fn preserves_form(&self, m: &Mat3) -> bool {
        let f = &self.f;
        let basis: Vec<[FieldElem; 3]> = (0..3)
            .map(|i| {
                let mut e = [f.zero(); 3];
                e[i] = f.one();
                e
            })
            .collect();
        basis.iter().all(|u| {
            basis.iter().all(|v| self.form(&self.apply(m, u), &self.apply(m, v)) == self.form(u, v))
        })
    }

    /// Isotropic points: (a,b,1) in lexicographic order, then (1,0,0).
    fn domain(&self) -> Result<LabeledDomain, ActionError> {
        let f = &self.f;
        let mut pts = Vec::new();
        for a in f.elements() {
            for b in f.elements() {
                let t = f.add(f.add(a, self.bar(a)), f.powu(b, self.q + 1));
                if t.is_zero() {
                    pts.push(DomainPoint::Vector(vec![a, b, f.one()]));
                }
            }
        }
        pts.push(DomainPoint::Vector(vec![f.one(), f.zero(), f.zero()]));
        if pts.len() as u64 != self.q.pow(3) + 1 {
            return Err(ActionError::Validation(format!("found {} isotropic points", pts.len())));
        }
        LabeledDomain::new(pts)
    }

    fn normalize(&self, v: [FieldElem; 3]) -> DomainPoint {
        let f = &self.f;
        let s = [v[2], v[0], v[1]].into_iter().find(|x| !x.is_zero()).expect("nonzero vector");
        let inv = f.inv(s).expect("s is nonzero");
        DomainPoint::Vector(v.iter().map(|&x| f.mul(x, inv)).collect())
    }

    fn perm(&self, domain: &LabeledDomain, m: &Mat3) -> Result<Perm, ActionError> {
        domain.perm_from_map(|pt| {
            let v = vec_of(pt);
            self.normalize(self.apply(m, &[v[0], v[1], v[2]]))
        })
    }

    fn torus(&self, c: FieldElem) -> Mat3 {
        let f = &self.f;
        let z = f.zero();
        let last = f.pow(c, -(self.q as i64)).expect("c is nonzero");
        [[c, z, z], [z, f.one(), z], [z, z, last]]
    }

    fn unipotent(&self, a: FieldElem, b: FieldElem) -> Mat3 {
        let f = &self.f;
        let (z, o) = (f.zero(), f.one());
        [[o, f.neg(self.bar(b)), a], [z, o, b], [z, z, o]]
    }

    fn weyl(&self) -> Mat3 {
        let (z, o) = (self.f.zero(), self.f.one());
        [[z, z, o], [z, o, z], [o, z, z]]
    }

    fn pgu_order(&self) -> BigUint {
        let q = BigUint::from(self.q);
        q.pow(3) * (q.pow(3) + 1u32) * (q.pow(2) - 1u32)
    }

    fn index_su(&self) -> u64 {
        if (self.q + 1) % 3 == 0 {
            3
        } else {
            1
        }
    }

    fn build(&self, special: bool) -> Result<(PermGroup, LabeledDomain), ActionError> {
        let f = &self.f;
        let domain = self.domain()?;
        let g = f.multiplicative_generator();
        let c = if special && self.index_su() == 3 { f.powu(g, 3) } else { g };
        // U(a,b) needs a + a^q + b^(q+1) = 0; take b over a GF(p)-basis since
        // the torus alone may be too small to move one b to the others
        let mut mats = vec![self.torus(c), self.weyl()];
        for e in 0..f.alpha() {
            let b = f.powu(g, e as u64);
            let nb = f.powu(b, self.q + 1);
            let a = f
                .elements()
                .find(|&a| f.add(f.add(a, self.bar(a)), nb).is_zero())
                .expect("trace is onto");
            mats.push(self.unipotent(a, b));
        }
        let s = f
            .elements()
            .find(|&s| !s.is_zero() && f.add(s, self.bar(s)).is_zero())
            .expect("kernel of the trace is nontrivial");
        mats.push(self.unipotent(s, f.zero()));
        let mut gens = Vec::new();
        for m in &mats {
            if !self.preserves_form(m) {
                return Err(ActionError::Validation(format!("generator {m:?} does not preserve the form")));
            }
            gens.push(self.perm(&domain, m)?);
        }
        let group = PermGroup::from_generators_dedup(domain.len(), gens);
        let mut expected = self.pgu_order();
        if special {
            expected /= self.index_su();
        }
        let order = StabChain::new(&group, &[])?.order();
        if order != expected {
            return Err(ActionError::Validation(format!("group order {order}, expected {expected}")));
        }
        if !is_two_transitive(&group)? {
            return Err(ActionError::Validation("group is not two-transitive".into()));
        }
        Ok((group, domain))
    }

    /// Torus maps fixing E1 = (1,0,0) and E3 = (0,0,1).
    fn stabilizer(&self, special: bool) -> Result<StabilizerMapSet, ActionError> {
        let f = &self.f;
        let domain = self.domain()?;
        let e1 = domain.index_of(&DomainPoint::Vector(vec![f.one(), f.zero(), f.zero()])).unwrap();
        let e3 = domain.index_of(&DomainPoint::Vector(vec![f.zero(), f.zero(), f.one()])).unwrap();
        let mut maps = Vec::new();
        for c in f.elements().skip(1) {
            // c^(q-1) must be a cube for the special group; 3 ∤ q-1 here
            if special && self.index_su() == 3 && f.log(c)? % 3 != 0 {
                continue;
            }
            maps.push(self.perm(&domain, &self.torus(c))?);
        }
        StabilizerMapSet::new(domain, (e1, e3), maps)
    }
}

pub fn build_pgu3(q: u64) -> Result<(PermGroup, LabeledDomain), ActionError> {
    Unitary::new(q)?.build(false)
}

pub fn build_psu3(q: u64) -> Result<(PermGroup, LabeledDomain), ActionError> {
    Unitary::new(q)?.build(true)
}

pub fn pgu3_stabilizer(q: u64) -> Result<StabilizerMapSet, ActionError> {
    Unitary::new(q)?.stabilizer(false)
}

pub fn psu3_stabilizer(q: u64) -> Result<StabilizerMapSet, ActionError> {
    Unitary::new(q)?.stabilizer(true)
}

/// Quadratic forms on GF(2)^{2k} polarizing to the standard symplectic form.
/// Vectors are bit masks: bits 0..k are the x-coordinates, bits k..2k the y.
pub struct SymplecticSpace {
    k: usize,
}

impl SymplecticSpace {
    pub fn new(k: usize) -> Self {
        SymplecticSpace { k }
    }

    pub fn dim(&self) -> usize {
        2 * self.k
    }

    pub fn bilinear(&self, u: u32, v: u32) -> u8 {
        let mask = (1u32 << self.k) - 1;
        let (ux, uy, vx, vy) = (u & mask, u >> self.k, v & mask, v >> self.k);
        (((ux & vy) ^ (vx & uy)).count_ones() & 1) as u8
    }

    /// q0(x,y) = Σ x_i y_i.
    pub fn base_form(&self, v: u32) -> u8 {
        let mask = (1u32 << self.k) - 1;
        ((v & mask & (v >> self.k)).count_ones() & 1) as u8
    }

    /// Value table of q0 + b(c, ·).
    pub fn form_table(&self, c: u32) -> Vec<u8> {
        (0..1u32 << self.dim()).map(|v| self.base_form(v) ^ self.bilinear(c, v)).collect()
    }

    pub fn form_type(table: &[u8], k: usize) -> Option<Epsilon> {
        let zeros = table.iter().filter(|&&x| x == 0).count();
        let (big, half) = (1usize << (2 * k - 1), 1usize << (k - 1));
        if zeros == big + half {
            Some(Epsilon::Plus)
        } else if zeros == big - half {
            Some(Epsilon::Minus)
        } else {
            None
        }
    }

    pub fn transvection(&self, v: u32, x: u32) -> u32 {
        if self.bilinear(x, v) == 1 {
            x ^ v
        } else {
            x
        }
    }
}

pub fn sp_order(k: usize) -> BigUint {
    let mut o = BigUint::from(2u32).pow((k * k) as u32);
    for i in 1..=k {
        o *= BigUint::from(2u32).pow(2 * i as u32) - 1u32;
    }
    o
}

pub fn build_sp2k2(k: usize, epsilon: Epsilon) -> Result<(PermGroup, LabeledDomain), ActionError> {
    ActionSpec::Sp2k2 { k, epsilon }.validate()?;
    if k > 7 {
        return Err(ActionError::TooLarge(1 << (2 * k - 1)));
    }
    let space = SymplecticSpace::new(k);
    let mut forms: Vec<Vec<u8>> = (0..1u32 << space.dim())
        .map(|c| space.form_table(c))
        .filter(|t| SymplecticSpace::form_type(t, k) == Some(epsilon))
        .collect();
    forms.sort();
    let expected = ((1i64 << (2 * k - 1)) + epsilon.sign() * (1i64 << (k - 1))) as usize;
    if forms.len() != expected {
        return Err(ActionError::Validation(format!("{} forms of type {epsilon}, expected {expected}", forms.len())));
    }
    let domain = LabeledDomain::new(forms.into_iter().map(DomainPoint::Form).collect())?;

    // e_i, f_i and e_i + e_{i+1}: a connected set of vectors spanning V on
    // which no quadratic form is identically 1, so the transvections generate Sp
    let mut vs: Vec<u32> = (0..2 * k).map(|i| 1u32 << i).collect();
    vs.extend((0..k - 1).map(|i| (1u32 << i) | (1u32 << (i + 1))));
    let mut gens = Vec::new();
    for &v in &vs {
        gens.push(domain.perm_from_map(|pt| match pt {
            // (t q)(w) = q(t^{-1} w) and t is an involution
            DomainPoint::Form(t) => {
                DomainPoint::Form((0..t.len() as u32).map(|w| t[space.transvection(v, w) as usize]).collect())
            }
            _ => unreachable!("form domain"),
        })?);
    }
    let group = PermGroup::from_generators_dedup(domain.len(), gens);
    let order = StabChain::new(&group, &[])?.order();
    if order != sp_order(k) {
        return Err(ActionError::Validation(format!("order {order}, expected {}", sp_order(k))));
    }
    Ok((group, domain))
}

/// The explicit stabilizer of two points: a finite group of self-maps of the
/// domain fixing both.
#[derive(Clone, Debug)]
pub struct StabilizerMapSet {
    domain: LabeledDomain,
    base: (usize, usize),
    maps: Vec<Perm>,
}

impl StabilizerMapSet {
    /// Checks that every map fixes the base pair; closure is checked when a
    /// scheme is built from the set.
    pub fn new(domain: LabeledDomain, base: (usize, usize), maps: Vec<Perm>) -> Result<Self, ActionError> {
        let n = domain.len();
        if base.0 >= n || base.1 >= n || base.0 == base.1 {
            return Err(ActionError::Validation("bad base pair".into()));
        }
        for m in &maps {
            if m.degree() != n {
                return Err(ActionError::Validation("map degree differs from domain size".into()));
            }
            if m.apply(base.0) != base.0 || m.apply(base.1) != base.1 {
                return Err(ActionError::Validation("a map moves a base point".into()));
            }
        }
        Ok(StabilizerMapSet { domain, base, maps })
    }

    pub fn domain(&self) -> &LabeledDomain {
        &self.domain
    }

    pub fn base(&self) -> (usize, usize) {
        self.base
    }

    pub fn maps(&self) -> &[Perm] {
        &self.maps
    }

    /// True iff the set is closed under composition (hence a group, being
    /// finite).
    pub fn is_closed(&self) -> bool {
        let set: HashSet<&Perm> = self.maps.iter().collect();
        self.maps.iter().all(|a| self.maps.iter().all(|b| set.contains(&a.then(b))))
    }
}

fn odd_power_exponent(q: u64, p: u64) -> Result<u32, ActionError> {
    match prime_power(q) {
        Some((pp, e)) if pp as u64 == p && e % 2 == 1 => Ok(e),
        _ => constraint(format!("{q} is not an odd power of {p}")),
    }
}

fn suzuki_exponent(q: u64) -> Result<u32, ActionError> {
    let e = odd_power_exponent(q, 2)?;
    if e < 3 {
        return constraint("Suzuki groups need q = 2^(2k+1) with k >= 1");
    }
    Ok(e)
}

fn ree_exponent(q: u64) -> Result<u32, ActionError> {
    odd_power_exponent(q, 3)
}

/// The maps n_a on an ovoid-style domain; an image off the domain surfaces
/// as a validation error from `perm_from_map`.
fn ovoid_stabilizer<G>(f: &FieldSpec, points: Vec<DomainPoint>, expected: u64, scale: G) -> Result<StabilizerMapSet, ActionError>
where
    G: Fn(FieldElem, &[FieldElem]) -> Vec<FieldElem>,
{
    let mut pts = points;
    pts.push(DomainPoint::Infinity);
    if pts.len() as u64 != expected {
        return Err(ActionError::Validation(format!("{} points, expected {expected}", pts.len())));
    }
    let domain = LabeledDomain::new(pts)?;
    let zero = 0;
    let inf = domain.len() - 1;
    let mut maps = Vec::new();
    for a in f.elements().skip(1) {
        maps.push(domain.perm_from_map(|pt| match pt {
            DomainPoint::Vector(v) => DomainPoint::Vector(scale(a, v)),
            other => other.clone(),
        })?);
    }
    StabilizerMapSet::new(domain, (zero, inf), maps)
}

pub fn suzuki_stabilizer(q: u64) -> Result<StabilizerMapSet, ActionError> {
    let e = suzuki_exponent(q)?;
    check_size(q * q + 1)?;
    let k = (e - 1) / 2;
    let f = FieldSpec::new(2, e)?;
    let sigma = |a: FieldElem| f.powu(a, 1u64 << (k + 1));
    let fxy = |x: FieldElem, y: FieldElem| {
        let t = f.add(f.mul(x, y), f.mul(sigma(x), f.mul(x, x)));
        f.add(t, sigma(y))
    };
    let mut pts = Vec::new();
    for x in f.elements() {
        for y in f.elements() {
            pts.push(DomainPoint::Vector(vec![x, y, fxy(x, y)]));
        }
    }
    ovoid_stabilizer(
        &f,
        pts,
        q * q + 1,
        |a, v| {
            let sa = f.mul(sigma(a), a);
            vec![f.mul(a, v[0]), f.mul(sa, v[1]), f.mul(f.mul(sa, a), v[2])]
        },
    )
}

pub fn ree_stabilizer(q: u64) -> Result<StabilizerMapSet, ActionError> {
    let e = ree_exponent(q)?;
    check_size(q * q * q + 1)?;
    let k = (e - 1) / 2;
    let f = FieldSpec::new(3, e)?;
    let sigma = |a: FieldElem| f.powu(a, 3u64.pow(k + 1));
    let m = |a: FieldElem, b: FieldElem| f.mul(a, b);
    let add = |xs: &[FieldElem]| xs.iter().fold(f.zero(), |acc, &x| f.add(acc, x));
    let neg = |a: FieldElem| f.neg(a);
    let sextuple = |x: FieldElem, y: FieldElem, z: FieldElem| {
        let (sx, sy, sz) = (sigma(x), sigma(y), sigma(z));
        let x2 = m(x, x);
        let x3 = m(x2, x);
        let x4 = m(x3, x);
        let y2 = m(y, y);
        let fv = add(&[m(x2, y), neg(m(x, z)), sy, neg(m(sx, x3))]);
        let gv = add(&[m(sx, sy), neg(sz), m(x, y2), m(y, z), neg(m(m(sx, sx), x3))]);
        let hv = add(&[
            m(x, sz),
            // printed as σ(x)xy, which is not homogeneous under n_a for q > 3
            neg(m(m(sx, x), sy)),
            m(m(sx, x3), y),
            m(x2, y2),
            neg(m(sy, y)),
            neg(m(z, z)),
            m(m(sx, sx), x4),
        ]);
        vec![x, y, z, fv, gv, hv]
    };
    let mut pts = Vec::new();
    for x in f.elements() {
        for y in f.elements() {
            for z in f.elements() {
                pts.push(DomainPoint::Vector(sextuple(x, y, z)));
            }
        }
    }
    ovoid_stabilizer(
        &f,
        pts,
        q * q * q + 1,
        |a, v| {
            let sa = sigma(a);
            let a2 = m(a, a);
            let a3 = m(a2, a);
            let a4 = m(a3, a);
            let sa2 = m(sa, sa);
            let factors = [a, m(sa, a), m(sa, a2), m(sa, a3), m(sa2, a3), m(sa2, a4)];
            v.iter().zip(factors).map(|(&x, c)| m(c, x)).collect()
        },
    )
}

/// Reads a generator file: a line `degree N`, then one generator per line as
/// N space-separated 0-based images. Blank lines and `#` comments are ignored.
pub fn load_group_file(path: &Path) -> Result<(PermGroup, LabeledDomain), ActionError> {
    let text = std::fs::read_to_string(path).map_err(|source| ActionError::Io { path: path.to_path_buf(), source })?;
    parse_group_text(&text, path)
}

pub fn parse_group_text(text: &str, path: &Path) -> Result<(PermGroup, LabeledDomain), ActionError> {
    let err = |line: usize, msg: String| ActionError::Parse { path: path.to_path_buf(), line, msg };
    let mut degree = None;
    let mut gens = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        match degree {
            None => {
                let rest = line.strip_prefix("degree").ok_or_else(|| err(ln + 1, "expected `degree N`".into()))?;
                let d: usize = rest.trim().parse().map_err(|_| err(ln + 1, "bad degree".into()))?;
                if d == 0 || d > MAX_DOMAIN {
                    return Err(err(ln + 1, format!("unsupported degree {d}")));
                }
                degree = Some(d);
            }
            Some(d) => {
                let images: Vec<usize> = line
                    .split_whitespace()
                    .map(|t| t.parse::<usize>())
                    .collect::<Result<_, _>>()
                    .map_err(|_| err(ln + 1, "non-integer image".into()))?;
                if images.len() != d {
                    return Err(err(ln + 1, format!("{} images, expected {d}", images.len())));
                }
                gens.push(Perm::from_images(images).map_err(|_| err(ln + 1, "not a bijection".into()))?);
            }
        }
    }
    let d = degree.ok_or_else(|| err(0, "missing degree line".into()))?;
    let group = if gens.is_empty() { PermGroup::trivial(d) } else { PermGroup::new(d, gens)? };
    Ok((group, LabeledDomain::abstract_points(d)))
}

/// Bundled sporadic two-transitive actions: (key, display name, file).
pub const SPORADIC: &[(&str, &str, &str)] = &[
    ("M11", "M(11)", "m11.txt"),
    ("M11_12", "M(11) (degree 12)", "m11_12.txt"),
    ("M12", "M(12)", "m12.txt"),
    ("PSL2_11", "PSL(2,11) (degree 11)", "psl2_11.txt"),
    ("M22", "M(22)", "m22.txt"),
    ("A7", "A7 (degree 15)", "a7_15.txt"),
    ("M23", "M(23)", "m23.txt"),
    ("HS", "HS", "hs_176.txt"),
    ("M24", "M(24)", "m24.txt"),
    ("CO3", "Co3", "co3_276.txt"),
];

/// Canonical key for a sporadic group name, accepting the display names and
/// a few spellings (`m11`, `M(11)`, `co3`, `psl(2,11)`...).
pub fn sporadic_key(name: &str) -> Option<&'static str> {
    let norm: String = name
        .to_ascii_uppercase()
        .chars()
        .filter(|c| c.is_ascii_alphanumeric() || *c == '_')
        .collect();
    let norm = norm.replace("DEGREE", "_").replace("__", "_");
    let norm = norm.trim_end_matches('_');
    let alias = match norm {
        "M1112" | "M11_12" => "M11_12",
        "PSL211" | "PSL2_11" | "PSL211_11" | "PSL2_11_11" => "PSL2_11",
        "A7" | "A715" | "A7_15" => "A7",
        "HS" | "HS176" | "HS_176" => "HS",
        "CO3" | "CO3276" | "CO3_276" => "CO3",
        "M11_11" => "M11",
        other => other,
    };
    SPORADIC.iter().map(|(k, _, _)| *k).find(|k| *k == alias)
}

pub fn sporadic_entry(name: &str) -> Result<(&'static str, &'static str, &'static str), ActionError> {
    let key = sporadic_key(name).ok_or_else(|| ActionError::UnknownSporadic(name.to_string()))?;
    Ok(*SPORADIC.iter().find(|(k, _, _)| *k == key).unwrap())
}

/// The bundled data directory: `$TRISCHEME_DATA` if set, else the `data`
/// directory of the source tree.
pub fn default_data_dir() -> PathBuf {
    std::env::var_os("TRISCHEME_DATA")
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}

pub fn sporadic_path(name: &str, data_dir: &Path) -> Result<PathBuf, ActionError> {
    let (_, _, file) = sporadic_entry(name)?;
    Ok(data_dir.join("sporadic").join(file))
}

pub fn load_sporadic(name: &str, data_dir: &Path) -> Result<(PermGroup, LabeledDomain), ActionError> {
    load_group_file(&sporadic_path(name, data_dir)?)
}
