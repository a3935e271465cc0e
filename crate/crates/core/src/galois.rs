//! Finite fields GF(p^α) in a polynomial basis.
//!
//! Elements are stored as a code whose base-p digits are the polynomial
//! coefficients, constant term most significant. Ordering codes numerically
//! is therefore the lexicographic order on coefficient sequences, low-degree
//! coefficient first, which is the element order used everywhere else.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Largest field order we are willing to tabulate.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field order {0} exceeds the supported maximum")]
    TooLarge(u64),
    #[error("zero has no inverse")]
    DivisionByZero,
    #[error("{q} is not p^a with a dividing {alpha}")]
    BadSubfield { q: u64, alpha: u32 },
    #[error("quadratic residues need odd characteristic")]
    EvenCharacteristic,
    #[error("zero is neither a residue nor a non-residue")]
    ZeroElement,
    #[error("bad coefficient list for GF({p}^{alpha})")]
    BadCoefficients { p: u32, alpha: u32 },
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElem(u32);

impl FieldElem {
    pub fn code(self) -> u32 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Debug for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// `Some((p, alpha))` if `n = p^alpha` with `p` prime and `alpha >= 1`.
pub fn prime_power(n: u64) -> Option<(u32, u32)> {
    if n < 2 {
        return None;
    }
    let mut p = 2u64;
    while p * p <= n && n % p != 0 {
        p += 1;
    }
    if n % p != 0 {
        p = n;
    }
    let (mut m, mut alpha) = (n, 0u32);
    while m % p == 0 {
        m /= p;
        alpha += 1;
    }
    (m == 1).then_some((p as u32, alpha))
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

// Polynomials over GF(p) as coefficient vectors, low degree first.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    // m monic
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let t = (r[shift + i] + p - (lead * c) % p) % p;
            r[shift + i] = t;
        }
        poly_trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u32], b: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut prod = vec![0u32; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(&prod, m, p)
}

/// Monic polynomial of the given degree whose lower coefficients are the
/// base-p digits of `idx`, constant term most significant.
fn monic_from_index(idx: u64, degree: u32, p: u32) -> Vec<u32> {
    let mut coeffs = vec![0u32; degree as usize + 1];
    let mut v = idx;
    for i in (0..degree as usize).rev() {
        coeffs[i] = (v % p as u64) as u32;
        v /= p as u64;
    }
    coeffs[degree as usize] = 1;
    coeffs
}

fn is_irreducible(m: &[u32], p: u32) -> bool {
    let deg = (m.len() - 1) as u32;
    for d in 1..=deg / 2 {
        for idx in 0..(p as u64).pow(d) {
            let g = monic_from_index(idx, d, p);
            if poly_rem(m, &g, p).is_empty() {
                return false;
            }
        }
    }
    true
}

#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    alpha: u32,
    order: u32,
    modulus: Vec<u32>,
    exp: Vec<u32>,
    log: Vec<u32>,
    neg: Vec<u32>,
    generator: FieldElem,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("alpha", &self.alpha)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.alpha == other.alpha && self.modulus == other.modulus
    }
}

impl Eq for FieldSpec {}

pub fn make_field(p: u32, alpha: u32) -> Result<FieldSpec, FieldError> {
    FieldSpec::new(p, alpha)
}

impl FieldSpec {
    pub fn new(p: u32, alpha: u32) -> Result<Self, FieldError> {
        if !is_prime(p as u64) {
            return Err(FieldError::NotPrime(p as u64));
        }
        if alpha == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let order = match (p as u64).checked_pow(alpha) {
            Some(n) if n <= MAX_FIELD_ORDER => n as u32,
            other => return Err(FieldError::TooLarge(other.unwrap_or(u64::MAX))),
        };
        let modulus = (0..order as u64)
            .map(|idx| monic_from_index(idx, alpha, p))
            .find(|m| is_irreducible(m, p))
            .expect("an irreducible polynomial of every degree exists");

        let mut f = FieldSpec {
            p,
            alpha,
            order,
            modulus,
            exp: Vec::new(),
            log: Vec::new(),
            neg: Vec::new(),
            generator: FieldElem(0),
        };
        f.neg = (0..order).map(|c| f.neg_slow(c)).collect();

        let q1 = (order - 1) as u64;
        let factors = prime_factors(q1);
        let generator = (1..order)
            .map(FieldElem)
            .find(|&x| factors.iter().all(|&r| f.pow_slow(x, q1 / r) != f.one()))
            .expect("the multiplicative group is cyclic");
        f.generator = generator;

        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; order as usize];
        let g = f.coeffs(generator);
        let mut cur = vec![1u32];
        for k in 0..q1 {
            let code = f.code_of_poly(&cur);
            exp.push(code);
            log[code as usize] = k as u32;
            cur = poly_mulmod(&cur, &g, &f.modulus, p);
        }
        f.exp = exp;
        f.log = log;
        Ok(f)
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    /// Number of elements.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Coefficients of the monic modulus, low degree first (length α+1).
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    pub fn zero(&self) -> FieldElem {
        FieldElem(0)
    }

    pub fn one(&self) -> FieldElem {
        FieldElem(self.p.pow(self.alpha - 1))
    }

    /// Coefficient sequence, low degree first.
    pub fn coeffs(&self, x: FieldElem) -> Vec<u32> {
        let mut out = vec![0u32; self.alpha as usize];
        let mut v = x.0;
        for i in (0..self.alpha as usize).rev() {
            out[i] = v % self.p;
            v /= self.p;
        }
        out
    }

    pub fn from_coeffs(&self, coeffs: &[u32]) -> Result<FieldElem, FieldError> {
        if coeffs.len() != self.alpha as usize || coeffs.iter().any(|&c| c >= self.p) {
            return Err(FieldError::BadCoefficients { p: self.p, alpha: self.alpha });
        }
        Ok(FieldElem(self.code_of_poly(coeffs)))
    }

    /// Element with the given code (as produced by [`FieldElem::code`]).
    pub fn elem(&self, code: u32) -> FieldElem {
        assert!(code < self.order, "code out of range");
        FieldElem(code)
    }

    /// The image of the integer `v` in the prime field.
    pub fn constant(&self, v: i64) -> FieldElem {
        let r = v.rem_euclid(self.p as i64) as u32;
        FieldElem(r * self.p.pow(self.alpha - 1))
    }

    fn code_of_poly(&self, poly: &[u32]) -> u32 {
        let mut code = 0u32;
        for i in 0..self.alpha as usize {
            code = code * self.p + poly.get(i).copied().unwrap_or(0);
        }
        code
    }

    /// All elements in increasing order.
    pub fn elements(&self) -> impl Iterator<Item = FieldElem> {
        (0..self.order).map(FieldElem)
    }

    pub fn add(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        if self.p == 2 {
            return FieldElem(x.0 ^ y.0);
        }
        let (mut a, mut b) = (x.0, y.0);
        let (mut code, mut place) = (0u32, 1u32);
        for _ in 0..self.alpha {
            code += ((a % self.p + b % self.p) % self.p) * place;
            a /= self.p;
            b /= self.p;
            place *= self.p;
        }
        FieldElem(code)
    }

    fn neg_slow(&self, c: u32) -> u32 {
        let (mut a, mut code, mut place) = (c, 0u32, 1u32);
        for _ in 0..self.alpha {
            code += ((self.p - a % self.p) % self.p) * place;
            a /= self.p;
            place *= self.p;
        }
        code
    }

    pub fn neg(&self, x: FieldElem) -> FieldElem {
        FieldElem(self.neg[x.0 as usize])
    }

    pub fn sub(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FieldElem, y: FieldElem) -> FieldElem {
        if x.0 == 0 || y.0 == 0 {
            return FieldElem(0);
        }
        let n1 = self.order - 1;
        let s = (self.log[x.0 as usize] + self.log[y.0 as usize]) % n1;
        FieldElem(self.exp[s as usize])
    }

    pub fn inv(&self, x: FieldElem) -> Result<FieldElem, FieldError> {
        if x.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let n1 = self.order - 1;
        Ok(FieldElem(self.exp[((n1 - self.log[x.0 as usize]) % n1) as usize]))
    }

    pub fn div(&self, x: FieldElem, y: FieldElem) -> Result<FieldElem, FieldError> {
        Ok(self.mul(x, self.inv(y)?))
    }

    pub fn pow(&self, x: FieldElem, e: i64) -> Result<FieldElem, FieldError> {
        if x.0 == 0 {
            return match e {
                0 => Ok(self.one()),
                e if e > 0 => Ok(FieldElem(0)),
                _ => Err(FieldError::DivisionByZero),
            };
        }
        let n1 = (self.order - 1) as i64;
        let k = (self.log[x.0 as usize] as i64 * e.rem_euclid(n1)).rem_euclid(n1);
        Ok(FieldElem(self.exp[k as usize]))
    }

    /// `x^e` for `e >= 0`; never fails.
    pub fn powu(&self, x: FieldElem, e: u64) -> FieldElem {
        if x.0 == 0 {
            return if e == 0 { self.one() } else { FieldElem(0) };
        }
        let n1 = (self.order - 1) as u64;
        let k = (self.log[x.0 as usize] as u64 * (e % n1)) % n1;
        FieldElem(self.exp[k as usize])
    }

    // Square-and-multiply on polynomials; used before the tables exist.
    fn pow_slow(&self, x: FieldElem, mut e: u64) -> FieldElem {
        let mut base = self.coeffs(x);
        poly_trim(&mut base);
        let mut acc = vec![1u32];
        while e > 0 {
            if e & 1 == 1 {
                acc = poly_mulmod(&acc, &base, &self.modulus, self.p);
            }
            base = poly_mulmod(&base, &base, &self.modulus, self.p);
            e >>= 1;
        }
        FieldElem(self.code_of_poly(&acc))
    }

    /// Discrete logarithm to the base of [`Self::multiplicative_generator`].
    pub fn log(&self, x: FieldElem) -> Result<u32, FieldError> {
        if x.0 == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.log[x.0 as usize])
    }

    pub fn multiplicative_generator(&self) -> FieldElem {
        self.generator
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, x: FieldElem) -> Result<u64, FieldError> {
        let l = self.log(x)? as u64;
        let n1 = (self.order - 1) as u64;
        Ok(n1 / gcd(l, n1))
    }

    /// `a` with `q = p^a` and `a | alpha`.
    fn subfield_exponent(&self, q: u64) -> Result<u32, FieldError> {
        let bad = FieldError::BadSubfield { q, alpha: self.alpha };
        match prime_power(q) {
            Some((p, a)) if p == self.p && self.alpha % a == 0 => Ok(a),
            _ => Err(bad),
        }
    }

    /// `{x^(q^β) : 1 <= β <= α/a}` where `q = p^a`.
    pub fn galois_orbit(&self, x: FieldElem, q: u64) -> Result<BTreeSet<FieldElem>, FieldError> {
        let a = self.subfield_exponent(q)?;
        let mut out = BTreeSet::new();
        let mut y = x;
        for _ in 0..self.alpha / a {
            y = self.powu(y, q);
            out.insert(y);
        }
        Ok(out)
    }

    pub fn degree_over_subfield(&self, x: FieldElem, q: u64) -> Result<usize, FieldError> {
        Ok(self.galois_orbit(x, q)?.len())
    }

    pub fn is_quadratic_residue(&self, x: FieldElem) -> Result<bool, FieldError> {
        if self.p == 2 {
            return Err(FieldError::EvenCharacteristic);
        }
        if x.0 == 0 {
            return Err(FieldError::ZeroElement);
        }
        Ok(self.log[x.0 as usize] % 2 == 0)
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}
