//! Dense ν×ν×ν hypermatrices, the ternary product, and a direct check of
//! A_i A_j A_k = Σ_l p_ijk^l A_l.

use num_traits::PrimInt;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::scheme::{IntersectionTensor, Label, TripleScheme};

/// Default cap on ν for dense hypermatrix work.
pub const HYPERMATRIX_CAP: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TernaryError {
    #[error("hypermatrix sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("{nu} points exceeds the hypermatrix cap of {cap}")]
    CapExceeded { nu: usize, cap: usize },
    #[error("the scheme cannot classify arbitrary triples")]
    NoGroup,
    #[error("tensor has {0} relations, scheme has {1}")]
    TensorMismatch(usize, usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Hypermatrix<T> {
    nu: usize,
    entries: Vec<T>,
}

impl<T: PrimInt + Send + Sync> Hypermatrix<T> {
    pub fn zeros(nu: usize) -> Self {
        Hypermatrix { nu, entries: vec![T::zero(); nu * nu * nu] }
    }

    pub fn from_fn(nu: usize, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut entries = Vec::with_capacity(nu * nu * nu);
        for x in 0..nu {
            for y in 0..nu {
                for z in 0..nu {
                    entries.push(f(x, y, z));
                }
            }
        }
        Hypermatrix { nu, entries }
    }

    pub fn nu(&self) -> usize {
        self.nu
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, z: usize) -> T {
        self.entries[(x * self.nu + y) * self.nu + z]
    }

    pub fn set(&mut self, x: usize, y: usize, z: usize, v: T) {
        let n = self.nu;
        self.entries[(x * n + y) * n + z] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn sum(&self) -> T {
        self.entries.iter().fold(T::zero(), |a, &b| a + b)
    }

    pub fn add(&self, other: &Self) -> Result<Self, TernaryError> {
        if self.nu != other.nu {
            return Err(TernaryError::SizeMismatch(self.nu, other.nu));
        }
        let entries = self.entries.iter().zip(&other.entries).map(|(&a, &b)| a + b).collect();
        Ok(Hypermatrix { nu: self.nu, entries })
    }

    pub fn scale(&self, c: T) -> Self {
        Hypermatrix { nu: self.nu, entries: self.entries.iter().map(|&a| a * c).collect() }
    }
}

/// Labels of all ν³ triples, indexed (x·ν + y)·ν + z.
fn label_cube(s: &TripleScheme, cap: usize) -> Result<Vec<Label>, TernaryError> {
    let nu = s.nu();
    if nu > cap {
        return Err(TernaryError::CapExceeded { nu, cap });
    }
    if !s.has_group() {
        return Err(TernaryError::NoGroup);
    }
    Ok((0..nu * nu * nu).into_par_iter().map(|t| s.classify(t / (nu * nu), t / nu % nu, t % nu)).collect())
}

pub fn adjacency<T: PrimInt + Send + Sync>(s: &TripleScheme, i: Label, cap: usize) -> Result<Hypermatrix<T>, TernaryError> {
    let cube = label_cube(s, cap)?;
    Ok(Hypermatrix { nu: s.nu(), entries: cube.iter().map(|&l| if l == i { T::one() } else { T::zero() }).collect() })
}

/// All adjacency hypermatrices A_0..A_m.
pub fn adjacency_all<T: PrimInt + Send + Sync>(s: &TripleScheme, cap: usize) -> Result<Vec<Hypermatrix<T>>, TernaryError> {
    let cube = label_cube(s, cap)?;
    Ok((0..s.size())
        .map(|i| Hypermatrix {
            nu: s.nu(),
            entries: cube.iter().map(|&l| if l == i { T::one() } else { T::zero() }).collect(),
        })
        .collect())
}

/// D_xyz = Σ_w A_wyz B_xwz C_xyw.
pub fn ternary_product<T: PrimInt + Send + Sync>(
    a: &Hypermatrix<T>,
    b: &Hypermatrix<T>,
    c: &Hypermatrix<T>,
) -> Result<Hypermatrix<T>, TernaryError> {
    let n = a.nu;
    for m in [b, c] {
        if m.nu != n {
            return Err(TernaryError::SizeMismatch(n, m.nu));
        }
    }
    let mut entries = vec![T::zero(); n * n * n];
    entries.par_chunks_mut(n * n).enumerate().for_each(|(x, plane)| {
        for y in 0..n {
            for z in 0..n {
                let mut acc = T::zero();
                for w in 0..n {
                    let cv = c.entries[(x * n + y) * n + w];
                    if cv.is_zero() {
                        continue;
                    }
                    acc = acc + a.entries[(w * n + y) * n + z] * b.entries[(x * n + w) * n + z] * cv;
                }
                plane[y * n + z] = acc;
            }
        }
    });
    Ok(Hypermatrix { nu: n, entries })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub ijk: [Label; 3],
    pub xyz: [usize; 3],
    pub product: i64,
    pub expected: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StructureReport {
    pub products_checked: usize,
    pub violations: Vec<Violation>,
    /// Total violating entries (the list above is truncated).
    pub violation_count: usize,
}

impl StructureReport {
    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }
}

const MAX_LISTED_VIOLATIONS: usize = 20;

/// Compares every ternary product A_i A_j A_k with Σ_l p_ijk^l A_l.
pub fn verify_structure_constants<T: PrimInt + Send + Sync>(
    s: &TripleScheme,
    t: &IntersectionTensor<T>,
    cap: usize,
) -> Result<StructureReport, TernaryError> {
    if t.size() != s.size() {
        return Err(TernaryError::TensorMismatch(t.size(), s.size()));
    }
    let cube = label_cube(s, cap)?;
    let adj: Vec<Hypermatrix<i64>> = adjacency_all(s, cap)?;
    let size = s.size();
    let ijks: Vec<[Label; 3]> =
        (0..size).flat_map(|i| (0..size).flat_map(move |j| (0..size).map(move |k| [i, j, k]))).collect();
    let per: Vec<(usize, Vec<Violation>)> = ijks
        .par_iter()
        .map(|&[i, j, k]| {
            let d = ternary_product_seq(&adj[i], &adj[j], &adj[k]);
            let mut count = 0;
            let mut listed = Vec::new();
            for (ix, &v) in d.iter().enumerate() {
                let expected = t.get(i, j, k, cube[ix]).to_i64().expect("count fits in i64");
                if v != expected {
                    count += 1;
                    if listed.len() < MAX_LISTED_VIOLATIONS {
                        let n = s.nu();
                        listed.push(Violation { ijk: [i, j, k], xyz: [ix / (n * n), ix / n % n, ix % n], product: v, expected });
                    }
                }
            }
            (count, listed)
        })
        .collect();
    let violation_count = per.iter().map(|p| p.0).sum();
    let violations = per.into_iter().flat_map(|p| p.1).take(MAX_LISTED_VIOLATIONS).collect();
    Ok(StructureReport { products_checked: ijks.len(), violations, violation_count })
}

// Single-threaded product for use inside an outer parallel loop.
fn ternary_product_seq(a: &Hypermatrix<i64>, b: &Hypermatrix<i64>, c: &Hypermatrix<i64>) -> Vec<i64> {
    let n = a.nu;
    let mut out = vec![0i64; n * n * n];
    for x in 0..n {
        for y in 0..n {
            let crow = &c.entries[(x * n + y) * n..(x * n + y + 1) * n];
            for w in 0..n {
                if crow[w] == 0 {
                    continue;
                }
                let arow = &a.entries[(w * n + y) * n..(w * n + y + 1) * n];
                let brow = &b.entries[(x * n + w) * n..(x * n + w + 1) * n];
                let orow = &mut out[(x * n + y) * n..(x * n + y + 1) * n];
                for z in 0..n {
                    orow[z] += arow[z] * brow[z] * crow[w];
                }
            }
        }
    }
    out
}
