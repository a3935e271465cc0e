//! Association schemes on triples (ASTs) from two-transitive permutation
//! groups: construction, parameters, intersection numbers, verification of
//! the axioms, and closed-form predictions for the classical families.
//!
//! ```
//! use trischeme::actions::build_sym_alt;
//! use trischeme::scheme::build_scheme;
//!
//! let (g, _) = build_sym_alt(5, false).unwrap();
//! let s = build_scheme(&g).unwrap();
//! assert_eq!(s.size(), 5);
//! assert_eq!(s.third_valency(4), 3);
//! ```

pub mod actions;
pub mod closedform;
pub mod galois;
pub mod permgrp;
pub mod scheme;
pub mod ternalg;

/// Intersection tensor with 64-bit counts.
pub type Tensor = scheme::IntersectionTensor<u64>;
/// Intersection tensor with 32-bit counts (enough for ν < 2^32).
pub type Tensor32 = scheme::IntersectionTensor<u32>;
/// Hypermatrix with signed 64-bit entries.
pub type Hypermatrix = ternalg::Hypermatrix<i64>;
