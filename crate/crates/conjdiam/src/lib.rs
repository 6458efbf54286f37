//! Exact conjugacy diameters of the non-abelian finite p-groups with a
//! cyclic maximal subgroup (semidihedral, generalized quaternion, modular),
//! plus dihedral groups.
//!
//! The crate builds each group in exponent normal form, computes
//! conjugation-invariant word norms by breadth-first search, derives the
//! diameters Δ_n(G) and Δ(G) by exact enumeration over conjugation-closed
//! generating unions, and cross-checks every closed-form formula against
//! these brute-force oracles.

pub mod error;
pub mod formula;
pub mod group;
pub mod harness;
pub mod norm;
pub mod parse;

pub use error::{Error, Result};
pub use group::{order_cap_from_env, Element, Family, Group, GroupSpec, DEFAULT_ORDER_CAP};
pub use norm::{delta, delta_n, group_norm, word_norms, DeltaReport, Parallelism};
