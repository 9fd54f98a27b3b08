//! Solvers for minimum-complexity group-translation transformations.
//!
//! Given two labeled point sets `A` and `B` in `R^d` (equivalently a set of
//! displacement vectors `delta_i = b_i - a_i`), compute the cheapest set of
//! group translations realizing all displacements. A solution assigns a
//! translation vector to each group (subset of point indices); point `i` is
//! realized when the translations of all groups containing `i` sum to
//! `delta_i` exactly.
//!
//! Problem variants are named `Minimum {Cardinality, Length} {Given,
//! Disjoint, Hierarchical, Free} Transformation` (MCDT, MLDT, MLGT, MCHT,
//! MLHT, MCFT, MLFT). The crate provides:
//!
//! - exact solvers for the disjoint variants and the 1D length variants,
//! - a linear-time tree-median solver for 1D hierarchical given families,
//! - a generic convex solver for arbitrary given families,
//! - the MLHT / Euclidean-Steiner-tree correspondence with a tiny exact
//!   solver by topology enumeration,
//! - a `sin(pi/8)+cos(pi/8)`-approximation for the Euclidean MLFT,
//! - NP-hardness gadgetry (vertex-cover encoding, base-A dimension
//!   reduction) and desk-scale brute-force oracles.
//!
//! All validity checks and 1D/Manhattan costs use exact rational
//! arithmetic; floating point appears only in Euclidean norms and the
//! iterative geometric optimizers.

pub mod disjoint;
pub mod error;
pub mod exec;
pub mod free;
pub mod given;
pub mod hardness;
pub mod hierarchy;
pub mod io;
pub mod linalg;
pub mod median;
pub mod model;
pub mod oracle;
pub mod scalar;
pub mod simplex;
pub mod smooth;

pub use error::{Error, Result};
pub use model::{
    check_validity, evaluate_cost, validate_family_kind, CostReport, DisplacementSet, FamilyKind,
    GroupFamily, NormKind, Transformation, Vector,
};
pub use scalar::Scalar;
