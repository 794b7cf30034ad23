//! Exact finite-dimensional realization of the truncated Fock space over M
//! modes: occupation-number basis, creation/annihilation operators, the
//! modified b-fields weighted by sqrt((N - Num)/N), second-quantized
//! one-body operators, and the quadratic/monomial operator families built
//! from them.
//!
//! One asymmetry is deliberate: a*(f) truncates (it annihilates the top
//! sector n = N_max), so canonical commutation relations hold exactly only
//! on sectors <= N_max - 1. The b-fields carry a weight that vanishes on the
//! top sector before the raising operator acts, so they are exactly closed
//! on the truncated space and all their commutation identities hold with no
//! sector restriction.

mod basis;
mod fields;
mod pi;

pub use basis::{enumerate_basis, FockBasis, DEFAULT_DIMENSION_CAP};
pub use fields::{FockOperator, FockSpace, FockVector, Symmetry};
pub use pi::{quad_a, quad_b, pi1, pi1_tilde, pi2, FieldKind};
