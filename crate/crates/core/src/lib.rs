//! Desk-scale numerical laboratory for dilute Bose gas dynamics.
//!
//! The crate realizes, on finite grids and truncated Fock spaces, the
//! constructive objects behind Gross-Pitaevskii dynamics of Bose-Einstein
//! condensates: radial scattering problems, the (modified) time-dependent
//! Gross-Pitaevskii equation, exact occupation-number Fock algebra with the
//! modified `b`-fields, the condensate excitation map, generalized Bogoliubov
//! transformations, correlation kernels, and the fluctuation dynamics with
//! its time-dependent generator. Every identity, commutator, and operator
//! inequality used along the way is checkable as an exact matrix statement
//! or a quantitative inequality at small mode counts and particle numbers.

pub mod bogoliubov;
pub mod config;
pub mod correlations;
pub mod error;
pub mod excitations;
pub mod fock;
pub mod gp;
pub mod grid;
pub mod linalg;
pub mod manybody;
pub mod fluctuation;
pub mod ode;
pub mod report;
pub mod scattering;
pub mod scenarios;
pub mod sparse;

pub use error::{Error, Result};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex<f64>;
