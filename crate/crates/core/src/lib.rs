//! Ground-state bounds, spectra and equipotential sections for the
//! two-dimensional sextic potential
//! `V = A x² + B y² + C x²y² + D (x²y⁴ + x⁴y²)`.
//!
//! For `A, B < 0` the potential is unbounded below along the axes, yet for
//! the right couplings the Hamiltonian `−Δ + V` still has a purely discrete
//! spectrum. The crate provides the parameter maps and regime test
//! ([`params`]), analytic lower bounds on the ground energy ([`bounds`]),
//! level sets of `V` ([`potential`]), a finite-difference eigensolver with a
//! box-size collapse detector ([`fdsolver`]) and the gaussian that is exact
//! on the critical surface `δ = 0` ([`exactstate`]).

// `!(x > 0.0)` is the NaN-rejecting form of the domain checks.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod exactstate;
pub mod fdsolver;
pub mod params;
pub mod potential;
pub mod search;

pub use error::{Error, Result};
pub use params::{Couplings, GreekParams, RegimeLabel};
