//! Closed-form leading-order photon occupations in the weak-drive regime.
//!
//! `p₁` and `p₂` are time-ordered integrals of the drive against the
//! displaced-frame phonon kernel. The kernel's double exponential is expanded
//! to Taylor depth `K` in `(g₀/ω_m)²`, which turns every integrand into a sum
//! of exponentials that [`simplex`] integrates exactly.

pub mod expsum;
pub mod kernels;
mod occupation;
pub mod simplex;

pub use expsum::{ExpSum, Term};
pub use kernels::{Kernels, SignTable, PAIRS};
pub use occupation::{
    g2_tilde, g2_tilde_derivs, p1_analytic, p2_analytic, Jet, Occupations, PerturbativeModel,
    Route, MAX_ORDER, NEGATIVE_WARN, NOISE_RELATIVE, P1_FLOOR,
};
pub use simplex::{exp_divided_difference, simplex_exp, simplex_exp_derivs, simplex_integrate};
