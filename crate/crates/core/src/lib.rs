//! Fast optomechanical photon blockade.
//!
//! The crate is organised around four layers:
//!
//! * [`model`] holds the shared value types (system rates, drive tones,
//!   truncation, objective specification) in units where `ω_m = 1`.
//! * [`fock_sim`] integrates the Lindblad master equation in a truncated
//!   photon ⊗ phonon Fock space and is the reference for everything else.
//! * [`perturb`] evaluates the closed-form leading-order photon occupations
//!   `p₁(t)`, `p₂(t)` and the approximate autocorrelation `g̃²(t)`.
//! * [`optimize`] searches drive parameters for minimal `g̃²` (or the
//!   flat-minimum objectives) and verifies optima with the simulator.

pub mod error;
pub mod fock_sim;
pub mod model;
pub mod optimize;
pub mod perturb;

pub use error::{BlockadeError, Result};
pub use model::{
    spectrum, DriveSpec, DriveTone, ObjectiveKind, ObjectiveSpec, SystemParams, Truncation,
};

/// Complex scalar used throughout the crate.
pub type C64 = num_complex::Complex64;
