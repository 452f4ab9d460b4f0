//! Numerically exact master-equation evolution in a truncated photon ⊗ phonon
//! Fock space.

mod evolve;
mod liouvillian;
mod operators;
mod sparse;
mod state;

pub use evolve::{evolve, g2_tilde_from_populations, ObservableSeries, Simulator, StepControl};
pub use liouvillian::{
    commutator, dephasing_rate, dissipator, drive_superoperators, hamiltonian, liouvillian_static,
    sandwich,
};
pub use operators::{annihilation, number_ops, LadderOps};
pub use sparse::SparseMatrix;
pub use state::{
    coherent_state, g2_exact, thermal_populations, thermal_state, DensityMatrix, DIAGONAL_FLOOR,
    HERMITICITY_TOL, THERMAL_TAIL_LIMIT, TRACE_TOL,
};
