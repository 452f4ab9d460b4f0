//! Drive optimization on the perturbative model, with exact verification.

mod nelder_mead;
mod objective;
mod search;
mod space;
mod verify;

pub use nelder_mead::{LocalResult, NelderMead};
pub use objective::{objective, Objective, ObjectiveBreakdown};
pub use search::{
    minimize, multi_start, start_points, MinimizeOptions, OptimizationResult, SearchReport,
    MIN_BUDGET,
};
pub use space::{Bound, SearchSpace, ToneBounds, DEFAULT_AMPLITUDE_MAX, DEFAULT_DETUNING_WINDOW};
pub use verify::{
    verification_from_series, verify, verify_drive, Verification, FLAT_BAND, TAIL_PERIODS,
};
