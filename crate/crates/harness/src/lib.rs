//! Scenario files, sweeps and figure reproduction on top of `blockade`.
//!
//! A scenario is a JSON document naming system parameters, a drive (or a
//! drive search), the truncation and the time span. Running it writes a
//! time series, a summary and a run record below the output directory;
//! records are keyed by a hash of the physical inputs, so repeated runs are
//! served from disk.

pub mod error;
pub mod fixtures;
pub mod output;
pub mod reproduce;
pub mod run;
pub mod scenario;
pub mod sweep;

pub use error::HarnessError;
pub use fixtures::{Fixtures, Outcome, Provenance, Tolerance};
pub use reproduce::{reproduce, Comparison, ReproduceOptions, Target};
pub use run::{run_scenario, RunOptions, RunRecord, RunStatus, Summary};
pub use scenario::{Overrides, Scenario, SearchConfig};
pub use sweep::{expand, sweep};
