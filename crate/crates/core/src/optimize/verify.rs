use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fock_sim::{DensityMatrix, ObservableSeries, Simulator, StepControl};
use crate::model::{DriveSpec, SystemParams, Truncation};

use super::search::OptimizationResult;

/// Relative band used for the flat-minimum width.
pub const FLAT_BAND: f64 = 0.05;
/// Extra simulated time past `t_op`, in periods, so the width is not cut off.
pub const TAIL_PERIODS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub t_op: f64,
    pub t_final: f64,
    /// Exact `g²(t_op)`; `None` when the cavity is (nearly) empty.
    pub g2: Option<f64>,
    pub p1: f64,
    pub p2: f64,
    /// Periods during which `g²` stays within ±5% of `g²(t_op)`.
    pub flat_width: Option<f64>,
    pub validated: bool,
    pub substeps: usize,
}

/// Simulates `drive` from the vacuum to `t_op + 1` periods and compares with
/// the analytic `g̃²` if given. Also returns the sampled series.
pub fn verify_drive(
    drive: &DriveSpec,
    p: &SystemParams,
    t: Truncation,
    t_op: f64,
    g2_tilde: Option<f64>,
    step: &StepControl,
) -> Result<(Verification, ObservableSeries)> {
    let sim = Simulator::new(p, t)?;
    let t_final = t_op + TAIL_PERIODS;
    let series = sim.evolve(&DensityMatrix::vacuum(t), drive, t_final * p.period(), step)?;
    Ok((verification_from_series(&series, t_op, g2_tilde), series))
}

/// Reads the verification quantities at `t_op` off an existing simulation.
pub fn verification_from_series(
    series: &ObservableSeries,
    t_op: f64,
    g2_tilde: Option<f64>,
) -> Verification {
    let k = series.index_at(t_op);
    let g2 = series.g2[k];
    let validated = match (g2, g2_tilde) {
        (Some(g), Some(gt)) => g <= 2.0 * gt || (g < 1e-4 && gt < 1e-4),
        _ => false,
    };
    Verification {
        t_op,
        t_final: series.times.last().copied().unwrap_or(0.0),
        g2,
        p1: series.p(1, k),
        p2: series.p(2, k),
        flat_width: series.flat_width(t_op, FLAT_BAND),
        validated,
        substeps: series.substeps,
    }
}

/// Attaches an exact-simulator check to an optimization result.
pub fn verify(
    result: &OptimizationResult,
    p: &SystemParams,
    t: Truncation,
    step: &StepControl,
) -> Result<OptimizationResult> {
    let (v, _) = verify_drive(
        &result.drive,
        p,
        t,
        result.spec.t_op,
        Some(result.analytic.g2_tilde),
        step,
    )?;
    let mut out = result.clone();
    out.verification = Some(v);
    Ok(out)
}
