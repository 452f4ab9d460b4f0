use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{BlockadeError, Result};
use crate::model::{DriveSpec, ObjectiveSpec, SystemParams};

use super::nelder_mead::{LocalResult, NelderMead};
use super::objective::{Objective, ObjectiveBreakdown};
use super::space::SearchSpace;
use super::verify::Verification;

pub const MIN_BUDGET: usize = 100;
const PRIMES: [u32; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MinimizeOptions {
    pub restarts: usize,
    /// Objective evaluations allowed per restart.
    pub budget: usize,
    pub seed: u64,
    /// Taylor depth of the perturbative model.
    pub order: usize,
    pub tolerance: f64,
    pub initial_step: f64,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            restarts: 16,
            budget: 1000,
            seed: 0,
            order: 1,
            tolerance: 1e-7,
            initial_step: 0.05,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchReport {
    pub restarts: usize,
    pub seed: u64,
    pub budget: usize,
    pub evaluations: usize,
    /// Index of the restart that produced the result.
    pub best_restart: usize,
    pub iterations: usize,
    pub converged: bool,
    pub converged_restarts: usize,
    /// Lowest objective among the start points.
    pub best_start_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizationResult {
    pub drive: DriveSpec,
    pub objective: f64,
    pub spec: ObjectiveSpec,
    pub order: usize,
    pub analytic: ObjectiveBreakdown,
    pub search: SearchReport,
    pub verification: Option<Verification>,
}

/// Radical inverse of `i` in base `b`.
fn radical_inverse(mut i: u64, b: u32) -> f64 {
    let b = b as u64;
    let mut f = 1.0;
    let mut r = 0.0;
    while i > 0 {
        f /= b as f64;
        r += f * (i % b) as f64;
        i /= b;
    }
    r
}

/// Halton points in `[0, 1)^dims` with a seeded Cranley–Patterson shift.
pub fn start_points(count: usize, dims: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let shift: Vec<f64> = (0..dims).map(|_| rng.random::<f64>()).collect();
    (0..count)
        .map(|k| {
            (0..dims)
                .map(|j| {
                    let base = if j < PRIMES.len() {
                        radical_inverse(k as u64 + 1, PRIMES[j])
                    } else {
                        rng.random::<f64>()
                    };
                    (base + shift[j]).fract()
                })
                .collect()
        })
        .collect()
}

/// Multi-start Nelder–Mead over unit-scaled coordinates. Restarts run in
/// parallel; the winner is the lowest value, ties broken by restart index.
pub fn multi_start<F>(
    f: F,
    dims: usize,
    periodic: &[bool],
    opts: &MinimizeOptions,
) -> (usize, Vec<LocalResult>, f64)
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    let nm = NelderMead {
        budget: opts.budget,
        tolerance: opts.tolerance,
        initial_step: opts.initial_step,
    };
    let starts = start_points(opts.restarts, dims, opts.seed);
    let runs: Vec<(LocalResult, f64)> = starts
        .par_iter()
        .map(|x0| {
            let mut first = None;
            let r = nm.minimize(
                |x| {
                    let v = f(x);
                    first.get_or_insert(v);
                    v
                },
                x0,
                periodic,
            );
            let v0 = first.unwrap_or(f64::INFINITY);
            (r, if v0.is_finite() { v0 } else { f64::INFINITY })
        })
        .collect();
    let best_start = runs.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    let results: Vec<LocalResult> = runs.into_iter().map(|(r, _)| r).collect();
    let best = (0..results.len())
        .min_by(|&a, &b| {
            results[a]
                .value
                .total_cmp(&results[b].value)
                .then(a.cmp(&b))
        })
        .expect("at least one restart");
    (best, results, best_start)
}

/// Searches `space` for the drive minimizing `spec`. Deterministic for a
/// given seed; undefined objective values count as `+∞`.
pub fn minimize(
    spec: &ObjectiveSpec,
    p: &SystemParams,
    space: &SearchSpace,
    opts: &MinimizeOptions,
) -> Result<OptimizationResult> {
    space.validate()?;
    if opts.budget < MIN_BUDGET {
        return Err(BlockadeError::InvalidParameter {
            field: "budget".into(),
            value: opts.budget as f64,
            reason: "must be at least 100 evaluations",
        });
    }
    if opts.restarts == 0 {
        return Err(BlockadeError::InvalidParameter {
            field: "restarts".into(),
            value: 0.0,
            reason: "must be positive",
        });
    }
    let obj = Objective::new(spec, p, opts.order)?;
    let f = |x: &[f64]| obj.eval(&space.decode(x)).unwrap_or(f64::INFINITY);
    let (best, runs, best_start) = multi_start(f, space.dims(), &space.periodic_mask(), opts);
    let winner = &runs[best];
    if !winner.value.is_finite() {
        return Err(BlockadeError::Undefined(
            "objective undefined at every probe point",
        ));
    }
    let drive = space.decode(&winner.x);
    let analytic = obj.breakdown(&drive)?;
    Ok(OptimizationResult {
        drive,
        objective: winner.value,
        spec: *spec,
        order: opts.order,
        analytic,
        search: SearchReport {
            restarts: opts.restarts,
            seed: opts.seed,
            budget: opts.budget,
            evaluations: runs.iter().map(|r| r.evaluations).sum(),
            best_restart: best,
            iterations: winner.iterations,
            converged: winner.converged,
            converged_restarts: runs.iter().filter(|r| r.converged).count(),
            best_start_value: best_start,
        },
        verification: None,
    })
}
