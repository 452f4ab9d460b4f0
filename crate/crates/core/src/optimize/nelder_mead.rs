//! Bounded Nelder–Mead simplex search in unit-scaled coordinates.

use serde::{Deserialize, Serialize};

/// Outcome of one simplex run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalResult {
    pub x: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct NelderMead {
    /// Evaluation limit.
    pub budget: usize,
    /// Converged once every vertex lies within this (∞-norm) of the best.
    pub tolerance: f64,
    /// Edge length of the initial simplex.
    pub initial_step: f64,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            budget: 1000,
            tolerance: 1e-7,
            initial_step: 0.05,
        }
    }
}

impl NelderMead {
    /// Minimizes `f` from `x0`. Coordinates flagged in `periodic` are left
    /// unbounded (the caller wraps them); the rest are projected onto
    /// `[0, 1]`. Non-finite values count as `+∞`.
    pub fn minimize<F>(&self, mut f: F, x0: &[f64], periodic: &[bool]) -> LocalResult
    where
        F: FnMut(&[f64]) -> f64,
    {
        let n = x0.len();
        assert_eq!(periodic.len(), n);
        let project = |x: &mut Vec<f64>| {
            for (v, &p) in x.iter_mut().zip(periodic) {
                if !p {
                    *v = v.clamp(0.0, 1.0);
                }
            }
        };
        let mut evaluations = 0;
        let mut eval = |x: &[f64], evaluations: &mut usize| {
            *evaluations += 1;
            let v = f(x);
            if v.is_finite() {
                v
            } else {
                f64::INFINITY
            }
        };

        let mut start = x0.to_vec();
        project(&mut start);
        let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
        let v0 = eval(&start, &mut evaluations);
        simplex.push((start.clone(), v0));
        for i in 0..n {
            let mut x = start.clone();
            // step inward when the start sits on the upper bound
            x[i] += if !periodic[i] && x[i] + self.initial_step > 1.0 {
                -self.initial_step
            } else {
                self.initial_step
            };
            project(&mut x);
            let v = eval(&x, &mut evaluations);
            simplex.push((x, v));
        }

        let mut iterations = 0;
        let mut converged = false;
        loop {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = &simplex[0].0;
            let diameter = simplex[1..]
                .iter()
                .flat_map(|(x, _)| x.iter().zip(best).map(|(a, b)| (a - b).abs()))
                .fold(0.0, f64::max);
            if diameter < self.tolerance {
                converged = true;
                break;
            }
            if evaluations >= self.budget {
                break;
            }
            iterations += 1;

            let mut centroid = vec![0.0; n];
            for (x, _) in &simplex[..n] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / n as f64;
                }
            }
            let worst = simplex[n].clone();
            let along = |t: f64| -> Vec<f64> {
                let mut x: Vec<f64> = centroid
                    .iter()
                    .zip(&worst.0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect();
                project(&mut x);
                x
            };

            let xr = along(1.0);
            let fr = eval(&xr, &mut evaluations);
            if fr < simplex[0].1 {
                let xe = along(2.0);
                let fe = eval(&xe, &mut evaluations);
                simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
                continue;
            }
            if fr < simplex[n - 1].1 {
                simplex[n] = (xr, fr);
                continue;
            }
            // outside contraction if the reflection helped at all, else inside
            let xc = along(if fr < worst.1 { 0.5 } else { -0.5 });
            let fc = eval(&xc, &mut evaluations);
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
                continue;
            }
            // shrink toward the best vertex
            let best = simplex[0].0.clone();
            for (x, v) in simplex[1..].iter_mut() {
                for (xi, bi) in x.iter_mut().zip(&best) {
                    *xi = bi + 0.5 * (*xi - bi);
                }
                *v = eval(x, &mut evaluations);
            }
        }
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (x, value) = simplex.swap_remove(0);
        LocalResult {
            x,
            value,
            evaluations,
            iterations,
            converged,
        }
    }
}
