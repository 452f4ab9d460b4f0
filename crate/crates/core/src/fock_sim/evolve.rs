use serde::{Deserialize, Serialize};

use crate::error::{BlockadeError, Result};
use crate::model::{DriveSpec, SystemParams, Truncation};
use crate::C64;

use super::liouvillian::liouvillian_from_ops;
use super::operators::number_ops;
use super::sparse::SparseMatrix;
use super::state::{g2_exact, DensityMatrix};

/// Largest `h·|λ|` allowed for RK4 (the stability boundary on the imaginary
/// axis is `2√2`).
const RK4_STABLE: f64 = 2.5;

/// Fixed-step RK4 configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepControl {
    /// Observable samples per mechanical period.
    pub samples_per_period: usize,
    /// RK4 steps between consecutive samples (starting value when verifying).
    pub substeps: usize,
    /// Largest accepted change of any `p_n` when the step is halved.
    pub tolerance: f64,
    pub max_halvings: usize,
    /// Re-run with half the step and compare; otherwise trust `substeps`.
    pub verify: bool,
}

impl Default for StepControl {
    fn default() -> Self {
        Self {
            samples_per_period: 200,
            substeps: 1,
            tolerance: 1e-7,
            max_halvings: 4,
            verify: true,
        }
    }
}

impl StepControl {
    /// Single pass with the given substeps and no refinement check.
    pub fn fixed(substeps: usize) -> Self {
        Self {
            substeps,
            verify: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, value: f64, reason| {
            Err(BlockadeError::InvalidParameter {
                field: format!("step.{field}"),
                value,
                reason,
            })
        };
        if self.samples_per_period == 0 {
            return bad("samples_per_period", 0.0, "must be positive");
        }
        if self.substeps == 0 {
            return bad("substeps", 0.0, "must be positive");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance", self.tolerance, "must be positive");
        }
        Ok(())
    }
}

/// Photon statistics sampled on a uniform grid.
#[derive(Debug, Clone)]
pub struct ObservableSeries {
    /// Sample times in mechanical periods.
    pub times: Vec<f64>,
    /// `p_n[k][n]`: population of photon number `n` at sample `k`.
    pub p_n: Vec<Vec<f64>>,
    pub mean_n: Vec<f64>,
    pub mean_n2: Vec<f64>,
    /// `None` where `⟨n⟩` is too small for `g²` to be defined.
    pub g2: Vec<Option<f64>>,
    /// `2p₂/(p₁+2p₂)²` from the simulated populations.
    pub g2_tilde_from_sim: Vec<Option<f64>>,
    /// RK4 steps per sample actually used.
    pub substeps: usize,
    /// Largest `p_n` change seen in the accepted refinement, if verified.
    pub step_change: Option<f64>,
    pub final_state: DensityMatrix,
}

impl ObservableSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Index of the sample nearest to `t` (in periods).
    pub fn index_at(&self, t: f64) -> usize {
        let k = self.times.partition_point(|&s| s < t);
        if k == 0 {
            0
        } else if k == self.times.len() || (t - self.times[k - 1]) <= (self.times[k] - t) {
            k - 1
        } else {
            k
        }
    }

    pub fn p(&self, n: usize, k: usize) -> f64 {
        self.p_n[k].get(n).copied().unwrap_or(0.0)
    }

    /// Length (in periods) of the contiguous window around `t_center` in which
    /// `g²` stays within `±band` (relative) of its value at `t_center`.
    /// Edges are located by linear interpolation between samples; a window
    /// that reaches the end of the grid is cut off there.
    pub fn flat_width(&self, t_center: f64, band: f64) -> Option<f64> {
        let c = self.index_at(t_center);
        let v0 = self.g2[c]?;
        let lo = v0 - band * v0.abs();
        let hi = v0 + band * v0.abs();
        let inside = |k: usize| matches!(self.g2[k], Some(v) if v >= lo && v <= hi);
        let edge = |inner: usize, outer: usize| -> f64 {
            let (ti, to) = (self.times[inner], self.times[outer]);
            let vi = self.g2[inner].unwrap();
            match self.g2[outer] {
                Some(vo) if vo != vi => {
                    let bound = if vo > hi { hi } else { lo };
                    ti + (to - ti) * ((bound - vi) / (vo - vi)).clamp(0.0, 1.0)
                }
                _ => ti,
            }
        };
        let mut l = c;
        while l > 0 && inside(l - 1) {
            l -= 1;
        }
        let left = if l == 0 {
            self.times[0]
        } else {
            edge(l, l - 1)
        };
        let mut r = c;
        while r + 1 < self.len() && inside(r + 1) {
            r += 1;
        }
        let right = if r + 1 == self.len() {
            self.times[r]
        } else {
            edge(r, r + 1)
        };
        Some(right - left)
    }
}

/// Master-equation integrator with the static generator built once.
#[derive(Debug, Clone)]
pub struct Simulator {
    params: SystemParams,
    truncation: Truncation,
    liouvillian: SparseMatrix,
    /// Gershgorin bound on the spectral radius of the static generator.
    spectral_bound: f64,
    /// `√n` of the photon number of each basis index.
    sqrt_n: Vec<f64>,
}

impl Simulator {
    pub fn new(p: &SystemParams, t: Truncation) -> Result<Self> {
        p.validate()?;
        t.validate()?;
        let ops = number_ops(&t);
        let liouvillian = liouvillian_from_ops(p, &ops);
        let mut row_sums = vec![0.0; liouvillian.nrows()];
        for (r, _, v) in liouvillian.iter() {
            row_sums[r] += v.norm();
        }
        let spectral_bound = row_sums.into_iter().fold(0.0, f64::max);
        let sqrt_n = (0..t.dim())
            .map(|i| ((i / t.dim_phon()) as f64).sqrt())
            .collect();
        Ok(Self {
            params: *p,
            truncation: t,
            liouvillian,
            spectral_bound,
            sqrt_n,
        })
    }

    pub fn params(&self) -> &SystemParams {
        &self.params
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn liouvillian(&self) -> &SparseMatrix {
        &self.liouvillian
    }

    /// Fewest RK4 steps per sample that keep `h·|λ|` inside the stability
    /// region, the drive commutator included.
    pub fn min_substeps(&self, drive: &DriveSpec, h_sample: f64) -> usize {
        let n_max = self.truncation.n_phot_max as f64;
        let drive_bound = 4.0 * drive.peak_amplitude() * (n_max + 1.0).sqrt();
        ((self.spectral_bound + drive_bound) * h_sample / RK4_STABLE)
            .ceil()
            .max(1.0) as usize
    }

    /// Integrates to `t_final` (natural units, `ω_m = 1`) and samples photon
    /// statistics; halves the step until `p_n` settles if `step.verify`.
    pub fn evolve(
        &self,
        rho0: &DensityMatrix,
        drive: &DriveSpec,
        t_final: f64,
        step: &StepControl,
    ) -> Result<ObservableSeries> {
        step.validate()?;
        let mut substeps = step.substeps;
        let mut series = self.run_series(rho0, drive, t_final, step, substeps)?;
        substeps = series.substeps;
        if !step.verify {
            return Ok(series);
        }
        let mut halvings = 0;
        loop {
            substeps *= 2;
            let mut finer = self.run_series(rho0, drive, t_final, step, substeps)?;
            let change = max_population_change(&series, &finer);
            if change < step.tolerance {
                finer.step_change = Some(change);
                return Ok(finer);
            }
            halvings += 1;
            if halvings >= step.max_halvings {
                return Err(BlockadeError::StepFailure {
                    halvings,
                    change,
                    tolerance: step.tolerance,
                });
            }
            log::debug!("step refinement: change {change:.3e} at {substeps} substeps");
            series = finer;
        }
    }

    /// Single fixed-step pass calling `observer(t_over_period, ρ)` at every
    /// sample including `t = 0`. Returns the final state.
    pub fn evolve_with<F>(
        &self,
        rho0: &DensityMatrix,
        drive: &DriveSpec,
        t_final: f64,
        step: &StepControl,
        mut observer: F,
    ) -> Result<DensityMatrix>
    where
        F: FnMut(f64, &DensityMatrix) -> Result<()>,
    {
        step.validate()?;
        Ok(self
            .integrate(rho0, drive, t_final, step, step.substeps, &mut observer)?
            .0)
    }

    fn run_series(
        &self,
        rho0: &DensityMatrix,
        drive: &DriveSpec,
        t_final: f64,
        step: &StepControl,
        substeps: usize,
    ) -> Result<ObservableSeries> {
        let mut times = Vec::new();
        let mut p_n = Vec::new();
        let mut mean_n = Vec::new();
        let mut mean_n2 = Vec::new();
        let mut g2 = Vec::new();
        let mut g2_tilde = Vec::new();
        let (final_state, substeps) =
            self.integrate(rho0, drive, t_final, step, substeps, &mut |t, rho| {
                let pops = rho.photon_populations();
                let (m1, m2) = rho.photon_moments();
                times.push(t);
                g2.push(g2_exact(rho).ok());
                g2_tilde.push(g2_tilde_from_populations(&pops));
                mean_n.push(m1);
                mean_n2.push(m2);
                p_n.push(pops);
                Ok(())
            })?;
        Ok(ObservableSeries {
            times,
            p_n,
            mean_n,
            mean_n2,
            g2,
            g2_tilde_from_sim: g2_tilde,
            substeps,
            step_change: None,
            final_state,
        })
    }

    fn integrate(
        &self,
        rho0: &DensityMatrix,
        drive: &DriveSpec,
        t_final: f64,
        step: &StepControl,
        substeps: usize,
        observer: &mut dyn FnMut(f64, &DensityMatrix) -> Result<()>,
    ) -> Result<(DensityMatrix, usize)> {
        if rho0.truncation() != self.truncation {
            return Err(BlockadeError::DimensionMismatch {
                expected: self.truncation.dim(),
                got: rho0.dim(),
            });
        }
        if !(t_final > 0.0) || !t_final.is_finite() {
            return Err(BlockadeError::InvalidParameter {
                field: "t_final".into(),
                value: t_final,
                reason: "must be finite and positive",
            });
        }
        drive.validate()?;
        rho0.check(0.0)?;

        let period = self.params.period();
        let intervals = ((t_final / period) * step.samples_per_period as f64 - 1e-9)
            .ceil()
            .max(1.0) as usize;
        let h_sample = t_final / intervals as f64;
        let stable = self.min_substeps(drive, h_sample);
        if stable > substeps {
            log::debug!("raising substeps from {substeps} to {stable} for RK4 stability");
        }
        let substeps = substeps.max(stable);
        let h = h_sample / substeps as f64;

        let n = rho0.data().len();
        let zero = C64::new(0.0, 0.0);
        let mut rho = rho0.clone();
        let mut k = vec![zero; n];
        let mut tmp = vec![zero; n];
        let mut acc = vec![zero; n];

        observer(0.0, &rho)?;
        for sample in 0..intervals {
            let t0 = sample as f64 * h_sample;
            for s in 0..substeps {
                let t = t0 + s as f64 * h;
                let y = rho.data_mut();
                self.rhs(drive, t, y, &mut k);
                axpy_into(&mut acc, y, h / 6.0, &k);
                axpy_into(&mut tmp, y, h / 2.0, &k);
                self.rhs(drive, t + h / 2.0, &tmp, &mut k);
                axpy(&mut acc, h / 3.0, &k);
                axpy_into(&mut tmp, y, h / 2.0, &k);
                self.rhs(drive, t + h / 2.0, &tmp, &mut k);
                axpy(&mut acc, h / 3.0, &k);
                axpy_into(&mut tmp, y, h, &k);
                self.rhs(drive, t + h, &tmp, &mut k);
                axpy(&mut acc, h / 6.0, &k);
                y.copy_from_slice(&acc);
            }
            let t_end = (sample + 1) as f64 * h_sample;
            rho.check(t_end / period)?;
            observer(t_end / period, &rho)?;
        }
        Ok((rho, substeps))
    }

    /// `out = L ρ − i[ζ*(t) a + ζ(t) a†, ρ]`.
    fn rhs(&self, drive: &DriveSpec, t: f64, rho: &[C64], out: &mut [C64]) {
        self.liouvillian.mul_vec_into(rho, out);
        if drive.is_silent() {
            return;
        }
        let z = drive.value(t);
        // −i ζ* and −i ζ
        let cz_a = C64::new(0.0, -1.0) * z.conj();
        let cz_ad = C64::new(0.0, -1.0) * z;
        let d = self.truncation.dim();
        let dp = self.truncation.dim_phon();
        let sq = &self.sqrt_n;
        // −i M ρ with M = ζ* a + ζ a†
        for r in 0..d {
            let row = &mut out[r * d..(r + 1) * d];
            if r + dp < d {
                let f = cz_a * sq[r + dp];
                let src = &rho[(r + dp) * d..(r + dp + 1) * d];
                row.iter_mut().zip(src).for_each(|(o, x)| *o += f * x);
            }
            if r >= dp {
                let f = cz_ad * sq[r];
                let src = &rho[(r - dp) * d..(r - dp + 1) * d];
                row.iter_mut().zip(src).for_each(|(o, x)| *o += f * x);
            }
        }
        // + i ρ M
        for r in 0..d {
            let src = &rho[r * d..(r + 1) * d];
            let row = &mut out[r * d..(r + 1) * d];
            for c in dp..d {
                row[c] -= cz_a * sq[c] * src[c - dp];
            }
            for c in 0..d - dp {
                row[c] -= cz_ad * sq[c + dp] * src[c + dp];
            }
        }
    }
}

/// Convenience wrapper building a [`Simulator`] for a single run.
pub fn evolve(
    rho0: &DensityMatrix,
    p: &SystemParams,
    d: &DriveSpec,
    t_final: f64,
    step: &StepControl,
) -> Result<ObservableSeries> {
    Simulator::new(p, rho0.truncation())?.evolve(rho0, d, t_final, step)
}

/// `2p₂/(p₁+2p₂)²`, `None` when the denominator underflows.
pub fn g2_tilde_from_populations(pops: &[f64]) -> Option<f64> {
    let p1 = pops.get(1).copied().unwrap_or(0.0);
    let p2 = pops.get(2).copied().unwrap_or(0.0);
    let s = p1 + 2.0 * p2;
    (s > 1e-16).then(|| 2.0 * p2 / (s * s))
}

fn max_population_change(a: &ObservableSeries, b: &ObservableSeries) -> f64 {
    a.p_n
        .iter()
        .zip(&b.p_n)
        .flat_map(|(x, y)| x.iter().zip(y).map(|(u, v)| (u - v).abs()))
        .fold(0.0, f64::max)
}

fn axpy_into(out: &mut [C64], y: &[C64], a: f64, x: &[C64]) {
    out.iter_mut()
        .zip(y.iter().zip(x))
        .for_each(|(o, (y, x))| *o = y + x * a);
}

fn axpy(out: &mut [C64], a: f64, x: &[C64]) {
    out.iter_mut().zip(x).for_each(|(o, x)| *o += x * a);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock_sim::liouvillian::drive_superoperators;

    #[test]
    fn drive_kernel_matches_superoperator() {
        let t = Truncation::new(3, 2).unwrap();
        let p = SystemParams::new(0.2, 0.05).unwrap();
        let sim = Simulator::new(&p, t).unwrap();
        let drive = DriveSpec::bichromatic((0.3, 0.2), (0.1, -0.2), 0.7).unwrap();
        let d = t.dim();
        let rho: Vec<C64> = (0..d * d)
            .map(|k| C64::new((k as f64 * 0.37).sin(), (k as f64 * 0.11).cos()))
            .collect();
        let mut got = vec![C64::new(0.0, 0.0); d * d];
        sim.rhs(&drive, 0.9, &rho, &mut got);
        let (da, dad) = drive_superoperators(&t);
        let z = drive.value(0.9);
        let want: Vec<C64> = sim
            .liouvillian()
            .mul_vec(&rho)
            .iter()
            .zip(da.mul_vec(&rho))
            .zip(dad.mul_vec(&rho))
            .map(|((l, a), b)| l + z.conj() * a + z * b)
            .collect();
        for (g, w) in got.iter().zip(&want) {
            assert!((g - w).norm() < 1e-13);
        }
    }

    #[test]
    fn grid_is_uniform_and_ends_at_t_final() {
        let t = Truncation::new(2, 2).unwrap();
        let p = SystemParams::new(0.1, 0.1).unwrap();
        let rho0 = DensityMatrix::vacuum(t);
        let step = StepControl {
            samples_per_period: 10,
            ..StepControl::fixed(1)
        };
        let s = evolve(&rho0, &p, &DriveSpec::none(), 1.5 * p.period(), &step).unwrap();
        assert_eq!(s.len(), 16);
        assert!((s.times[15] - 1.5).abs() < 1e-12);
        assert_eq!(s.index_at(0.74), 7);
    }

    #[test]
    fn flat_width_interpolates_edges() {
        let t = Truncation::new(1, 1).unwrap();
        let times: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        // parabola with minimum 1 at t = 0.5
        let g2: Vec<Option<f64>> = times
            .iter()
            .map(|t| Some(1.0 + (t - 0.5) * (t - 0.5)))
            .collect();
        let s = ObservableSeries {
            p_n: vec![vec![]; 11],
            mean_n: vec![0.0; 11],
            mean_n2: vec![0.0; 11],
            g2_tilde_from_sim: vec![None; 11],
            times,
            g2,
            substeps: 1,
            step_change: None,
            final_state: DensityMatrix::vacuum(t),
        };
        // exact half-width √0.05 ≈ 0.2236; chords between samples 0.2 and 0.3
        let w = s.flat_width(0.5, 0.05).unwrap();
        let chord = 0.2 + 0.1 * (0.05 - 0.04) / (0.09 - 0.04);
        assert!((w - 2.0 * chord).abs() < 1e-12);
        assert!(s.flat_width(0.5, 10.0).unwrap() - 1.0 < 1e-12);
    }
}
