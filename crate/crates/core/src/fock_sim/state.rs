use crate::error::{BlockadeError, Result};
use crate::model::Truncation;
use crate::C64;

pub const HERMITICITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-8;
pub const DIAGONAL_FLOOR: f64 = -1e-10;

/// Largest thermal weight allowed above the phonon cutoff before the
/// truncation is rejected.
pub const THERMAL_TAIL_LIMIT: f64 = 0.1;

/// Joint photon ⊗ phonon density matrix, row-major, phonon index fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    truncation: Truncation,
    data: Vec<C64>,
}

impl DensityMatrix {
    pub fn zeros(truncation: Truncation) -> Self {
        let d = truncation.dim();
        Self {
            truncation,
            data: vec![C64::new(0.0, 0.0); d * d],
        }
    }

    /// `|0⟩⊗|0⟩`.
    pub fn vacuum(truncation: Truncation) -> Self {
        Self::fock(truncation, 0, 0)
    }

    pub fn fock(truncation: Truncation, n: usize, m: usize) -> Self {
        assert!(n <= truncation.n_phot_max && m <= truncation.n_phon_max);
        let mut rho = Self::zeros(truncation);
        let i = rho.index(n, m);
        rho.set(i, i, C64::new(1.0, 0.0));
        rho
    }

    /// `|ψ⟩⟨ψ|` for a state vector in the joint basis. The vector is used as
    /// given (no normalization).
    pub fn from_pure(truncation: Truncation, psi: &[C64]) -> Result<Self> {
        let d = truncation.dim();
        if psi.len() != d {
            return Err(BlockadeError::DimensionMismatch {
                expected: d,
                got: psi.len(),
            });
        }
        let mut data = Vec::with_capacity(d * d);
        for a in psi {
            for b in psi {
                data.push(a * b.conj());
            }
        }
        Ok(Self { truncation, data })
    }

    pub fn from_data(truncation: Truncation, data: Vec<C64>) -> Result<Self> {
        let d = truncation.dim();
        if data.len() != d * d {
            return Err(BlockadeError::DimensionMismatch {
                expected: d * d,
                got: data.len(),
            });
        }
        Ok(Self { truncation, data })
    }

    pub fn truncation(&self) -> Truncation {
        self.truncation
    }

    pub fn dim(&self) -> usize {
        self.truncation.dim()
    }

    pub fn index(&self, n: usize, m: usize) -> usize {
        n * self.truncation.dim_phon() + m
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn get(&self, i: usize, j: usize) -> C64 {
        self.data[i * self.dim() + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C64) {
        let d = self.dim();
        self.data[i * d + j] = v;
    }

    pub fn trace(&self) -> C64 {
        let d = self.dim();
        (0..d).map(|i| self.data[i * d + i]).sum()
    }

    /// `max |ρ − ρ†|` elementwise.
    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self.data[i * d + j] - self.data[j * d + i].conj()).norm());
            }
        }
        worst
    }

    pub fn min_diagonal(&self) -> f64 {
        let d = self.dim();
        (0..d)
            .map(|i| self.data[i * d + i].re)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }

    /// Checks the density-matrix invariants, labelling failures with `t`.
    pub fn check(&self, t: f64) -> Result<()> {
        if !self.is_finite() {
            return Err(BlockadeError::NonFinite { t });
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(BlockadeError::InvariantViolated {
                t,
                what: format!("trace {tr}"),
            });
        }
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(BlockadeError::InvariantViolated {
                t,
                what: format!("hermiticity error {herm:.3e}"),
            });
        }
        let diag = self.min_diagonal();
        if diag < DIAGONAL_FLOOR {
            return Err(BlockadeError::InvariantViolated {
                t,
                what: format!("diagonal entry {diag:.3e}"),
            });
        }
        Ok(())
    }

    /// Photon-number populations `p_n = Σ_m ρ_{(n,m),(n,m)}`.
    pub fn photon_populations(&self) -> Vec<f64> {
        let t = self.truncation;
        (0..t.dim_phot())
            .map(|n| {
                (0..t.dim_phon())
                    .map(|m| {
                        let i = self.index(n, m);
                        self.get(i, i).re
                    })
                    .sum()
            })
            .collect()
    }

    pub fn phonon_populations(&self) -> Vec<f64> {
        let t = self.truncation;
        (0..t.dim_phon())
            .map(|m| {
                (0..t.dim_phot())
                    .map(|n| {
                        let i = self.index(n, m);
                        self.get(i, i).re
                    })
                    .sum()
            })
            .collect()
    }

    /// Mechanical reduced state (photon traced out), row-major `dim_phon²`.
    pub fn mechanical_reduced(&self) -> Vec<C64> {
        let t = self.truncation;
        let dp = t.dim_phon();
        let mut out = vec![C64::new(0.0, 0.0); dp * dp];
        for n in 0..t.dim_phot() {
            for m in 0..dp {
                for k in 0..dp {
                    out[m * dp + k] += self.get(self.index(n, m), self.index(n, k));
                }
            }
        }
        out
    }

    /// `(⟨n⟩, ⟨n²⟩)` for the photon number.
    pub fn photon_moments(&self) -> (f64, f64) {
        self.photon_populations()
            .iter()
            .enumerate()
            .fold((0.0, 0.0), |(m1, m2), (n, p)| {
                let n = n as f64;
                (m1 + n * p, m2 + n * n * p)
            })
    }
}

/// Thermal weights `n̄ⁿ/(1+n̄)ⁿ⁺¹` for `n = 0..=n_max`, renormalized, together
/// with the discarded tail mass `(n̄/(1+n̄))^{n_max+1}`.
pub fn thermal_populations(nbar: f64, n_max: usize) -> Result<(Vec<f64>, f64)> {
    if !(nbar >= 0.0) || !nbar.is_finite() {
        return Err(BlockadeError::InvalidParameter {
            field: "nbar".into(),
            value: nbar,
            reason: "must be finite and non-negative",
        });
    }
    let x = nbar / (1.0 + nbar);
    let tail = x.powi(n_max as i32 + 1);
    if tail > THERMAL_TAIL_LIMIT {
        return Err(BlockadeError::TruncationTooSmall {
            nbar,
            n_max,
            tail,
            limit: THERMAL_TAIL_LIMIT,
        });
    }
    let norm = 1.0 - tail;
    let w = (0..=n_max)
        .map(|n| x.powi(n as i32) / (1.0 + nbar) / norm)
        .collect();
    Ok((w, tail))
}

/// `|0⟩⟨0| ⊗ ρ_th(n̄)` with the mechanical factor renormalized after truncation.
pub fn thermal_state(nbar: f64, t: Truncation) -> Result<DensityMatrix> {
    let (w, _) = thermal_populations(nbar, t.n_phon_max)?;
    let mut rho = DensityMatrix::zeros(t);
    for (m, p) in w.into_iter().enumerate() {
        let i = rho.index(0, m);
        rho.set(i, i, C64::new(p, 0.0));
    }
    Ok(rho)
}

/// Coherent photon state `|α⟩` (truncated, renormalized) ⊗ phonon vacuum.
pub fn coherent_state(alpha: C64, t: Truncation) -> DensityMatrix {
    let mut amps = vec![C64::new(0.0, 0.0); t.dim_phot()];
    let mut c = C64::new(1.0, 0.0);
    for (n, amp) in amps.iter_mut().enumerate() {
        if n > 0 {
            c *= alpha / (n as f64).sqrt();
        }
        *amp = c;
    }
    let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    let mut psi = vec![C64::new(0.0, 0.0); t.dim()];
    for (n, a) in amps.into_iter().enumerate() {
        psi[n * t.dim_phon()] = a / norm;
    }
    DensityMatrix::from_pure(t, &psi).expect("dimension fixed by truncation")
}

/// Equal-time `g²(0) = (⟨n²⟩ − ⟨n⟩)/⟨n⟩²`.
pub fn g2_exact(rho: &DensityMatrix) -> Result<f64> {
    let (n1, n2) = rho.photon_moments();
    if n1 < 1e-14 {
        return Err(BlockadeError::Undefined("mean photon number below 1e-14"));
    }
    Ok((n2 - n1) / (n1 * n1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trunc() -> Truncation {
        Truncation::new(6, 4).unwrap()
    }

    #[test]
    fn g2_of_fock_states() {
        assert_eq!(g2_exact(&DensityMatrix::fock(trunc(), 1, 0)).unwrap(), 0.0);
        assert!((g2_exact(&DensityMatrix::fock(trunc(), 2, 3)).unwrap() - 0.5).abs() < 1e-15);
        assert!(matches!(
            g2_exact(&DensityMatrix::vacuum(trunc())),
            Err(BlockadeError::Undefined(_))
        ));
    }

    #[test]
    fn g2_of_coherent_state_is_one() {
        let t = Truncation::new(40, 1).unwrap();
        for alpha in [C64::new(0.01, 0.0), C64::new(0.3, -0.4), C64::new(0.0, 1.5)] {
            let rho = coherent_state(alpha, t);
            assert!((g2_exact(&rho).unwrap() - 1.0).abs() < 1e-6);
            rho.check(0.0).unwrap();
        }
    }

    #[test]
    fn thermal_ground_state_and_geometric_weights() {
        let rho = thermal_state(0.0, trunc()).unwrap();
        assert_eq!(rho, DensityMatrix::vacuum(trunc()));

        let (w, tail) = thermal_populations(1.0, 60).unwrap();
        for (n, p) in w.iter().enumerate().take(10) {
            assert!((p - 0.5f64.powi(n as i32 + 1)).abs() < 1e-15);
        }
        assert!(tail < 1e-18);
    }

    #[test]
    fn thermal_tail_rejected() {
        assert!(matches!(
            thermal_populations(10.0, 5),
            Err(BlockadeError::TruncationTooSmall { .. })
        ));
        assert!(thermal_populations(-1.0, 5).is_err());
    }

    #[test]
    fn invariants_detect_damage() {
        let mut rho = DensityMatrix::fock(trunc(), 1, 1);
        rho.check(0.0).unwrap();
        rho.set(0, 1, C64::new(1e-6, 0.0));
        assert!(matches!(
            rho.check(0.5),
            Err(BlockadeError::InvariantViolated { .. })
        ));
        rho.set(0, 1, C64::new(f64::NAN, 0.0));
        assert!(matches!(
            rho.check(0.5),
            Err(BlockadeError::NonFinite { .. })
        ));
    }

    #[test]
    fn reduced_states() {
        let t = trunc();
        let psi: Vec<C64> = (0..t.dim()).map(|i| C64::new(i as f64, 1.0)).collect();
        let norm: f64 = psi.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        let psi: Vec<C64> = psi.into_iter().map(|a| a / norm).collect();
        let rho = DensityMatrix::from_pure(t, &psi).unwrap();
        let mech = rho.mechanical_reduced();
        let dp = t.dim_phon();
        let tr: f64 = (0..dp).map(|m| mech[m * dp + m].re).sum();
        assert!((tr - 1.0).abs() < 1e-12);
        let pm = rho.phonon_populations();
        for m in 0..dp {
            assert!((pm[m] - mech[m * dp + m].re).abs() < 1e-15);
        }
        let pn: f64 = rho.photon_populations().iter().sum();
        assert!((pn - 1.0).abs() < 1e-12);
    }
}
