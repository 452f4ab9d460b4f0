//! Shared value types.
//!
//! All rates are expressed in units of the mechanical angular frequency
//! `ω_m` (which is normally 1) and all dynamics live in the frame rotating
//! at the cavity resonance, so `ω_c` never needs a numeric value. Times are
//! plain `f64` in units of `1/ω_m` unless a name says otherwise; a
//! mechanical period is [`SystemParams::period`].

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{BlockadeError, Result};
use crate::C64;

fn check(field: &str, value: f64, ok: bool, reason: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(BlockadeError::InvalidParameter {
            field: field.to_string(),
            value,
            reason,
        })
    }
}

fn unit_frequency() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemParams {
    #[serde(default = "unit_frequency")]
    pub omega_m: f64,
    /// Single-photon optomechanical coupling.
    pub g0: f64,
    /// Cavity decay rate.
    pub kappa: f64,
    /// Mechanical decay rate.
    #[serde(default)]
    pub gamma: f64,
    /// Mean thermal occupation of the mechanical bath.
    #[serde(default)]
    pub nbar_bath: f64,
}

impl SystemParams {
    pub fn new(g0: f64, kappa: f64) -> Result<Self> {
        let p = Self {
            omega_m: 1.0,
            g0,
            kappa,
            gamma: 0.0,
            nbar_bath: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// `g0 = 0.3`, `κ = 0.02`, no mechanical bath.
    pub fn baseline() -> Self {
        Self {
            omega_m: 1.0,
            g0: 0.3,
            kappa: 0.02,
            gamma: 0.0,
            nbar_bath: 0.0,
        }
    }

    pub fn with_mechanical_bath(mut self, gamma: f64, nbar_bath: f64) -> Result<Self> {
        self.gamma = gamma;
        self.nbar_bath = nbar_bath;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check(
            "omega_m",
            self.omega_m,
            self.omega_m > 0.0,
            "must be positive",
        )?;
        check("g0", self.g0, self.g0 >= 0.0, "must be non-negative")?;
        check(
            "kappa",
            self.kappa,
            self.kappa >= 0.0,
            "must be non-negative",
        )?;
        check(
            "gamma",
            self.gamma,
            self.gamma >= 0.0,
            "must be non-negative",
        )?;
        check(
            "nbar_bath",
            self.nbar_bath,
            self.nbar_bath >= 0.0,
            "must be non-negative",
        )
    }

    /// Mechanical period `2π/ω_m`.
    pub fn period(&self) -> f64 {
        TAU / self.omega_m
    }

    /// Dimensionless coupling `g0/ω_m`.
    pub fn lambda(&self) -> f64 {
        self.g0 / self.omega_m
    }

    /// Kerr frequency `g0²/ω_m` of the polaron spectrum.
    pub fn kerr(&self) -> f64 {
        self.g0 * self.g0 / self.omega_m
    }

    pub fn validity_report(&self, drive: &DriveSpec) -> ValidityReport {
        let coupling_quartic = self.lambda().powi(4);
        let drive_ratio = drive
            .tones
            .iter()
            .map(|t| t.amplitude / self.omega_m)
            .fold(0.0, f64::max);
        let peak = drive.peak_amplitude() / self.omega_m;
        ValidityReport {
            coupling_quartic,
            drive_ratio,
            peak_drive_ratio: peak,
            sideband_gap: (self.omega_m - 2.0 * self.kerr()).abs(),
            coupling_ok: coupling_quartic < 0.01,
            drive_ok: drive_ratio <= DRIVE_BREAKDOWN * (1.0 + 1e-9),
            strong_coupling: self.g0 > self.omega_m,
        }
    }
}

/// Per-tone drive strength (in units of `ω_m`) above which the
/// leading-order occupations start to deviate from exact dynamics.
pub const DRIVE_BREAKDOWN: f64 = 0.005;

/// Summary of how far a configuration sits inside the perturbative regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityReport {
    /// `(g0/ω_m)⁴`, neglected by the default Taylor depth.
    pub coupling_quartic: f64,
    /// Largest single-tone `ε/ω_m`.
    pub drive_ratio: f64,
    /// `Σ ε_j / ω_m`, the largest possible `|ζ(t)|/ω_m`.
    pub peak_drive_ratio: f64,
    /// `|ω_m − 2g0²/ω_m|`, the detuning of the one-phonon sideband.
    pub sideband_gap: f64,
    pub coupling_ok: bool,
    pub drive_ok: bool,
    pub strong_coupling: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriveTone {
    pub amplitude: f64,
    /// Detuning from the cavity resonance.
    pub detuning: f64,
    /// Phase in `[0, 2π)`.
    pub phase: f64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ToneRepr {
    amplitude: f64,
    detuning: f64,
    #[serde(default)]
    phase: f64,
}

impl<'de> Deserialize<'de> for DriveTone {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = ToneRepr::deserialize(de)?;
        Ok(DriveTone {
            amplitude: r.amplitude,
            detuning: r.detuning,
            phase: wrap_phase(r.phase),
        })
    }
}

pub(crate) fn wrap_phase(phase: f64) -> f64 {
    let w = phase.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if w >= TAU {
        0.0
    } else {
        w
    }
}

impl DriveTone {
    pub fn new(amplitude: f64, detuning: f64, phase: f64) -> Result<Self> {
        let tone = Self {
            amplitude,
            detuning,
            phase: wrap_phase(phase),
        };
        tone.validate()?;
        Ok(tone)
    }

    pub fn validate(&self) -> Result<()> {
        check(
            "amplitude",
            self.amplitude,
            self.amplitude >= 0.0,
            "must be non-negative",
        )?;
        check("detuning", self.detuning, true, "must be finite")?;
        check("phase", self.phase, true, "must be finite")
    }

    /// Complex amplitude `ε e^{iψ}`.
    pub fn coefficient(&self) -> C64 {
        C64::from_polar(self.amplitude, self.phase)
    }
}

/// Drive written as a finite Fourier series in the frame rotating at `ω_c`:
/// `ζ(t) = Σ_j ε_j e^{iψ_j} e^{−iΔ_j t}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct DriveSpec {
    pub tones: Vec<DriveTone>,
}

impl DriveSpec {
    pub fn new(tones: Vec<DriveTone>) -> Self {
        Self { tones }
    }

    pub fn none() -> Self {
        Self::default()
    }

    pub fn monochromatic(amplitude: f64, detuning: f64) -> Result<Self> {
        Ok(Self::new(vec![DriveTone::new(amplitude, detuning, 0.0)?]))
    }

    /// Two tones; the first carries phase 0, the second the relative phase `psi`.
    pub fn bichromatic(amplitudes: (f64, f64), detunings: (f64, f64), psi: f64) -> Result<Self> {
        Ok(Self::new(vec![
            DriveTone::new(amplitudes.0, detunings.0, 0.0)?,
            DriveTone::new(amplitudes.1, detunings.1, psi)?,
        ]))
    }

    pub fn validate(&self) -> Result<()> {
        self.tones.iter().try_for_each(DriveTone::validate)
    }

    pub fn value(&self, t: f64) -> C64 {
        self.tones
            .iter()
            .map(|tone| tone.coefficient() * C64::from_polar(1.0, -tone.detuning * t))
            .sum()
    }

    pub fn peak_amplitude(&self) -> f64 {
        self.tones.iter().map(|t| t.amplitude).sum()
    }

    pub fn is_silent(&self) -> bool {
        self.tones.iter().all(|t| t.amplitude == 0.0)
    }

    /// All amplitudes multiplied by `s`.
    pub fn scaled(&self, s: f64) -> Self {
        Self::new(
            self.tones
                .iter()
                .map(|t| DriveTone {
                    amplitude: t.amplitude * s,
                    ..*t
                })
                .collect(),
        )
    }

    /// All phases shifted by a common `shift`.
    pub fn phase_shifted(&self, shift: f64) -> Self {
        Self::new(
            self.tones
                .iter()
                .map(|t| DriveTone {
                    phase: wrap_phase(t.phase + shift),
                    ..*t
                })
                .collect(),
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Truncation {
    pub n_phot_max: usize,
    pub n_phon_max: usize,
}

impl Truncation {
    pub fn new(n_phot_max: usize, n_phon_max: usize) -> Result<Self> {
        let t = Self {
            n_phot_max,
            n_phon_max,
        };
        t.validate()?;
        Ok(t)
    }

    /// 6 photons, 15 phonons.
    pub const fn standard() -> Self {
        Self {
            n_phot_max: 6,
            n_phon_max: 15,
        }
    }

    /// 10 photons, 25 phonons, used for thermal and dissipative studies.
    pub const fn large() -> Self {
        Self {
            n_phot_max: 10,
            n_phon_max: 25,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check(
            "n_phot_max",
            self.n_phot_max as f64,
            self.n_phot_max >= 1,
            "must be at least 1",
        )?;
        check(
            "n_phon_max",
            self.n_phon_max as f64,
            self.n_phon_max >= 1,
            "must be at least 1",
        )
    }

    pub fn dim_phot(&self) -> usize {
        self.n_phot_max + 1
    }

    pub fn dim_phon(&self) -> usize {
        self.n_phon_max + 1
    }

    pub fn dim(&self) -> usize {
        self.dim_phot() * self.dim_phon()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObjectiveKind {
    /// `g̃²(t_op)`.
    MinG2,
    /// `(1 + w_d d/dt + w_s d²/dt²) g̃²` at `t_op`.
    FlatMin,
    /// `FlatMin` plus `w_1 / p₁(t_op)`.
    FlatMinOcc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectiveSpec {
    /// Target time in mechanical periods.
    pub t_op: f64,
    pub kind: ObjectiveKind,
    #[serde(default)]
    pub w_d: f64,
    #[serde(default)]
    pub w_s: f64,
    #[serde(default)]
    pub w_1: f64,
}

impl ObjectiveSpec {
    pub fn min_g2(t_op: f64) -> Self {
        Self {
            t_op,
            kind: ObjectiveKind::MinG2,
            w_d: 0.0,
            w_s: 0.0,
            w_1: 0.0,
        }
    }

    pub fn flat_min(t_op: f64, w_d: f64, w_s: f64) -> Self {
        Self {
            t_op,
            kind: ObjectiveKind::FlatMin,
            w_d,
            w_s,
            w_1: 0.0,
        }
    }

    pub fn flat_min_occ(t_op: f64, w_d: f64, w_s: f64, w_1: f64) -> Self {
        Self {
            t_op,
            kind: ObjectiveKind::FlatMinOcc,
            w_d,
            w_s,
            w_1,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check("t_op", self.t_op, self.t_op > 0.0, "must be positive")?;
        check("w_d", self.w_d, self.w_d >= 0.0, "must be non-negative")?;
        check("w_s", self.w_s, self.w_s >= 0.0, "must be non-negative")?;
        check("w_1", self.w_1, self.w_1 >= 0.0, "must be non-negative")
    }

    /// Target time in units of `1/ω_m`.
    pub fn target_time(&self, p: &SystemParams) -> f64 {
        self.t_op * p.period()
    }
}

/// Energy of `n` photons and `m` phonons in the polaron frame, with the
/// `ω_c` contribution dropped: `−n² g0²/ω_m + m ω_m`.
pub fn spectrum(n: u32, m: u32, p: &SystemParams) -> f64 {
    let n = n as f64;
    -n * n * p.kerr() + m as f64 * p.omega_m
}
