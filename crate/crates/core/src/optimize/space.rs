use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{BlockadeError, Result};
use crate::model::{DriveSpec, DriveTone};

pub const DEFAULT_DETUNING_WINDOW: (f64, f64) = (-0.5, 0.5);
pub const DEFAULT_AMPLITUDE_MAX: f64 = 0.01;

/// Range of a single drive parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bound {
    Fixed(f64),
    /// Closed interval `[lo, hi]`.
    Range(f64, f64),
    /// Whole circle `[0, 2π)`; only meaningful for phases.
    Periodic,
}

impl Bound {
    fn is_free(&self) -> bool {
        !matches!(self, Bound::Fixed(_))
    }

    fn validate(&self, field: &str) -> Result<()> {
        let bad = |value, reason| {
            Err(BlockadeError::InvalidParameter {
                field: field.to_string(),
                value,
                reason,
            })
        };
        match *self {
            Bound::Fixed(v) if !v.is_finite() => bad(v, "must be finite"),
            Bound::Range(lo, hi) if !(lo.is_finite() && hi.is_finite()) => {
                bad(lo, "bounds must be finite")
            }
            Bound::Range(lo, hi) if !(lo < hi) => bad(hi, "upper bound must exceed lower bound"),
            _ => Ok(()),
        }
    }

    /// Maps a scaled coordinate to the parameter value.
    fn decode(&self, x: f64) -> f64 {
        match *self {
            Bound::Fixed(v) => v,
            Bound::Range(lo, hi) => lo + x.clamp(0.0, 1.0) * (hi - lo),
            Bound::Periodic => x.rem_euclid(1.0) * TAU,
        }
    }

    fn encode(&self, v: f64) -> f64 {
        match *self {
            Bound::Fixed(_) => 0.0,
            Bound::Range(lo, hi) => ((v - lo) / (hi - lo)).clamp(0.0, 1.0),
            Bound::Periodic => v.rem_euclid(TAU) / TAU,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToneBounds {
    pub amplitude: Bound,
    pub detuning: Bound,
    pub phase: Bound,
}

/// Which drive parameters the optimizer may move, and within what ranges.
/// Free parameters are searched in unit-scaled coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchSpace {
    pub tones: Vec<ToneBounds>,
}

impl SearchSpace {
    /// One tone of fixed amplitude with free detuning.
    pub fn monochromatic(amplitude: f64) -> Self {
        let (lo, hi) = DEFAULT_DETUNING_WINDOW;
        Self {
            tones: vec![ToneBounds {
                amplitude: Bound::Fixed(amplitude),
                detuning: Bound::Range(lo, hi),
                phase: Bound::Fixed(0.0),
            }],
        }
    }

    /// Two tones of fixed amplitude; free detunings and relative phase. The
    /// first phase is pinned to 0 since a common phase does not matter.
    pub fn bichromatic(amplitudes: (f64, f64)) -> Self {
        let (lo, hi) = DEFAULT_DETUNING_WINDOW;
        Self {
            tones: vec![
                ToneBounds {
                    amplitude: Bound::Fixed(amplitudes.0),
                    detuning: Bound::Range(lo, hi),
                    phase: Bound::Fixed(0.0),
                },
                ToneBounds {
                    amplitude: Bound::Fixed(amplitudes.1),
                    detuning: Bound::Range(lo, hi),
                    phase: Bound::Periodic,
                },
            ],
        }
    }

    /// Frees every amplitude within `[0, max]`.
    pub fn with_free_amplitudes(mut self, max: f64) -> Self {
        for t in &mut self.tones {
            t.amplitude = Bound::Range(0.0, max);
        }
        self
    }

    pub fn with_detuning_window(mut self, lo: f64, hi: f64) -> Self {
        for t in &mut self.tones {
            if t.detuning.is_free() {
                t.detuning = Bound::Range(lo, hi);
            }
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (i, t) in self.tones.iter().enumerate() {
            t.amplitude.validate(&format!("tones[{i}].amplitude"))?;
            t.detuning.validate(&format!("tones[{i}].detuning"))?;
            t.phase.validate(&format!("tones[{i}].phase"))?;
            if let Bound::Range(lo, _) = t.amplitude {
                if lo < 0.0 {
                    return Err(BlockadeError::InvalidParameter {
                        field: format!("tones[{i}].amplitude"),
                        value: lo,
                        reason: "amplitudes must be non-negative",
                    });
                }
            }
        }
        if self.dims() == 0 {
            return Err(BlockadeError::EmptySearchSpace);
        }
        Ok(())
    }

    fn bounds(&self) -> impl Iterator<Item = &Bound> {
        self.tones
            .iter()
            .flat_map(|t| [&t.amplitude, &t.detuning, &t.phase])
    }

    /// Number of free parameters.
    pub fn dims(&self) -> usize {
        self.bounds().filter(|b| b.is_free()).count()
    }

    /// `true` for scaled coordinates that wrap around.
    pub fn periodic_mask(&self) -> Vec<bool> {
        self.bounds()
            .filter(|b| b.is_free())
            .map(|b| matches!(b, Bound::Periodic))
            .collect()
    }

    pub fn decode(&self, x: &[f64]) -> DriveSpec {
        assert_eq!(x.len(), self.dims());
        let mut xs = x.iter();
        let mut take = |b: &Bound| {
            if b.is_free() {
                b.decode(*xs.next().unwrap())
            } else {
                b.decode(0.0)
            }
        };
        DriveSpec::new(
            self.tones
                .iter()
                .map(|t| DriveTone {
                    amplitude: take(&t.amplitude),
                    detuning: take(&t.detuning),
                    phase: take(&t.phase).rem_euclid(TAU),
                })
                .collect(),
        )
    }

    /// Scaled coordinates of the free parameters of `d` (clamped into range).
    pub fn encode(&self, d: &DriveSpec) -> Result<Vec<f64>> {
        if d.tones.len() != self.tones.len() {
            return Err(BlockadeError::DimensionMismatch {
                expected: self.tones.len(),
                got: d.tones.len(),
            });
        }
        let mut out = Vec::with_capacity(self.dims());
        for (b, tone) in self.tones.iter().zip(&d.tones) {
            for (bound, v) in [
                (b.amplitude, tone.amplitude),
                (b.detuning, tone.detuning),
                (b.phase, tone.phase),
            ] {
                if bound.is_free() {
                    out.push(bound.encode(v));
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bichromatic_layout() {
        let s = SearchSpace::bichromatic((0.005, 0.005));
        assert_eq!(s.dims(), 3);
        assert_eq!(s.periodic_mask(), vec![false, false, true]);
        let d = s.decode(&[0.5, 0.25, 1.25]);
        assert_eq!(d.tones[0].detuning, 0.0);
        assert_eq!(d.tones[1].detuning, -0.25);
        assert!((d.tones[1].phase - TAU / 4.0).abs() < 1e-15);
        assert_eq!(d.tones[0].phase, 0.0);
        let x = s.encode(&d).unwrap();
        assert!((x[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn out_of_range_coordinates_are_clamped() {
        let s = SearchSpace::monochromatic(0.005).with_detuning_window(-0.1, 0.1);
        assert_eq!(s.decode(&[1.7]).tones[0].detuning, 0.1);
        assert_eq!(s.decode(&[-3.0]).tones[0].detuning, -0.1);
    }

    #[test]
    fn validation() {
        let mut s = SearchSpace::monochromatic(0.005);
        assert!(s.validate().is_ok());
        s.tones[0].detuning = Bound::Fixed(0.0);
        assert_eq!(s.validate(), Err(BlockadeError::EmptySearchSpace));
        s.tones[0].detuning = Bound::Range(0.2, 0.1);
        assert!(s.validate().is_err());
        let s = SearchSpace::bichromatic((0.005, 0.005)).with_free_amplitudes(0.01);
        assert_eq!(s.dims(), 5);
    }
}
