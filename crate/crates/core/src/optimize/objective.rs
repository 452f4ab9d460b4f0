use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::model::{DriveSpec, ObjectiveKind, ObjectiveSpec, SystemParams};
use crate::perturb::PerturbativeModel;

/// Objective value together with the analytic quantities it was built from.
/// Derivatives are with respect to time in units of `1/ω_m`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveBreakdown {
    pub value: f64,
    pub g2_tilde: f64,
    pub g2_tilde_d1: f64,
    pub g2_tilde_d2: f64,
    pub p1: f64,
    pub p2: f64,
}

/// An objective bound to a system and Taylor depth, ready for repeated use.
///
/// The derivative terms enter by magnitude: a signed slope or curvature
/// would make the flat-minimum targets unbounded below.
#[derive(Debug, Clone)]
pub struct Objective {
    spec: ObjectiveSpec,
    model: PerturbativeModel,
}

impl Objective {
    pub fn new(spec: &ObjectiveSpec, p: &SystemParams, order: usize) -> Result<Self> {
        spec.validate()?;
        let model = PerturbativeModel::new(p, order)?;
        model.check_truncation(1e-2);
        Ok(Self { spec: *spec, model })
    }

    pub fn spec(&self) -> &ObjectiveSpec {
        &self.spec
    }

    pub fn model(&self) -> &PerturbativeModel {
        &self.model
    }

    pub fn breakdown(&self, d: &DriveSpec) -> Result<ObjectiveBreakdown> {
        let t = self.spec.target_time(self.model.params());
        let occ = self.model.occupations(d, t);
        let (g, gd, gdd) = occ.g2_tilde_derivs()?;
        let (p1, p2) = (occ.p1(), occ.p2());
        let s = &self.spec;
        let value = match s.kind {
            ObjectiveKind::MinG2 => g,
            ObjectiveKind::FlatMin => g + s.w_d * gd.abs() + s.w_s * gdd.abs(),
            ObjectiveKind::FlatMinOcc => g + s.w_d * gd.abs() + s.w_s * gdd.abs() + s.w_1 / p1,
        };
        Ok(ObjectiveBreakdown {
            value,
            g2_tilde: g,
            g2_tilde_d1: gd,
            g2_tilde_d2: gdd,
            p1,
            p2,
        })
    }

    pub fn eval(&self, d: &DriveSpec) -> Result<f64> {
        Ok(self.breakdown(d)?.value)
    }
}

/// One-shot evaluation of the objective.
pub fn objective(
    spec: &ObjectiveSpec,
    p: &SystemParams,
    d: &DriveSpec,
    order: usize,
) -> Result<f64> {
    d.validate()?;
    Objective::new(spec, p, order)?.eval(d)
}
