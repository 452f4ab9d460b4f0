//! Scenario documents: one JSON object per run.

use std::path::Path;

use blockade::fock_sim::StepControl;
use blockade::optimize::{MinimizeOptions, SearchSpace};
use blockade::perturb::MAX_ORDER;
use blockade::{DriveSpec, ObjectiveSpec, SystemParams, Truncation};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::HarnessError;

fn standard_truncation() -> Truncation {
    Truncation::standard()
}

fn first_order() -> usize {
    1
}

fn yes() -> bool {
    true
}

/// Optimizer settings of a search scenario. The Taylor depth is taken from
/// the scenario's `taylor_order`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SearchConfig {
    pub space: SearchSpace,
    pub objective: ObjectiveSpec,
    #[serde(default)]
    pub restarts: Option<usize>,
    #[serde(default)]
    pub budget: Option<usize>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

impl SearchConfig {
    pub fn options(&self, order: usize) -> MinimizeOptions {
        let d = MinimizeOptions::default();
        MinimizeOptions {
            restarts: self.restarts.unwrap_or(d.restarts),
            budget: self.budget.unwrap_or(d.budget),
            seed: self.seed,
            order,
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            initial_step: d.initial_step,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Outputs {
    /// Write `series.csv`.
    #[serde(default = "yes")]
    pub series: bool,
    /// Write `summary.json`.
    #[serde(default = "yes")]
    pub summary: bool,
    /// Write `optimization.json` for search scenarios.
    #[serde(default = "yes")]
    pub optimization: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            series: true,
            summary: true,
            optimization: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    pub params: SystemParams,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub drive: Option<DriveSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub search: Option<SearchConfig>,
    #[serde(default = "standard_truncation")]
    pub truncation: Truncation,
    /// Mean phonon number of the initial thermal mechanical state.
    #[serde(default)]
    pub initial_nbar: f64,
    /// Simulated time in mechanical periods.
    pub t_final: f64,
    /// Time (periods) at which the summary is evaluated; defaults to the
    /// search target time, else `t_final`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_eval: Option<f64>,
    #[serde(default = "first_order")]
    pub taylor_order: usize,
    #[serde(default)]
    pub step: StepControl,
    #[serde(default)]
    pub outputs: Outputs,
}

/// Everything that influences numeric output; the name is excluded.
#[derive(Serialize)]
struct HashInput<'a> {
    version: &'a str,
    params: &'a SystemParams,
    drive: &'a Option<DriveSpec>,
    search: &'a Option<SearchConfig>,
    truncation: &'a Truncation,
    initial_nbar: f64,
    t_final: f64,
    t_eval: Option<f64>,
    taylor_order: usize,
    step: &'a StepControl,
    outputs: &'a Outputs,
}

/// Command-line settings that take precedence over the scenario file.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub truncation: Option<Truncation>,
    pub taylor_order: Option<usize>,
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Self, HarnessError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let s: Scenario = serde_path_to_error::deserialize(de)
            .map_err(|e| HarnessError::config(e.path().to_string(), e.inner().to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn from_file(path: &Path) -> Result<Self, HarnessError> {
        let text = std::fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(t) = o.truncation {
            self.truncation = t;
        }
        if let Some(k) = o.taylor_order {
            self.taylor_order = k;
        }
        if let (Some(seed), Some(search)) = (o.seed, self.search.as_mut()) {
            search.seed = seed;
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let name_ok = !self.name.is_empty()
            && self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'))
            && !self.name.starts_with('.');
        if !name_ok {
            return Err(HarnessError::config(
                "name",
                format!(
                    "{:?} must be non-empty and use only letters, digits, '_', '-' and '.'",
                    self.name
                ),
            ));
        }
        let core = HarnessError::from_core;
        self.params.validate().map_err(|e| core("params", e))?;
        self.truncation
            .validate()
            .map_err(|e| core("truncation", e))?;
        self.step.validate().map_err(|e| core("", e))?;
        match (&self.drive, &self.search) {
            (Some(d), None) => d.validate().map_err(|e| core("drive", e))?,
            (None, Some(s)) => {
                s.space.validate().map_err(|e| core("search.space", e))?;
                s.objective
                    .validate()
                    .map_err(|e| core("search.objective", e))?;
                if s.objective.t_op > self.t_final {
                    return Err(HarnessError::config(
                        "search.objective.t_op",
                        "target time lies beyond t_final",
                    ));
                }
            }
            _ => {
                return Err(HarnessError::config(
                    "drive",
                    "exactly one of `drive` and `search` must be given",
                ))
            }
        }
        if !(self.t_final > 0.0 && self.t_final.is_finite()) {
            return Err(HarnessError::config("t_final", "must be positive"));
        }
        if let Some(t) = self.t_eval {
            if !(t > 0.0 && t <= self.t_final) {
                return Err(HarnessError::config("t_eval", "must lie in (0, t_final]"));
            }
        }
        if !(self.initial_nbar >= 0.0 && self.initial_nbar.is_finite()) {
            return Err(HarnessError::config("initial_nbar", "must be non-negative"));
        }
        if !(1..=MAX_ORDER).contains(&self.taylor_order) {
            return Err(HarnessError::config(
                "taylor_order",
                format!("must lie in 1..={MAX_ORDER}"),
            ));
        }
        Ok(())
    }

    /// Evaluation time in periods.
    pub fn eval_time(&self) -> f64 {
        self.t_eval
            .or(self.search.as_ref().map(|s| s.objective.t_op))
            .unwrap_or(self.t_final)
    }

    /// SHA-256 over every physical input, hex encoded.
    pub fn hash(&self) -> String {
        let input = HashInput {
            version: env!("CARGO_PKG_VERSION"),
            params: &self.params,
            drive: &self.drive,
            search: &self.search,
            truncation: &self.truncation,
            initial_nbar: self.initial_nbar,
            t_final: self.t_final,
            t_eval: self.t_eval,
            taylor_order: self.taylor_order,
            step: &self.step,
            outputs: &self.outputs,
        };
        let bytes = serde_json::to_vec(&input).expect("hash input serializes");
        hex::encode(Sha256::digest(bytes))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const BASE: &str = r#"{
        "name": "base",
        "params": {"g0": 0.3, "kappa": 0.02},
        "drive": {"tones": [{"amplitude": 0.005, "detuning": -0.03953}]},
        "t_final": 5
    }"#;

    #[test]
    fn defaults_fill_in() {
        let s = Scenario::from_json(BASE).unwrap();
        assert_eq!(s.params.omega_m, 1.0);
        assert_eq!(s.truncation, Truncation::standard());
        assert_eq!(s.taylor_order, 1);
        assert!(s.outputs.series);
        let back = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(back, s);
    }

    #[test]
    fn errors_carry_field_paths() {
        let bad = BASE.replace("\"kappa\": 0.02", "\"kappa\": -0.02");
        match Scenario::from_json(&bad) {
            Err(HarnessError::Config { path, .. }) => assert_eq!(path, "params.kappa"),
            other => panic!("{other:?}"),
        }
        let typo = BASE.replace("\"detuning\"", "\"detunning\"");
        match Scenario::from_json(&typo) {
            Err(HarnessError::Config { path, .. }) => {
                assert!(path.starts_with("drive.tones[0]"), "{path}")
            }
            other => panic!("{other:?}"),
        }
        let wrong_type = BASE.replace("\"t_final\": 5", "\"t_final\": \"five\"");
        match Scenario::from_json(&wrong_type) {
            Err(HarnessError::Config { path, .. }) => assert_eq!(path, "t_final"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn drive_and_search_are_exclusive() {
        let none = BASE.replace(
            r#""drive": {"tones": [{"amplitude": 0.005, "detuning": -0.03953}]},"#,
            "",
        );
        assert!(matches!(
            Scenario::from_json(&none),
            Err(HarnessError::Config { .. })
        ));
    }

    #[test]
    fn hash_tracks_physical_fields_only() {
        let s = Scenario::from_json(BASE).unwrap();
        let mut renamed = s.clone();
        renamed.name = "other".into();
        assert_eq!(s.hash(), renamed.hash());
        let mut hot = s.clone();
        hot.params.nbar_bath = 0.1;
        assert_ne!(s.hash(), hot.hash());
        let mut shifted = s.clone();
        shifted.drive.as_mut().unwrap().tones[0].detuning += 1e-12;
        assert_ne!(s.hash(), shifted.hash());
        let mut deeper = s.clone();
        deeper.apply(&Overrides {
            taylor_order: Some(3),
            ..Default::default()
        });
        assert_ne!(s.hash(), deeper.hash());
    }
}
