//! Published reference numbers and the tolerances they are checked with.

use std::collections::BTreeMap;

use blockade::DriveSpec;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;

const REFERENCE: &str = include_str!("../fixtures/reference.json");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Quoted from the publication.
    Paper,
    /// Obtained here from an independent computation or a looser reading.
    Derived,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tolerance {
    Relative(f64),
    Absolute(f64),
    AtMost,
    AtLeast,
    /// Same power of ten as the reference.
    Decade,
    /// Within a factor of ten of the reference.
    OrderOfMagnitude,
    /// A yes/no property; the check carries no value.
    Holds,
    /// Listed for comparison, never fails.
    Report,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Check {
    pub id: String,
    pub provenance: Provenance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub tolerance: Tolerance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quote: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Outcome {
    pub id: String,
    pub provenance: Provenance,
    pub expected: Option<f64>,
    pub tolerance: Tolerance,
    pub computed: Option<f64>,
    /// `None` for report-only entries.
    pub pass: Option<bool>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Outcome {
    pub fn failed(&self) -> bool {
        self.pass == Some(false)
    }
}

impl Check {
    fn outcome(&self, computed: Option<f64>, pass: Option<bool>, detail: String) -> Outcome {
        Outcome {
            id: self.id.clone(),
            provenance: self.provenance,
            expected: self.value,
            tolerance: self.tolerance,
            computed,
            pass,
            detail,
        }
    }

    /// Compares a computed number against the reference.
    pub fn evaluate(&self, computed: f64) -> Outcome {
        let r = self.value.unwrap_or(f64::NAN);
        let pass = match self.tolerance {
            Tolerance::Relative(tol) => Some((computed / r - 1.0).abs() <= tol),
            Tolerance::Absolute(tol) => Some((computed - r).abs() <= tol),
            Tolerance::AtMost => Some(computed <= r),
            Tolerance::AtLeast => Some(computed >= r),
            Tolerance::Decade => {
                Some(computed > 0.0 && computed.log10().floor() == r.log10().floor())
            }
            Tolerance::OrderOfMagnitude => {
                Some(computed > 0.0 && (computed / r).log10().abs() < 1.0)
            }
            Tolerance::Holds => Some(false),
            Tolerance::Report => None,
        };
        // a NaN never passes
        let pass = pass.map(|p| p && computed.is_finite());
        self.outcome(Some(computed), pass, String::new())
    }

    /// Records a yes/no property.
    pub fn evaluate_holds(&self, holds: bool, detail: impl Into<String>) -> Outcome {
        self.outcome(None, Some(holds), detail.into())
    }

    /// Marks the check as failed because its input could not be computed.
    pub fn unavailable(&self, why: impl Into<String>) -> Outcome {
        self.outcome(None, Some(false), why.into())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedDrive {
    pub provenance: Provenance,
    pub note: String,
    pub drive: DriveSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonochromaticCell {
    pub t_op: f64,
    pub g0: f64,
    pub detuning: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MonochromaticTable {
    pub provenance: Provenance,
    pub amplitude: f64,
    pub kappa: f64,
    pub cells: Vec<MonochromaticCell>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaRow {
    pub t_op: f64,
    pub kappa: f64,
    pub detunings: [f64; 2],
    pub psi: f64,
    #[serde(default)]
    pub suspicious: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KappaTable {
    pub provenance: Provenance,
    pub amplitude: f64,
    pub g0: f64,
    pub rows: Vec<KappaRow>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Platform {
    pub name: String,
    pub g0: f64,
    pub kappa: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixtures {
    pub version: u32,
    pub drives: BTreeMap<String, NamedDrive>,
    pub monochromatic_optima: MonochromaticTable,
    pub kappa_scan: KappaTable,
    pub platforms: Vec<Platform>,
    pub checks: Vec<Check>,
}

impl Fixtures {
    /// The reference set compiled into the binary.
    pub fn load() -> Result<Self, HarnessError> {
        Self::parse(REFERENCE)
    }

    pub fn parse(text: &str) -> Result<Self, HarnessError> {
        let de = &mut serde_json::Deserializer::from_str(text);
        serde_path_to_error::deserialize(de).map_err(|e| HarnessError::Config {
            path: format!("fixtures.{}", e.path()),
            message: e.inner().to_string(),
        })
    }

    pub fn check(&self, id: &str) -> &Check {
        self.checks
            .iter()
            .find(|c| c.id == id)
            .unwrap_or_else(|| panic!("no reference check named {id}"))
    }

    pub fn drive(&self, name: &str) -> DriveSpec {
        self.drives
            .get(name)
            .unwrap_or_else(|| panic!("no reference drive named {name}"))
            .drive
            .clone()
    }

    /// Published monochromatic optima for one coupling, ordered by `t_op`.
    pub fn monochromatic_column(&self, g0: f64) -> Vec<MonochromaticCell> {
        let mut cells: Vec<_> = self
            .monochromatic_optima
            .cells
            .iter()
            .filter(|c| (c.g0 - g0).abs() < 1e-12)
            .copied()
            .collect();
        cells.sort_by(|a, b| a.t_op.total_cmp(&b.t_op));
        cells
    }
}
