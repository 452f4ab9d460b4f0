//! Executing a scenario and persisting its outputs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use blockade::fock_sim::{thermal_state, DensityMatrix, ObservableSeries, Simulator};
use blockade::model::ValidityReport;
use blockade::optimize::{
    minimize, verification_from_series, OptimizationResult, SearchReport, Verification, FLAT_BAND,
};
use blockade::perturb::PerturbativeModel;
use blockade::{BlockadeError, DriveSpec};
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::output::{fmt_float, fmt_opt, write_json, Csv};
use crate::scenario::Scenario;

pub const SERIES_HEADER: [&str; 7] = ["t_over_T", "p0", "p1", "p2", "mean_n", "g2", "g2_tilde_sim"];

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RunOptions {
    pub out: PathBuf,
    /// Recompute even when a matching record exists.
    pub force: bool,
}

impl RunOptions {
    pub fn new(out: impl Into<PathBuf>, force: bool) -> Self {
        Self {
            out: out.into(),
            force,
        }
    }

    /// Same settings with output below `out/sub`.
    pub fn nested(&self, sub: &str) -> Self {
        Self {
            out: self.out.join(sub),
            force: self.force,
        }
    }
}

/// Photon statistics at one sample time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t_over_t: f64,
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
    pub mean_n: f64,
    pub g2: Option<f64>,
    pub g2_tilde_sim: Option<f64>,
}

impl Sample {
    fn at(s: &ObservableSeries, k: usize) -> Self {
        Self {
            t_over_t: s.times[k],
            p0: s.p(0, k),
            p1: s.p(1, k),
            p2: s.p(2, k),
            mean_n: s.mean_n[k],
            g2: s.g2[k],
            g2_tilde_sim: s.g2_tilde_from_sim[k],
        }
    }
}

/// Leading-order prediction for a vacuum start without mechanical bath.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Analytic {
    pub order: usize,
    pub p1: f64,
    pub p2: f64,
    pub g2_tilde: Option<f64>,
    pub g2_tilde_d1: Option<f64>,
    pub g2_tilde_d2: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub scenario: String,
    pub hash: String,
    pub drive: DriveSpec,
    /// Evaluation time in periods.
    pub t_eval: f64,
    pub at_eval: Sample,
    pub final_sample: Sample,
    /// Periods with `g²` within ±5% of its value at `t_eval`.
    pub flat_width: Option<f64>,
    pub analytic: Analytic,
    pub validity: ValidityReport,
    pub substeps: usize,
    pub step_change: Option<f64>,
    #[serde(default)]
    pub objective: Option<f64>,
    #[serde(default)]
    pub verification: Option<Verification>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Ok,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub scenario: String,
    pub hash: String,
    pub version: String,
    pub started: String,
    pub finished: String,
    pub elapsed_seconds: f64,
    pub status: RunStatus,
    #[serde(default)]
    pub error: Option<String>,
    /// Files written next to the record, relative to the scenario directory.
    pub files: Vec<String>,
    pub resolved: Scenario,
    #[serde(default)]
    pub summary: Option<Summary>,
    #[serde(default)]
    pub search: Option<SearchReport>,
    /// Set when the record was read back instead of recomputed.
    #[serde(skip)]
    pub cached: bool,
}

impl RunRecord {
    pub fn ok(&self) -> bool {
        self.status == RunStatus::Ok
    }

    /// Exact `g²` at the evaluation time.
    pub fn g2(&self) -> Option<f64> {
        self.summary.as_ref().and_then(|s| s.at_eval.g2)
    }
}

fn from_cache(dir: &Path, hash: &str) -> Option<RunRecord> {
    let text = std::fs::read_to_string(dir.join("record.json")).ok()?;
    let mut r: RunRecord = serde_json::from_str(&text).ok()?;
    let complete = r.files.iter().all(|f| dir.join(f).is_file());
    (r.hash == hash && r.ok() && complete).then(|| {
        r.cached = true;
        r
    })
}

struct Outcome {
    summary: Summary,
    series: ObservableSeries,
    optimization: Option<OptimizationResult>,
}

fn execute(s: &Scenario, hash: &str) -> Result<Outcome, HarnessError> {
    let p = &s.params;
    let core = HarnessError::from_core;
    let (drive, mut optimization) = match (&s.drive, &s.search) {
        (Some(d), _) => (d.clone(), None),
        (None, Some(search)) => {
            let opts = search.options(s.taylor_order);
            let r = minimize(&search.objective, p, &search.space, &opts)
                .map_err(|e| core("search", e))?;
            (r.drive.clone(), Some(r))
        }
        (None, None) => unreachable!("validated scenario"),
    };
    let t = s.truncation;
    let rho0 = if s.initial_nbar > 0.0 {
        thermal_state(s.initial_nbar, t).map_err(|e| core("initial_nbar", e))?
    } else {
        DensityMatrix::vacuum(t)
    };
    let sim = Simulator::new(p, t).map_err(|e| core("", e))?;
    let series = sim
        .evolve(&rho0, &drive, s.t_final * p.period(), &s.step)
        .map_err(|e| core("", e))?;
    let t_eval = s.eval_time();
    let k = series.index_at(t_eval);

    let model = PerturbativeModel::new(p, s.taylor_order).map_err(|e| core("", e))?;
    let occ = model.occupations(&drive, t_eval * p.period());
    let derivs = occ.g2_tilde_derivs().ok();
    let analytic = Analytic {
        order: s.taylor_order,
        p1: occ.p1(),
        p2: occ.p2(),
        g2_tilde: derivs.map(|d| d.0),
        g2_tilde_d1: derivs.map(|d| d.1),
        g2_tilde_d2: derivs.map(|d| d.2),
    };
    if let Some(r) = optimization.as_mut() {
        r.verification = Some(verification_from_series(
            &series,
            t_eval,
            Some(r.analytic.g2_tilde),
        ));
    }
    let summary = Summary {
        scenario: s.name.clone(),
        hash: hash.to_string(),
        drive: drive.clone(),
        t_eval,
        at_eval: Sample::at(&series, k),
        final_sample: Sample::at(&series, series.len() - 1),
        flat_width: series.flat_width(t_eval, FLAT_BAND),
        analytic,
        validity: p.validity_report(&drive),
        substeps: series.substeps,
        step_change: series.step_change,
        objective: optimization.as_ref().map(|r| r.objective),
        verification: optimization.as_ref().and_then(|r| r.verification),
    };
    Ok(Outcome {
        summary,
        series,
        optimization,
    })
}

pub fn series_csv(series: &ObservableSeries) -> Csv {
    let mut csv = Csv::new(&SERIES_HEADER);
    for k in 0..series.len() {
        csv.row(&[
            fmt_float(series.times[k]),
            fmt_float(series.p(0, k)),
            fmt_float(series.p(1, k)),
            fmt_float(series.p(2, k)),
            fmt_float(series.mean_n[k]),
            fmt_opt(series.g2[k]),
            fmt_opt(series.g2_tilde_from_sim[k]),
        ]);
    }
    csv
}

/// Runs `s`, writing `series.csv`, `summary.json`, `optimization.json` and
/// `record.json` under `out/<name>/`. A stored record with the same hash is
/// returned instead unless `force` is set.
///
/// Invalid input is an error; numerical failures produce a record with
/// status `failed`.
pub fn run_scenario(s: &Scenario, opts: &RunOptions) -> Result<RunRecord, HarnessError> {
    s.validate()?;
    let dir = opts.out.join(&s.name);
    let hash = s.hash();
    if !opts.force {
        if let Some(r) = from_cache(&dir, &hash) {
            log::info!("{}: served from cache", s.name);
            return Ok(r);
        }
    }
    log::info!("{}: running", s.name);
    let started = chrono::Utc::now();
    let clock = Instant::now();
    let outcome = execute(s, &hash);
    let mut record = RunRecord {
        scenario: s.name.clone(),
        hash,
        version: env!("CARGO_PKG_VERSION").to_string(),
        started: started.to_rfc3339(),
        finished: String::new(),
        elapsed_seconds: 0.0,
        status: RunStatus::Ok,
        error: None,
        files: Vec::new(),
        resolved: s.clone(),
        summary: None,
        search: None,
        cached: false,
    };
    match outcome {
        Ok(o) => {
            if s.outputs.series {
                series_csv(&o.series).write(&dir.join("series.csv"))?;
                record.files.push("series.csv".into());
            }
            if s.outputs.summary {
                write_json(&dir.join("summary.json"), &o.summary)?;
                record.files.push("summary.json".into());
            }
            if let (true, Some(r)) = (s.outputs.optimization, &o.optimization) {
                write_json(&dir.join("optimization.json"), r)?;
                record.files.push("optimization.json".into());
            }
            record.search = o.optimization.map(|r| r.search);
            record.summary = Some(o.summary);
        }
        Err(e @ HarnessError::Numerical(_)) => {
            log::warn!("{}: {e}", s.name);
            record.status = RunStatus::Failed;
            record.error = Some(e.to_string());
        }
        Err(e) => return Err(e),
    }
    record.finished = chrono::Utc::now().to_rfc3339();
    record.elapsed_seconds = clock.elapsed().as_secs_f64();
    write_json(&dir.join("record.json"), &record)?;
    Ok(record)
}

/// Maps a core error into the harness error space (used by callers that
/// evaluate core functions directly).
pub fn numerical(e: BlockadeError) -> HarnessError {
    HarnessError::from_core("", e)
}
