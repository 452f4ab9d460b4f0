//! One-parameter sweeps over a base scenario.

use rayon::prelude::*;
use serde_json::Value;

use crate::error::HarnessError;
use crate::output::{fmt_float, fmt_opt, Csv};
use crate::run::{run_scenario, RunOptions, RunRecord};
use crate::scenario::Scenario;

const PARAM_FIELDS: [&str; 5] = ["omega_m", "g0", "kappa", "gamma", "nbar_bath"];
const OBJECTIVE_FIELDS: [&str; 4] = ["t_op", "w_d", "w_s", "w_1"];

pub const AGGREGATE_COLUMNS: [&str; 11] = [
    "scenario",
    "status",
    "t_eval_over_T",
    "p1",
    "p2",
    "mean_n",
    "g2",
    "g2_tilde_sim",
    "g2_tilde",
    "objective",
    "flat_width",
];

#[derive(Debug, Clone, PartialEq)]
enum Segment {
    Key(String),
    Index(usize),
}

/// Expands shorthand axis names to full scenario paths: bare system
/// parameters (`kappa`), objective fields (`t_op`) and `tones[i].…`.
pub fn canonical_axis(axis: &str) -> String {
    if PARAM_FIELDS.contains(&axis) {
        format!("params.{axis}")
    } else if OBJECTIVE_FIELDS.contains(&axis) {
        format!("search.objective.{axis}")
    } else if axis.starts_with("tones[") {
        format!("drive.{axis}")
    } else {
        axis.to_string()
    }
}

fn parse_path(path: &str) -> Result<Vec<Segment>, HarnessError> {
    let bad = || HarnessError::config("axis", format!("cannot parse parameter path {path:?}"));
    let mut out = Vec::new();
    for part in path.split('.') {
        let (key, mut rest) = match part.find('[') {
            Some(i) => (&part[..i], &part[i..]),
            None => (part, ""),
        };
        if key.is_empty() {
            return Err(bad());
        }
        out.push(Segment::Key(key.to_string()));
        while !rest.is_empty() {
            let close = rest.find(']').ok_or_else(bad)?;
            let idx = rest[1..close].parse().map_err(|_| bad())?;
            out.push(Segment::Index(idx));
            rest = &rest[close + 1..];
            if !rest.is_empty() && !rest.starts_with('[') {
                return Err(bad());
            }
        }
    }
    Ok(out)
}

fn set_number(root: &mut Value, path: &[Segment], x: f64, axis: &str) -> Result<(), HarnessError> {
    let unknown = || {
        HarnessError::config(
            "axis",
            format!("{axis:?} does not name a numeric field of the scenario"),
        )
    };
    let mut v = root;
    for seg in path {
        v = match seg {
            Segment::Key(k) => v.get_mut(k.as_str()),
            Segment::Index(i) => v.get_mut(*i),
        }
        .ok_or_else(unknown)?;
    }
    if !v.is_number() {
        return Err(unknown());
    }
    // integer fields such as truncation cutoffs stay integers
    *v = if v.is_u64() && x >= 0.0 && x.fract() == 0.0 {
        serde_json::json!(x as u64)
    } else {
        serde_json::json!(x)
    };
    Ok(())
}

fn slug(axis: &str) -> String {
    let s: String = axis
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() { c } else { '_' })
        .collect();
    s.split('_')
        .filter(|p| !p.is_empty())
        .collect::<Vec<_>>()
        .join("_")
}

/// One scenario per value, with `axis` set to that value.
pub fn expand(base: &Scenario, axis: &str, values: &[f64]) -> Result<Vec<Scenario>, HarnessError> {
    let full = canonical_axis(axis);
    let path = parse_path(&full)?;
    let template = serde_json::to_value(base).expect("scenario serializes");
    // fail on an unknown axis even when there is nothing to sweep
    let mut probe = template.clone();
    set_number(&mut probe, &path, 0.0, axis)?;
    values
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let mut v = template.clone();
            set_number(&mut v, &path, x, axis)?;
            v["name"] = Value::String(format!("{}_{}_{i}", base.name, slug(axis)));
            Scenario::from_json(&v.to_string())
        })
        .collect()
}

/// Runs the expanded scenarios concurrently and writes the aggregate
/// `sweep_<axis>.csv` with one row per value.
pub fn sweep(
    base: &Scenario,
    axis: &str,
    values: &[f64],
    opts: &RunOptions,
) -> Result<Vec<RunRecord>, HarnessError> {
    let scenarios = expand(base, axis, values)?;
    let records: Vec<RunRecord> = scenarios
        .par_iter()
        .map(|s| run_scenario(s, opts))
        .collect::<Result<_, _>>()?;
    let mut header = vec![axis.to_string()];
    header.extend(AGGREGATE_COLUMNS.iter().map(|c| c.to_string()));
    let mut csv = Csv::new(&header);
    for (x, r) in values.iter().zip(&records) {
        let s = r.summary.as_ref();
        csv.row(&[
            fmt_float(*x),
            r.scenario.clone(),
            if r.ok() { "ok" } else { "failed" }.to_string(),
            fmt_opt(s.map(|s| s.t_eval)),
            fmt_opt(s.map(|s| s.at_eval.p1)),
            fmt_opt(s.map(|s| s.at_eval.p2)),
            fmt_opt(s.map(|s| s.at_eval.mean_n)),
            fmt_opt(s.and_then(|s| s.at_eval.g2)),
            fmt_opt(s.and_then(|s| s.at_eval.g2_tilde_sim)),
            fmt_opt(s.and_then(|s| s.analytic.g2_tilde)),
            fmt_opt(s.and_then(|s| s.objective)),
            fmt_opt(s.and_then(|s| s.flat_width)),
        ]);
    }
    csv.write(&opts.out.join(format!("sweep_{}.csv", slug(axis))))?;
    Ok(records)
}
