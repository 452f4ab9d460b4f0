//! Pre-registered scenario sets for the published figures and tables.
//!
//! Every target writes its scenario runs below `<out>/<target>/`, one CSV per
//! curve, and `comparison.json` listing each reference number next to the
//! computed value.

use std::fmt;
use std::str::FromStr;

use blockade::fock_sim::StepControl;
use blockade::optimize::{SearchSpace, TAIL_PERIODS};
use blockade::perturb::PerturbativeModel;
use blockade::{DriveSpec, ObjectiveSpec, SystemParams, Truncation};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::HarnessError;
use crate::fixtures::{Fixtures, Outcome, Provenance};
use crate::output::{fmt_float, fmt_opt, write_json, Csv};
use crate::run::{run_scenario, RunOptions, RunRecord};
use crate::scenario::{Outputs, Overrides, Scenario, SearchConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Target {
    Fig1,
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Table1,
    Sec4d,
}

impl Target {
    pub const ALL: [Target; 8] = [
        Target::Fig1,
        Target::Fig2,
        Target::Fig3,
        Target::Fig4,
        Target::Fig5,
        Target::Fig6,
        Target::Table1,
        Target::Sec4d,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Target::Fig1 => "fig1",
            Target::Fig2 => "fig2",
            Target::Fig3 => "fig3",
            Target::Fig4 => "fig4",
            Target::Fig5 => "fig5",
            Target::Fig6 => "fig6",
            Target::Table1 => "table1",
            Target::Sec4d => "sec4d",
        }
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Target {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Target::ALL
            .into_iter()
            .find(|t| t.name() == s)
            .ok_or_else(|| HarnessError::config("target", format!("unknown target {s:?}")))
    }
}

#[derive(Debug, Clone, Default)]
pub struct ReproduceOptions {
    pub run: RunOptions,
    /// Smaller grids and optimizer budgets.
    pub quick: bool,
    pub overrides: Overrides,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub target: Target,
    pub quick: bool,
    pub checks: Vec<Outcome>,
    /// Curve files relative to the target directory.
    pub curves: Vec<String>,
    pub scenarios: Vec<String>,
    pub failed_scenarios: Vec<String>,
    pub notes: Vec<String>,
}

impl Comparison {
    fn new(target: Target, quick: bool) -> Self {
        Self {
            target,
            quick,
            checks: Vec::new(),
            curves: Vec::new(),
            scenarios: Vec::new(),
            failed_scenarios: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| c.failed()).count()
    }

    pub fn paper_failures(&self) -> usize {
        self.checks
            .iter()
            .filter(|c| c.failed() && c.provenance == Provenance::Paper)
            .count()
    }

    pub fn outcome(&self, id: &str) -> Option<&Outcome> {
        self.checks.iter().find(|c| c.id == id)
    }
}

/// Builder-style shorthand for the scenarios below.
struct Spec {
    scenario: Scenario,
}

impl Spec {
    fn fixed(name: String, params: SystemParams, drive: DriveSpec, t_final: f64) -> Self {
        Self {
            scenario: Scenario {
                name,
                params,
                drive: Some(drive),
                search: None,
                truncation: Truncation::standard(),
                initial_nbar: 0.0,
                t_final,
                t_eval: None,
                taylor_order: 1,
                step: StepControl::fixed(1),
                outputs: Outputs::default(),
            },
        }
    }

    fn search(
        name: String,
        params: SystemParams,
        space: SearchSpace,
        objective: ObjectiveSpec,
        quick: bool,
    ) -> Self {
        let (restarts, budget) = if quick {
            (Some(4), Some(300))
        } else {
            (None, None)
        };
        let t_final = objective.t_op + TAIL_PERIODS;
        let mut s = Self::fixed(name, params, DriveSpec::none(), t_final);
        s.scenario.drive = None;
        s.scenario.search = Some(SearchConfig {
            space,
            objective,
            restarts,
            budget,
            seed: 0,
            tolerance: None,
        });
        s
    }

    fn eval_at(mut self, t: f64) -> Self {
        self.scenario.t_eval = Some(t);
        self
    }

    fn truncation(mut self, t: Truncation) -> Self {
        self.scenario.truncation = t;
        self
    }

    fn verified_steps(mut self) -> Self {
        self.scenario.step = StepControl::default();
        self
    }
}

struct Context<'a> {
    fixtures: Fixtures,
    opts: &'a ReproduceOptions,
    run: RunOptions,
    cmp: Comparison,
    records: Vec<RunRecord>,
}

impl Context<'_> {
    fn run(&mut self, specs: Vec<Spec>) -> Result<Vec<RunRecord>, HarnessError> {
        let scenarios: Vec<Scenario> = specs
            .into_iter()
            .map(|s| {
                let mut s = s.scenario;
                s.apply(&self.opts.overrides);
                s
            })
            .collect();
        let records: Vec<RunRecord> = scenarios
            .par_iter()
            .map(|s| run_scenario(s, &self.run))
            .collect::<Result<_, _>>()?;
        for r in &records {
            self.cmp.scenarios.push(r.scenario.clone());
            if !r.ok() {
                self.cmp.failed_scenarios.push(r.scenario.clone());
            }
        }
        self.records.extend(records.iter().cloned());
        Ok(records)
    }

    fn check_value(&mut self, id: &str, value: Option<f64>) {
        let check = self.fixtures.check(id);
        let o = match value {
            Some(v) => check.evaluate(v),
            None => check.unavailable("no value (run failed or g² undefined)"),
        };
        self.cmp.checks.push(o);
    }

    fn check_holds(&mut self, id: &str, holds: bool, detail: String) {
        let o = self.fixtures.check(id).evaluate_holds(holds, detail);
        self.cmp.checks.push(o);
    }

    fn curve(&mut self, name: &str, csv: &Csv) -> Result<(), HarnessError> {
        let file = format!("{name}.csv");
        csv.write(&self.run.out.join(&file))?;
        self.cmp.curves.push(file);
        Ok(())
    }

    fn order(&self) -> usize {
        self.opts.overrides.taylor_order.unwrap_or(1)
    }
}

fn baseline() -> SystemParams {
    SystemParams::baseline()
}

fn params(g0: f64, kappa: f64) -> SystemParams {
    SystemParams {
        g0,
        kappa,
        ..baseline()
    }
}

fn label(x: f64) -> String {
    format!("{x}").replace('-', "m")
}

/// Runs one target and writes its comparison file.
pub fn reproduce(
    target: Target,
    opts: &ReproduceOptions,
) -> Result<(Comparison, Vec<RunRecord>), HarnessError> {
    let mut cx = Context {
        fixtures: Fixtures::load()?,
        opts,
        run: opts.run.nested(target.name()),
        cmp: Comparison::new(target, opts.quick),
        records: Vec::new(),
    };
    match target {
        Target::Fig1 => fig1(&mut cx)?,
        Target::Fig2 => fig2(&mut cx)?,
        Target::Fig3 => fig3(&mut cx)?,
        Target::Fig4 => fig4(&mut cx)?,
        Target::Fig5 => fig5(&mut cx)?,
        Target::Fig6 => fig6(&mut cx)?,
        Target::Table1 => table1(&mut cx)?,
        Target::Sec4d => sec4d(&mut cx)?,
    }
    write_json(&cx.run.out.join("comparison.json"), &cx.cmp)?;
    Ok((cx.cmp, cx.records))
}

/// Monochromatic optima versus target time for several couplings: exact
/// `g²` at the published detunings, plus a fresh optimization per cell.
fn fig1(cx: &mut Context) -> Result<(), HarnessError> {
    let table = cx.fixtures.monochromatic_optima.clone();
    let quick = cx.opts.quick;
    let couplings: Vec<f64> = if quick {
        vec![0.3, 0.5, 0.6]
    } else {
        let mut g: Vec<f64> = table.cells.iter().map(|c| c.g0).collect();
        g.sort_by(f64::total_cmp);
        g.dedup();
        g
    };
    let mut published_g2 = Vec::new();
    for &g0 in &couplings {
        let cells: Vec<_> = cx
            .fixtures
            .monochromatic_column(g0)
            .into_iter()
            .filter(|c| !quick || [3.0, 6.0, 9.0, 12.0, 15.0].contains(&c.t_op))
            .collect();
        let p = params(g0, table.kappa);
        let mut specs: Vec<Spec> = cells
            .iter()
            .map(|c| {
                let drive = DriveSpec::monochromatic(table.amplitude, c.detuning).unwrap();
                Spec::fixed(
                    format!("g0_{}_t{}_published", label(g0), c.t_op),
                    p,
                    drive,
                    c.t_op,
                )
            })
            .collect();
        if !quick {
            specs.extend(cells.iter().map(|c| {
                Spec::search(
                    format!("g0_{}_t{}_optimized", label(g0), c.t_op),
                    p,
                    SearchSpace::monochromatic(table.amplitude),
                    ObjectiveSpec::min_g2(c.t_op),
                    false,
                )
            }));
        }
        let records = cx.run(specs)?;
        let (published, optimized) = records.split_at(cells.len());
        let mut csv = Csv::new(&[
            "t_op_over_T",
            "published_detuning",
            "g2_published",
            "g2_tilde_published",
            "optimized_detuning",
            "g2_tilde_optimized",
            "g2_optimized",
            "validated",
        ]);
        let mut unvalidated = 0;
        let mut optimizer_better = 0;
        for (i, c) in cells.iter().enumerate() {
            let pubs = published[i].summary.as_ref();
            let opt = optimized.get(i).and_then(|r| r.summary.as_ref());
            let validated = opt.and_then(|s| s.verification).map(|v| v.validated);
            if validated == Some(false) {
                unvalidated += 1;
            }
            if let (Some(a), Some(b)) = (
                pubs.and_then(|s| s.analytic.g2_tilde),
                opt.and_then(|s| s.objective),
            ) {
                if b <= a {
                    optimizer_better += 1;
                }
            }
            csv.row(&[
                fmt_float(c.t_op),
                fmt_float(c.detuning),
                fmt_opt(pubs.and_then(|s| s.at_eval.g2)),
                fmt_opt(pubs.and_then(|s| s.analytic.g2_tilde)),
                fmt_opt(opt.map(|s| s.drive.tones[0].detuning)),
                fmt_opt(opt.and_then(|s| s.objective)),
                fmt_opt(opt.and_then(|s| s.at_eval.g2)),
                validated.map_or(String::new(), |v| v.to_string()),
            ]);
        }
        if !quick {
            cx.cmp.notes.push(format!(
                "g0 = {g0}: optimizer matched or beat the published detuning in {optimizer_better} of {} cells; {unvalidated} optimized cells fail exact validation",
                cells.len()
            ));
        }
        cx.curve(&format!("g0_{}", label(g0)), &csv)?;
        let g2: Vec<(f64, Option<f64>)> = cells
            .iter()
            .zip(published)
            .map(|(c, r)| (c.t_op, r.g2()))
            .collect();
        published_g2.push((g0, g2));
    }

    let column = |g0: f64| {
        published_g2
            .iter()
            .find(|(g, _)| (*g - g0).abs() < 1e-12)
            .map(|(_, v)| v.clone())
    };
    let low = column(0.3).unwrap_or_default();
    let values: Vec<f64> = low.iter().filter_map(|(_, g)| *g).collect();
    let monotone = values.len() == low.len() && values.windows(2).all(|w| w[1] < w[0]);
    cx.check_holds(
        "fig1.monotone_in_t_op",
        monotone,
        format!(
            "g0 = 0.3, published detunings: {}",
            values
                .iter()
                .map(|g| format!("{g:.3e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    );
    let (mid, high) = (
        column(0.5).unwrap_or_default(),
        column(0.6).unwrap_or_default(),
    );
    let mut pairs = 0;
    let mut below = 0;
    for ((t, a), (_, b)) in mid.iter().zip(&high) {
        pairs += 1;
        if matches!((a, b), (Some(a), Some(b)) if a < b) {
            below += 1;
        } else {
            cx.cmp.notes.push(format!(
                "t_op = {t}: g0 = 0.5 gives {a:?}, g0 = 0.6 gives {b:?}"
            ));
        }
    }
    cx.check_holds(
        "fig1.g0_0.5_below_0.6",
        pairs > 0 && below == pairs,
        format!("{below} of {pairs} target times"),
    );
    Ok(())
}

/// Time traces for the bichromatic and monochromatic optima.
fn fig2(cx: &mut Context) -> Result<(), HarnessError> {
    let specs = ["bichromatic", "monochromatic"]
        .into_iter()
        .map(|name| {
            Spec::fixed(name.into(), baseline(), cx.fixtures.drive(name), 8.0)
                .eval_at(5.0)
                .verified_steps()
        })
        .collect();
    let r = cx.run(specs)?;
    cx.cmp.curves.extend([
        "bichromatic/series.csv".into(),
        "monochromatic/series.csv".into(),
    ]);
    cx.check_value("fig2.g2_bichromatic", r[0].g2());
    cx.check_value("fig2.g2_monochromatic", r[1].g2());
    Ok(())
}

/// Minimal `g²` against cavity decay at two target times. The reference
/// claim covers decay rates below 0.03; values at 0.03 are reported.
fn fig3(cx: &mut Context) -> Result<(), HarnessError> {
    let table = cx.fixtures.kappa_scan.clone();
    let quick = cx.opts.quick;
    let rows: Vec<_> = table
        .rows
        .iter()
        .filter(|r| !quick || r.t_op == 5.0)
        .copied()
        .collect();
    let mut specs: Vec<Spec> = rows
        .iter()
        .map(|r| {
            let d = DriveSpec::bichromatic(
                (table.amplitude, table.amplitude),
                (r.detunings[0], r.detunings[1]),
                r.psi,
            )
            .unwrap();
            Spec::fixed(
                format!("t{}_kappa_{}_published", r.t_op, label(r.kappa)),
                params(table.g0, r.kappa),
                d,
                r.t_op,
            )
        })
        .collect();
    if !quick {
        specs.extend(rows.iter().map(|r| {
            Spec::search(
                format!("t{}_kappa_{}_optimized", r.t_op, label(r.kappa)),
                params(table.g0, r.kappa),
                SearchSpace::bichromatic((table.amplitude, table.amplitude)),
                ObjectiveSpec::min_g2(r.t_op),
                false,
            )
        }));
    }
    let records = cx.run(specs)?;
    let (published, optimized) = records.split_at(rows.len());
    let mut worst_small_kappa: Option<f64> = Some(0.0);
    let mut boundary = Vec::new();
    let mut unvalidated = 0;
    for t_op in [5.0, 10.0] {
        let mut csv = Csv::new(&[
            "kappa",
            "g2_published",
            "g2_tilde_published",
            "g2_tilde_optimized",
            "g2_optimized",
            "suspicious",
        ]);
        let mut any = false;
        for (i, r) in rows.iter().enumerate().filter(|(_, r)| r.t_op == t_op) {
            any = true;
            let g = published[i].g2();
            if r.kappa < 0.03 - 1e-12 && !r.suspicious {
                worst_small_kappa = match (worst_small_kappa, g) {
                    (Some(w), Some(g)) => Some(w.max(g)),
                    _ => None,
                };
            } else if (r.kappa - 0.03).abs() < 1e-12 {
                boundary.push(format!("t_op = {t_op}: {}", fmt_opt(g)));
            }
            let opt = optimized.get(i).and_then(|r| r.summary.as_ref());
            if opt
                .and_then(|s| s.verification)
                .is_some_and(|v| !v.validated)
            {
                unvalidated += 1;
            }
            csv.row(&[
                fmt_float(r.kappa),
                fmt_opt(g),
                fmt_opt(
                    published[i]
                        .summary
                        .as_ref()
                        .and_then(|s| s.analytic.g2_tilde),
                ),
                fmt_opt(opt.and_then(|s| s.objective)),
                fmt_opt(opt.and_then(|s| s.at_eval.g2)),
                r.suspicious.to_string(),
            ]);
        }
        if any {
            cx.curve(&format!("t{t_op}"), &csv)?;
        }
    }
    cx.cmp.notes.push(table.note.clone());
    cx.cmp.notes.push(format!(
        "g2 at kappa = 0.03, published drives: {}",
        boundary.join(", ")
    ));
    if !quick {
        cx.cmp.notes.push(format!(
            "{unvalidated} of {} fresh optimizations fail exact validation (leading-order p2 cancels while the exact p2 does not)",
            rows.len()
        ));
    }
    cx.check_value("fig3.below_1e-4_for_small_kappa", worst_small_kappa);
    Ok(())
}

/// Flat-minimum drive: value and width of the minimum around 5T.
fn fig4(cx: &mut Context) -> Result<(), HarnessError> {
    let spec = Spec::fixed("flat".into(), baseline(), cx.fixtures.drive("flat"), 8.0)
        .eval_at(5.0)
        .verified_steps();
    let r = cx.run(vec![spec])?;
    cx.cmp.curves.push("flat/series.csv".into());
    cx.check_value("fig4.g2", r[0].g2());
    cx.check_value(
        "fig4.flat_width",
        r[0].summary.as_ref().and_then(|s| s.flat_width),
    );
    Ok(())
}

/// Photon-number truncation for the dissipation grid; a photon cutoff of 3
/// agrees with 10 to better than 1e-6 relative at the hottest grid point.
pub const DISSIPATION_TRUNCATION: Truncation = Truncation {
    n_phot_max: 4,
    n_phon_max: 25,
};

/// `g²(5T)` of the flat-minimum drive against mechanical damping and bath
/// temperature.
fn fig5(cx: &mut Context) -> Result<(), HarnessError> {
    let quick = cx.opts.quick;
    let gammas: Vec<f64> = if quick {
        vec![2e-6, 2e-4, 2e-2]
    } else {
        vec![2e-6, 2e-5, 2e-4, 2e-3, 2e-2]
    };
    let baths: Vec<f64> = if quick {
        vec![0.0, 10.0]
    } else {
        vec![0.0, 0.1, 1.0, 10.0]
    };
    let drive = cx.fixtures.drive("flat");
    let mut specs = vec![
        Spec::fixed("undamped".into(), baseline(), drive.clone(), 5.0)
            .truncation(DISSIPATION_TRUNCATION),
    ];
    for &nb in &baths {
        for &g in &gammas {
            let p = baseline()
                .with_mechanical_bath(g, nb)
                .map_err(|e| HarnessError::from_core("params", e))?;
            specs.push(
                Spec::fixed(
                    format!("nbar_{}_gamma_{g:e}", label(nb)),
                    p,
                    drive.clone(),
                    5.0,
                )
                .truncation(DISSIPATION_TRUNCATION),
            );
        }
    }
    let records = cx.run(specs)?;
    let reference = records[0].g2();
    let mut header = vec!["gamma".to_string()];
    header.extend(baths.iter().map(|nb| format!("g2_nbar_{nb}")));
    let mut csv = Csv::new(&header);
    let grid = |b: usize, k: usize| records[1 + b * gammas.len() + k].g2();
    for (k, g) in gammas.iter().enumerate() {
        let mut row = vec![fmt_float(*g)];
        row.extend((0..baths.len()).map(|b| fmt_opt(grid(b, k))));
        csv.row(&row);
    }
    cx.curve("g2_vs_gamma", &csv)?;
    cx.cmp.notes.push(format!(
        "undamped reference g2(5T) = {}",
        fmt_opt(reference)
    ));

    let mut broken = Vec::new();
    for (b, nb) in baths.iter().enumerate() {
        let column: Vec<Option<f64>> = (0..gammas.len()).map(|k| grid(b, k)).collect();
        let ok = column.iter().all(Option::is_some)
            && column
                .windows(2)
                .all(|w| w[1].unwrap() >= w[0].unwrap() * (1.0 - 1e-9));
        if !ok {
            broken.push(format!("nbar_b = {nb}: {column:?}"));
        }
    }
    let detail = if broken.is_empty() {
        String::new()
    } else {
        broken.join("; ")
    };
    cx.check_holds("fig5.monotone_in_gamma", broken.is_empty(), detail);
    let at_kappa = gammas.iter().position(|&g| g == 2e-2).and_then(|k| {
        baths
            .iter()
            .position(|&nb| nb == 0.0)
            .and_then(|b| grid(b, k))
    });
    cx.check_value("fig5.zero_temperature_at_kappa", at_kappa);
    Ok(())
}

/// Drive strength at which the weak-drive expansion starts to fail.
fn fig6(cx: &mut Context) -> Result<(), HarnessError> {
    let eps: Vec<f64> = if cx.opts.quick {
        vec![0.001, 0.005, 0.01]
    } else {
        vec![
            0.001, 0.002, 0.003, 0.004, 0.005, 0.006, 0.007, 0.008, 0.009, 0.01,
        ]
    };
    let flat = cx.fixtures.drive("flat");
    let reference_amplitude = flat.tones[0].amplitude;
    let p = baseline();
    let specs = eps
        .iter()
        .map(|e| {
            Spec::fixed(
                format!("eps_{e}"),
                p,
                flat.scaled(e / reference_amplitude),
                5.0,
            )
        })
        .collect();
    let records = cx.run(specs)?;
    let t = 5.0 * p.period();
    let tilde = |k: usize, e: f64| {
        PerturbativeModel::new(&p, k)
            .ok()
            .and_then(|m| m.g2_tilde(&flat.scaled(e / reference_amplitude), t).ok())
    };
    let mut csv = Csv::new(&[
        "epsilon",
        "g2",
        "g2_tilde_sim",
        "g2_tilde_k1",
        "g2_tilde_k3",
    ]);
    for (e, r) in eps.iter().zip(&records) {
        csv.row(&[
            fmt_float(*e),
            fmt_opt(r.g2()),
            fmt_opt(r.summary.as_ref().and_then(|s| s.at_eval.g2_tilde_sim)),
            fmt_opt(tilde(1, *e)),
            fmt_opt(tilde(3, *e)),
        ]);
    }
    cx.curve("g2_vs_epsilon", &csv)?;
    let small = eps[0];
    let (g, k1, k3) = (records[0].g2(), tilde(1, small), tilde(3, small));
    cx.check_value(
        "fig6.relative_error_small_drive",
        g.zip(k3).map(|(g, k3)| (k3 - g).abs() / g),
    );
    match (g, k1, k3) {
        (Some(g), Some(k1), Some(k3)) => {
            let order_gap = (k1 - k3).abs();
            let sim_gap = (k3 - g).abs();
            cx.check_holds(
                "fig6.order_gap_dominates",
                order_gap > sim_gap,
                format!(
                    "|K1 - K3| = {order_gap:.3e}, |K3 - sim| = {sim_gap:.3e} at epsilon = {small}"
                ),
            );
        }
        _ => cx.check_holds("fig6.order_gap_dominates", false, "g² undefined".into()),
    }
    Ok(())
}

/// Blockade strength for published platform parameters, with the drive
/// re-optimized for each platform (the published drive for ours).
fn table1(cx: &mut Context) -> Result<(), HarnessError> {
    let platforms = cx.fixtures.platforms.clone();
    let amplitude = cx.fixtures.drive("bichromatic").tones[0].amplitude;
    let quick = cx.opts.quick;
    let core = |e| HarnessError::from_core("params", e);
    let mut first = Vec::new();
    for pf in &platforms {
        let p = params(pf.g0, pf.kappa)
            .with_mechanical_bath(pf.gamma, 0.0)
            .map_err(core)?;
        first.push(if pf.name == "this_work" {
            Spec::fixed(
                format!("{}_nbar_0", pf.name),
                p,
                cx.fixtures.drive("bichromatic"),
                5.0,
            )
            .verified_steps()
        } else {
            Spec::search(
                format!("{}_nbar_0", pf.name),
                p,
                SearchSpace::bichromatic((amplitude, amplitude)),
                ObjectiveSpec::min_g2(5.0),
                quick,
            )
        });
    }
    let cold = cx.run(first)?;
    let mut second = Vec::new();
    for (pf, r) in platforms.iter().zip(&cold) {
        let Some(s) = &r.summary else { continue };
        let p = params(pf.g0, pf.kappa)
            .with_mechanical_bath(pf.gamma, 1.0)
            .map_err(core)?;
        second.push(
            Spec::fixed(format!("{}_nbar_1", pf.name), p, s.drive.clone(), 5.0).verified_steps(),
        );
    }
    let warm = cx.run(second)?;
    let mut csv = Csv::new(&["platform", "g0", "kappa", "gamma", "g2_nbar_0", "g2_nbar_1"]);
    for (pf, r) in platforms.iter().zip(&cold) {
        let w = warm
            .iter()
            .find(|w| w.scenario == format!("{}_nbar_1", pf.name));
        let (g_cold, g_warm) = (r.g2(), w.and_then(RunRecord::g2));
        csv.row(&[
            pf.name.clone(),
            fmt_float(pf.g0),
            fmt_float(pf.kappa),
            fmt_float(pf.gamma),
            fmt_opt(g_cold),
            fmt_opt(g_warm),
        ]);
        cx.check_value(&format!("table1.{}.nbar_0", pf.name), g_cold);
        cx.check_value(&format!("table1.{}.nbar_1", pf.name), g_warm);
    }
    cx.curve("platforms", &csv)?;
    Ok(())
}

/// Trading blockade depth for single-photon occupation: the flat-minimum
/// objective with and without the occupation reward.
fn sec4d(cx: &mut Context) -> Result<(), HarnessError> {
    let quick = cx.opts.quick;
    let amplitude = cx.fixtures.drive("flat").tones[0].amplitude;
    // the weight is fixed by the baseline amplitude, not by the searched one
    let w1 = amplitude * amplitude / 10.0;
    let (w_d, w_s) = (1.0, 10.0);
    let t_op = 5.0;
    let specs = vec![
        Spec::search(
            "eta1".into(),
            baseline(),
            SearchSpace::bichromatic((amplitude, amplitude)),
            ObjectiveSpec::flat_min(t_op, w_d, w_s),
            quick,
        ),
        Spec::search(
            "eta2".into(),
            baseline(),
            SearchSpace::bichromatic((amplitude, amplitude)).with_free_amplitudes(2.0 * amplitude),
            ObjectiveSpec::flat_min_occ(t_op, w_d, w_s, w1),
            quick,
        ),
    ];
    let r = cx.run(specs)?;
    let p1 = |r: &RunRecord| r.summary.as_ref().map(|s| s.at_eval.p1);
    cx.check_value("sec4d.p1_eta1", p1(&r[0]));
    cx.check_value("sec4d.p1_eta2", p1(&r[1]));
    cx.check_value("sec4d.g2_eta2", r[1].g2());
    cx.check_value(
        "sec4d.p1_gain",
        p1(&r[1]).zip(p1(&r[0])).map(|(a, b)| a / b),
    );
    cx.check_value("sec4d.g2_eta2_bound", r[1].g2());
    let mut csv = Csv::new(&[
        "objective",
        "p1",
        "g2",
        "flat_width",
        "eps1",
        "eps2",
        "delta1",
        "delta2",
        "psi",
    ]);
    for rec in &r {
        let Some(s) = &rec.summary else { continue };
        let d = &s.drive.tones;
        csv.row(&[
            rec.scenario.clone(),
            fmt_float(s.at_eval.p1),
            fmt_opt(s.at_eval.g2),
            fmt_opt(s.flat_width),
            fmt_float(d[0].amplitude),
            fmt_float(d[1].amplitude),
            fmt_float(d[0].detuning),
            fmt_float(d[1].detuning),
            fmt_float(d[1].phase),
        ]);
    }
    cx.curve("optima", &csv)?;
    cx.cmp.notes.push(format!(
        "occupation weight w1 = {w1:e}, Taylor depth {}",
        cx.order()
    ));
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_names_round_trip() {
        for t in Target::ALL {
            assert_eq!(t.name().parse::<Target>().unwrap(), t);
            assert_eq!(
                serde_json::to_string(&t).unwrap(),
                format!("\"{}\"", t.name())
            );
        }
        assert!("fig7".parse::<Target>().is_err());
    }

    #[test]
    fn labels_are_path_safe() {
        assert_eq!(label(0.35), "0.35");
        assert_eq!(label(-0.1), "m0.1");
    }
}
