use std::path::{Path, PathBuf};
use std::process::ExitCode;

use blockade::Truncation;
use blockade_harness::{
    reproduce, run_scenario, sweep, HarnessError, Overrides, ReproduceOptions, RunOptions,
    RunRecord, Scenario, Target,
};
use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "blockade",
    version,
    about = "Optomechanical photon blockade: simulate, optimize, reproduce"
)]
struct Cli {
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Recompute even when a cached record matches.
    #[arg(long, global = true)]
    force: bool,
    /// Optimizer seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Fock cutoffs as `photons,phonons`.
    #[arg(long, global = true, value_parser = parse_truncation)]
    trunc: Option<Truncation>,
    /// Depth of the Taylor expansion in the analytic model.
    #[arg(long, global = true)]
    taylor_order: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a scenario with a fixed drive.
    Simulate { scenario: PathBuf },
    /// Search for a drive, then verify it by simulation.
    Optimize { scenario: PathBuf },
    /// Run a scenario once per value of one parameter.
    Sweep {
        scenario: PathBuf,
        /// Parameter path, e.g. `kappa` or `tones[0].detuning`.
        #[arg(long)]
        axis: String,
        /// Comma-separated values; may be empty.
        #[arg(long, allow_hyphen_values = true, default_value = "")]
        values: String,
    },
    /// Regenerate one figure or table.
    Reproduce {
        target: String,
        /// Reduced grids and optimizer budgets.
        #[arg(long)]
        quick: bool,
    },
}

fn parse_truncation(s: &str) -> Result<Truncation, String> {
    let (a, b) = s.split_once(',').ok_or("expected `photons,phonons`")?;
    let a = a.trim().parse().map_err(|e| format!("{e}"))?;
    let b = b.trim().parse().map_err(|e| format!("{e}"))?;
    Truncation::new(a, b).map_err(|e| e.to_string())
}

fn parse_values(s: &str) -> Result<Vec<f64>, HarnessError> {
    s.split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse()
                .map_err(|_| HarnessError::config("values", format!("{v:?} is not a number")))
        })
        .collect()
}

fn load(path: &Path, overrides: &Overrides) -> Result<Scenario, HarnessError> {
    let mut s = Scenario::from_file(path)?;
    s.apply(overrides);
    s.validate()?;
    Ok(s)
}

fn report(r: &RunRecord) {
    let g2 = r
        .g2()
        .map_or("undefined".to_string(), |g| format!("{g:.4e}"));
    let cached = if r.cached { " (cached)" } else { "" };
    match &r.error {
        Some(e) => println!("{}: failed: {e}", r.scenario),
        None => println!("{}: g2 = {g2}{cached}", r.scenario),
    }
}

fn failed_runs(records: &[RunRecord]) -> Result<(), HarnessError> {
    let failed: Vec<String> = records
        .iter()
        .filter(|r| !r.ok())
        .map(|r| r.scenario.clone())
        .collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(HarnessError::RunFailed(failed))
    }
}

fn dispatch(cli: Cli) -> Result<(), HarnessError> {
    let overrides = Overrides {
        seed: cli.seed,
        truncation: cli.trunc,
        taylor_order: cli.taylor_order,
    };
    let run = RunOptions::new(&cli.out, cli.force);
    match cli.command {
        Command::Simulate { scenario } => {
            let s = load(&scenario, &overrides)?;
            if s.drive.is_none() {
                return Err(HarnessError::config(
                    "drive",
                    "simulate needs a fixed drive; use optimize for searches",
                ));
            }
            let r = run_scenario(&s, &run)?;
            report(&r);
            failed_runs(&[r])
        }
        Command::Optimize { scenario } => {
            let s = load(&scenario, &overrides)?;
            if s.search.is_none() {
                return Err(HarnessError::config(
                    "search",
                    "optimize needs a `search` section",
                ));
            }
            let r = run_scenario(&s, &run)?;
            report(&r);
            if let Some(v) = r.summary.as_ref().and_then(|s| s.verification) {
                println!("  validated: {}", v.validated);
            }
            failed_runs(&[r])
        }
        Command::Sweep {
            scenario,
            axis,
            values,
        } => {
            let values = parse_values(&values)?;
            let s = load(&scenario, &overrides)?;
            let records = sweep(&s, &axis, &values, &run)?;
            records.iter().for_each(report);
            failed_runs(&records)
        }
        Command::Reproduce { target, quick } => {
            let target: Target = target.parse()?;
            let opts = ReproduceOptions {
                run,
                quick,
                overrides,
            };
            let (cmp, records) = reproduce(target, &opts)?;
            for c in &cmp.checks {
                let verdict = match c.pass {
                    Some(true) => "PASS",
                    Some(false) => "FAIL",
                    None => "INFO",
                };
                println!(
                    "{verdict} {} computed={:?} expected={:?} {}",
                    c.id, c.computed, c.expected, c.detail
                );
            }
            for n in &cmp.notes {
                println!("note: {n}");
            }
            failed_runs(&records)?;
            match cmp.failures() {
                0 => Ok(()),
                failed => Err(HarnessError::ReferenceCheck { failed }),
            }
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
