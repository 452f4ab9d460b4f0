use blockade_harness::run::SERIES_HEADER;
use blockade_harness::sweep::AGGREGATE_COLUMNS;
use blockade_harness::{run_scenario, sweep, HarnessError, RunOptions, RunStatus, Scenario};

const MONOCHROMATIC: &str = r#"{
    "name": "mono",
    "params": {"g0": 0.3, "kappa": 0.02},
    "drive": {"tones": [{"amplitude": 0.005, "detuning": -0.03953}]},
    "t_final": 5
}"#;

fn read(path: &std::path::Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn five_period_run_writes_series_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let s = Scenario::from_json(MONOCHROMATIC).unwrap();
    let r = run_scenario(&s, &RunOptions::new(dir.path(), false)).unwrap();
    assert_eq!(r.status, RunStatus::Ok);

    let csv = read(&dir.path().join("mono/series.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), SERIES_HEADER.join(","));
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|f| f.parse().unwrap()).collect())
        .collect();
    assert!(rows.len() >= 1000, "{} rows", rows.len());
    assert!(rows.iter().all(|r| r.len() == SERIES_HEADER.len()));
    let last = rows.last().unwrap();
    assert!((last[0] - 5.0).abs() < 1e-12);
    assert!(rows.windows(2).all(|w| w[1][0] > w[0][0]));
    // first row is the vacuum: no photons, g² undefined
    assert_eq!(rows[0][1], 1.0);
    assert!(rows[0][5].is_nan());

    let summary: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("mono/summary.json"))).unwrap();
    let g2 = summary["at_eval"]["g2"].as_f64().unwrap();
    assert!((g2 / 8.9e-2 - 1.0).abs() < 0.1, "{g2}");
    assert_eq!(summary["t_eval"].as_f64(), Some(5.0));
}

#[test]
fn identical_rerun_is_served_from_cache() {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions::new(dir.path(), false);
    let mut s = Scenario::from_json(MONOCHROMATIC).unwrap();
    s.t_final = 1.0;
    let first = run_scenario(&s, &opts).unwrap();
    let summary = read(&dir.path().join("mono/summary.json"));
    let second = run_scenario(&s, &opts).unwrap();
    assert!(!first.cached && second.cached);
    assert_eq!(first.summary, second.summary);
    assert_eq!(read(&dir.path().join("mono/summary.json")), summary);

    let forced = run_scenario(&s, &RunOptions::new(dir.path(), true)).unwrap();
    assert!(!forced.cached);
    assert_eq!(forced.summary, first.summary);

    // a changed physical input misses the cache
    s.params.kappa = 0.021;
    assert!(!run_scenario(&s, &opts).unwrap().cached);
}

#[test]
fn negative_decay_rate_is_a_config_error() {
    let text = MONOCHROMATIC.replace("\"kappa\": 0.02", "\"kappa\": -0.02");
    let e = Scenario::from_json(&text).unwrap_err();
    match &e {
        HarnessError::Config { path, .. } => assert_eq!(path, "params.kappa"),
        other => panic!("{other:?}"),
    }
    assert_eq!(e.exit_code(), 2);
}

#[test]
fn scenarios_round_trip_through_json() {
    let search = r#"{
        "name": "search",
        "params": {"g0": 0.3, "kappa": 0.02, "gamma": 1e-4, "nbar_bath": 0.5},
        "search": {
            "space": {"tones": [
                {"amplitude": {"fixed": 0.005}, "detuning": {"range": [-0.5, 0.5]}, "phase": {"fixed": 0}}
            ]},
            "objective": {"kind": "MinG2", "t_op": 5},
            "restarts": 3,
            "seed": 7
        },
        "truncation": {"n_phot_max": 4, "n_phon_max": 20},
        "t_final": 6,
        "taylor_order": 2
    }"#;
    for text in [MONOCHROMATIC, search] {
        let s = Scenario::from_json(text).unwrap();
        let again = Scenario::from_json(&s.to_json()).unwrap();
        assert_eq!(again, s);
        assert_eq!(again.hash(), s.hash());
    }
}

#[test]
fn sweep_over_a_tone_detuning() {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions::new(dir.path(), false);
    let mut s = Scenario::from_json(MONOCHROMATIC).unwrap();
    s.t_final = 0.5;
    s.outputs.series = false;
    let values = [-0.05, -0.04, -0.03, -0.02, -0.01];
    let records = sweep(&s, "tones[0].detuning", &values, &opts).unwrap();
    assert_eq!(records.len(), 5);
    let csv = read(&dir.path().join("sweep_tones_0_detuning.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 6);
    let mut header = vec!["tones[0].detuning"];
    header.extend(AGGREGATE_COLUMNS);
    assert_eq!(lines[0], header.join(","));
    for (line, x) in lines[1..].iter().zip(values) {
        let first: f64 = line.split(',').next().unwrap().parse().unwrap();
        assert_eq!(first, x);
    }
    for (i, r) in records.iter().enumerate() {
        assert_eq!(
            r.resolved.drive.as_ref().unwrap().tones[0].detuning,
            values[i]
        );
        assert!(!dir.path().join(&r.scenario).join("series.csv").exists());
    }
}

#[test]
fn empty_sweep_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let s = Scenario::from_json(MONOCHROMATIC).unwrap();
    let records = sweep(&s, "kappa", &[], &RunOptions::new(dir.path(), false)).unwrap();
    assert!(records.is_empty());
    let csv = read(&dir.path().join("sweep_kappa.csv"));
    assert_eq!(csv.lines().count(), 1);
    assert!(csv.starts_with("kappa,scenario,status"));
}

#[test]
fn unknown_sweep_axis_is_rejected_before_running() {
    let dir = tempfile::tempdir().unwrap();
    let s = Scenario::from_json(MONOCHROMATIC).unwrap();
    let e = sweep(
        &s,
        "params.zeta",
        &[1.0],
        &RunOptions::new(dir.path(), false),
    )
    .unwrap_err();
    assert!(matches!(e, HarnessError::Config { .. }));
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
}

#[test]
fn shipped_scenarios_parse() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut n = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        let s = Scenario::from_file(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(s.drive.is_some(), s.search.is_none());
        n += 1;
    }
    assert!(n >= 3);
}
