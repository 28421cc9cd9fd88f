use std::path::{Path, PathBuf};
use std::process::Command;

use storage_cuts::bench::{
    emit_report, load_series, parse_report, run_benchmark, run_verify, ExperimentConfig, Problem, ReportFormat,
};
use storage_cuts::cuts::export::read_cuts_csv;
use storage_cuts::cuts::gen_window_cuts;
use storage_cuts::cuts::redundancy::redundancy_filter;
use storage_cuts::solve::model::Preset;
use storage_cuts::{BatteryParams, Error};

fn data() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data")
}

fn bench() -> Command {
    Command::new(env!("CARGO_BIN_EXE_bench"))
}

fn small_config(dir: &Path) -> ExperimentConfig {
    let d = data();
    ExperimentConfig {
        battery_files: vec![d.join("batteries.jsonl")],
        instance_files: vec![d.join("prices/day02.csv"), d.join("prices/day06.csv")],
        problem: Problem::Scheduling,
        presets: vec![Preset::MILP, Preset::HCHLP, Preset::TLP, Preset::TLPu],
        threshold: 1e-4,
        output: dir.join("report.csv"),
        parallelism: 2,
        timing: false,
    }
}

#[test]
fn bundled_series_load() {
    let prices = load_series(data().join("prices/day02.csv")).unwrap();
    assert_eq!(prices.len(), 24);
    assert!(prices.iter().any(|&p| p < 0.0));
    for cfg in ["scheduling.json", "tracking.json"] {
        let exp = ExperimentConfig::load(data().join(cfg)).unwrap().prepare().unwrap();
        assert!(exp.instances.iter().all(|(_, s)| s.len() == 24));
    }
    let exp = ExperimentConfig::load(data().join("scheduling.json")).unwrap().prepare().unwrap();
    assert_eq!((exp.batteries.len(), exp.instances.len()), (3, 10));
    let exp = ExperimentConfig::load(data().join("tracking.json")).unwrap().prepare().unwrap();
    assert_eq!((exp.batteries.len(), exp.instances.len()), (1, 20));
}

#[test]
fn horizon_mismatch_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let series = dir.path().join("short.csv");
    std::fs::write(&series, "t,value\n1,3\n2,-1\n").unwrap();
    let mut cfg = small_config(dir.path());
    cfg.instance_files = vec![series];
    assert!(matches!(cfg.prepare(), Err(Error::Config(_))));
}

#[test]
fn sweep_is_deterministic_and_exact_rows_are_clean() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let exp = cfg.prepare().unwrap();
    let a = run_benchmark(&exp).unwrap();
    let mut serial = exp.clone();
    serial.config.parallelism = 1;
    let b = run_benchmark(&serial).unwrap();
    assert_eq!(a.rows, b.rows);
    assert_eq!(a.results, b.results);
    assert_eq!(a.num_failures(), 0);
    assert_eq!(a.rows.len(), 4);
    for row in &a.rows {
        assert_eq!(row.instances, 6);
        assert!((0.0..=100.0).contains(&row.pct_hours_violated));
        assert!(row.delta_time_pct.is_none());
    }
    let milp = &a.rows[0];
    assert_eq!(milp.pct_hours_violated, 0.0);
    assert_eq!(a.rows[3].pct_hours_violated, 0.0);

    emit_report(&a.rows, ReportFormat::Csv, &cfg.output).unwrap();
    let text = std::fs::read_to_string(&cfg.output).unwrap();
    assert_eq!(parse_report(&text).unwrap(), a.rows);
    let md = dir.path().join("nested/report.md");
    emit_report(&a.rows, ReportFormat::from_path(&md), &md).unwrap();
    assert!(std::fs::read_to_string(&md).unwrap().starts_with("| Formulation |"));
    assert!(matches!(emit_report(&[], ReportFormat::Csv, &cfg.output), Err(Error::EmptyReport)));
}

#[test]
fn timing_fills_the_time_column() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = small_config(dir.path());
    cfg.instance_files.truncate(1);
    cfg.timing = true;
    let out = run_benchmark(&cfg.prepare().unwrap()).unwrap();
    assert_eq!(out.rows[0].delta_time_pct, Some(0.0));
    assert!(out.rows.iter().all(|r| r.delta_time_pct.is_some()));
}

#[test]
fn verify_suite_passes_on_a_lossy_battery() {
    let p = BatteryParams {
        p_dis_max: 2.0,
        p_ch_max: 3.0,
        soc_min: 0.5,
        soc_max: 6.0,
        eta_c: 0.9,
        eta_d: 0.95,
        delta: 1.0,
        soc_init: 2.0,
        horizon: 5,
    };
    let checks = run_verify(&p).unwrap();
    assert!(checks.len() >= 9);
    for c in &checks {
        assert!(c.pass, "{}: {}", c.name, c.detail);
    }
}

#[test]
fn cli_run_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, serde_json::to_string_pretty(&cfg).unwrap()).unwrap();
    let out = bench().args(["run", "--config"]).arg(&path).arg("--no-timing").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("| TLPu |"));
    let rows = parse_report(&std::fs::read_to_string(&cfg.output).unwrap()).unwrap();
    assert_eq!(rows.len(), 4);
}

#[test]
fn cli_config_errors_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let missing = bench().args(["run", "--config", "/nonexistent/cfg.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));

    let mut cfg = serde_json::to_value(small_config(dir.path())).unwrap();
    cfg["presets"] = serde_json::json!(["MIQP"]);
    let path = dir.path().join("bad.json");
    std::fs::write(&path, cfg.to_string()).unwrap();
    let out = bench().args(["run", "--config"]).arg(&path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("MIQP"));

    let unknown = bench().args(["cuts", "--battery", "x", "--family", "diagonal", "--out", "y"]).output().unwrap();
    assert_eq!(unknown.status.code(), Some(1));
    assert_eq!(bench().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn cli_cuts_export_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let battery = dir.path().join("b.json");
    let p = BatteryParams {
        p_dis_max: 10.0,
        p_ch_max: 10.0,
        soc_min: 0.0,
        soc_max: 5.0,
        eta_c: 1.0,
        eta_d: 1.0,
        delta: 1.0,
        soc_init: 0.0,
        horizon: 4,
    };
    std::fs::write(&battery, serde_json::to_string(&p).unwrap()).unwrap();
    for family in ["window", "u", "pozo"] {
        let out = dir.path().join(format!("{family}.csv"));
        let st = bench()
            .args(["cuts", "--family", family, "--battery"])
            .arg(&battery)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert_eq!(st.code(), Some(0));
        let cuts = read_cuts_csv(std::fs::File::open(&out).unwrap()).unwrap();
        assert!(!cuts.is_empty());
        if family == "window" {
            assert_eq!(cuts, redundancy_filter(gen_window_cuts(&p), &p));
        }
    }
    let bad_index = bench()
        .args(["cuts", "--family", "u", "--index", "2", "--battery"])
        .arg(&battery)
        .arg("--out")
        .arg(dir.path().join("x.csv"))
        .status()
        .unwrap();
    assert_eq!(bad_index.code(), Some(1));
}

#[test]
fn cli_verify_prints_one_line_per_check() {
    let battery = data().join("batteries.jsonl");
    let out = bench().args(["verify", "--horizon", "4", "--index", "2", "--battery"]).arg(&battery).output().unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().count() >= 9);
    assert!(stdout.lines().all(|l| l.starts_with("PASS ")));
}
