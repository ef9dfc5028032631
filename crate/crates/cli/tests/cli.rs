use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mttdl_cli::config::ScenarioFile;
use mttdl_core::markov::farm_mttdl;
use mttdl_core::scheme::ProtectionScheme;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mttdl"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn write_config(dir: &tempfile::TempDir, body: &str) -> PathBuf {
    let path = dir.path().join("scenario.toml");
    std::fs::write(&path, body).unwrap();
    path
}

const TABLE_SCENARIO: &str = r#"
[scheme]
kind = "raid6"
n = 8
arrays = 10000

[rates]
mttf_hours = 43800
mttr_hours = 5

[prediction]
tpr = 0.8
"#;

/// Parse a CSV body into its header and rows of raw fields.
fn csv(body: &str) -> (Vec<String>, Vec<Vec<String>>) {
    let mut lines = body.lines();
    let header = lines
        .next()
        .unwrap()
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    (header, rows)
}

fn column(body: &str, name: &str) -> Vec<f64> {
    let (h, rows) = csv(body);
    let i = h
        .iter()
        .position(|c| c == name)
        .unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

#[test]
fn mttdl_report_for_reference_cell() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, TABLE_SCENARIO);
    let o = run(&[
        "mttdl",
        "--config",
        cfg.to_str().unwrap(),
        "--format",
        "csv",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let body = stdout(&o);
    let days = column(&body, "mttdl_days");
    assert_eq!(days.len(), 2);
    // model value for this cell, by both methods
    for d in &days {
        assert!((d / 4630.68 - 1.0).abs() < 1e-5, "{d}");
    }
    assert!(((days[0] - days[1]) / days[0]).abs() < 1e-9);
    assert!(body.contains("laplace") && body.contains("hitting_time"));
}

#[test]
fn tpr_one_prints_infinite_and_succeeds() {
    let o = run(&["mttdl", "--tpr", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("infinite"));
    let o = run(&["mttdl", "--tpr", "1", "--format", "csv"]);
    assert!(column(&stdout(&o), "mttdl_hours")
        .iter()
        .all(|h| h.is_infinite()));
}

#[test]
fn negative_mttr_in_file_names_field_and_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        &TABLE_SCENARIO.replace("mttr_hours = 5", "mttr_hours = -5"),
    );
    let o = run(&["mttdl", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("mttr_hours") && err.contains("line 9"),
        "{err}"
    );
}

#[test]
fn negative_mttr_flag_names_flag() {
    let o = run(&["mttdl", "--mttr-hours", "-5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--mttr-hours"));
}

#[test]
fn unknown_key_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        &dir,
        &TABLE_SCENARIO.replace("[rates]", "[rates]\nmtbf = 3"),
    );
    let o = run(&["mttdl", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("mtbf") && err.contains("line 8"), "{err}");
}

#[test]
fn conflicting_flags_fail() {
    let o = run(&["mttdl", "--tpr", "0.9", "--auc", "0.95", "--fpr", "0.01"]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&["roc", "--p", "2", "--auc", "0.9"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn config_tpr_with_flag_auc_conflicts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(&dir, TABLE_SCENARIO);
    let o = run(&[
        "mttdl",
        "--config",
        cfg.to_str().unwrap(),
        "--auc",
        "0.9",
        "--fpr",
        "0.01",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("tpr"));
}

#[test]
fn roc_p1_is_the_diagonal() {
    let o = run(&["roc", "--p", "1", "--points", "21"]);
    assert_eq!(o.status.code(), Some(0));
    let body = stdout(&o);
    let (fpr, tpr) = (column(&body, "fpr"), column(&body, "tpr"));
    assert_eq!(fpr.len(), 21);
    for (f, t) in fpr.iter().zip(&tpr) {
        assert_eq!(f.to_bits(), t.to_bits());
    }
}

#[test]
fn cost_at_zero_fpr_is_zero() {
    let o = run(&[
        "cost",
        "--replacement-cost",
        "375",
        "--lifetime-hours",
        "43800",
        "--window-hours",
        "6",
        "--fprs",
        "0,0,0",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(column(&stdout(&o), "cost_per_window")
        .iter()
        .all(|&c| c == 0.0));
}

#[test]
fn cost_without_parameters_fails() {
    let o = run(&["cost"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn simulate_is_byte_stable_per_seed() {
    let args = [
        "simulate", "--arrays", "1", "--n", "4", "--m", "1", "--scheme", "rs", "--trials", "300",
    ];
    let a = run(&[&args[..], &["--seed", "11"]].concat());
    let b = run(&[&args[..], &["--seed", "11"]].concat());
    let c = run(&[&args[..], &["--seed", "12"]].concat());
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    let j1 = run(&[&args[..], &["--seed", "11", "--format", "json"]].concat());
    let j2 = run(&[&args[..], &["--seed", "11", "--format", "json"]].concat());
    assert_eq!(j1.stdout, j2.stdout);
}

#[test]
fn heavy_censoring_exits_3() {
    let o = run(&[
        "simulate",
        "--arrays",
        "1",
        "--trials",
        "50",
        "--seed",
        "3",
        "--event-cap",
        "20",
        "--mttr-hours",
        "24",
    ]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).contains("event cap"));
    assert!(stdout(&o).contains("true"));
}

#[test]
fn chain_mode_rejects_weibull() {
    let o = run(&[
        "simulate",
        "--config",
        scenarios_dir()
            .join("raid_dp_16_2_mixture.toml")
            .to_str()
            .unwrap(),
        "--mode",
        "chain",
    ]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn csv_floats_round_trip_bitwise() {
    let o = run(&["sweep", "--axis", "tpr=0.8,0.85,0.9", "--mttr-hours", "5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let hours = column(&stdout(&o), "mttdl_hours");
    let scheme = ProtectionScheme::raid6(8, 10_000).unwrap();
    for (h, tpr) in hours.iter().zip([0.8, 0.85, 0.9]) {
        let lambda = (1.0 - tpr) / 43_800.0;
        let m = farm_mttdl(100_000, lambda, 1.0 / 5.0, &scheme.alpha()).unwrap();
        assert_eq!(h.to_bits(), m.hours().unwrap().to_bits());
    }
}

#[test]
fn sweep_order_and_bad_point() {
    let o = run(&[
        "sweep",
        "--axis",
        "mttr_hours=5,10,15",
        "--axis",
        "tpr=0.8:0.95:4",
    ]);
    let body = stdout(&o);
    let (h, rows) = csv(&body);
    assert_eq!(&h[..2], ["mttr_hours", "tpr"]);
    assert_eq!(rows.len(), 12);
    assert_eq!(rows[1][..2], ["5.0", "0.85"]);
    assert_eq!(rows[4][..2], ["10.0", "0.8"]);
    let o = run(&["sweep", "--axis", "tpr=0.5,1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("tpr=1.5"));
    let o = run(&["sweep", "--axis", "colour=1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_output_is_stable() {
    let a = run(&["sweep", "--axis", "tpr=0.8,0.9", "--format", "json"]);
    let b = run(&["sweep", "--axis", "tpr=0.8,0.9", "--format", "json"]);
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let keys: Vec<&String> = v[0].as_object().unwrap().keys().collect();
    assert_eq!(
        keys,
        ["tpr", "fpr", "mttdl_hours", "mttdl_days", "cost_per_window"]
    );
}

#[test]
fn table1_text_and_csv() {
    let o = run(&["table1"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 13);
    assert!(text.contains("--"));
    let o = run(&["table1", "--format", "csv", "--tpr", "0.95", "--mttr", "5"]);
    let (_, rows) = csv(&stdout(&o));
    assert_eq!(rows.len(), 1);
    assert!(rows[0][4].parse::<f64>().unwrap() > 1e13);
}

#[test]
fn figure_four_is_linear_and_bad_id_fails() {
    let o = run(&["figure", "--id", "4", "--resolution", "5"]);
    let body = stdout(&o);
    let (x, y) = (column(&body, "fpr"), column(&body, "cost_per_window"));
    assert_eq!(y[0], 0.0);
    let slope = y[4] / x[4];
    for k in 1..5 {
        assert!((y[k] / x[k] / slope - 1.0).abs() < 1e-14);
    }
    assert_eq!(run(&["figure", "--id", "7"]).status.code(), Some(1));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("roc.csv");
    let o = run(&["roc", "--auc", "0.9", "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let body = std::fs::read_to_string(path).unwrap();
    assert!(body.starts_with("p,auc,fpr,tpr\n"));
    for a in column(&body, "auc") {
        assert!((a - 0.9).abs() < 1e-6);
    }
}

#[test]
fn shipped_scenarios_load_and_round_trip() {
    let mut seen = 0;
    for entry in std::fs::read_dir(scenarios_dir()).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("toml") {
            continue;
        }
        let src = std::fs::read_to_string(&path).unwrap();
        let a = ScenarioFile::parse(&src).unwrap().file;
        let b = ScenarioFile::parse(&a.to_toml()).unwrap().file;
        assert_eq!(a, b, "{}", path.display());
        seen += 1;
    }
    assert!(seen >= 2);
}

#[test]
fn help_exits_zero() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    for cmd in [
        "mttdl", "sweep", "table1", "figure", "roc", "cost", "simulate",
    ] {
        assert!(stdout(&o).contains(cmd));
    }
}
