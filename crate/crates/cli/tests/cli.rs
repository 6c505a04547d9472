use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn irart(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_irart"))
        .args(args)
        .env_remove("IRART_WORKERS")
        .output()
        .expect("spawn irart")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn path(dir: &TempDir, name: &str) -> String {
    dir.path().join(name).to_string_lossy().into_owned()
}

fn gen(out: &str, n: &str, seed: &str) -> Output {
    irart(&["gen", "--shape", "two-gaussians", "-n", n, "--seed", seed, "--out", out])
}

#[test]
fn fit_single_sample_converges() {
    let dir = TempDir::new().unwrap();
    let input = path(&dir, "one.csv");
    fs::write(&input, "x,y\n0.3,0.7\n").unwrap();
    let o = irart(&["fit", &input, "--rho", "0.5"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(out.contains("clusters: 1"), "{out}");
    assert!(out.contains("termination: CONVERGED"), "{out}");
}

#[test]
fn out_of_range_vigilance_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let input = path(&dir, "one.csv");
    fs::write(&input, "0.3,0.7\n").unwrap();
    let o = irart(&["fit", &input, "--rho", "1.5"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("--rho"), "{err}");
    assert!(err.contains("[0, 1]"), "{err}");
}

#[test]
fn scan_rejects_unlabeled_input() {
    let dir = TempDir::new().unwrap();
    let input = path(&dir, "plain.csv");
    fs::write(&input, "0.1,0.2\n0.8,0.9\n0.2,0.1\n").unwrap();
    let o = irart(&["scan", &input, "--orders", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("labels"), "{}", stderr(&o));
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (path(&dir, "a.csv"), path(&dir, "b.csv"));
    assert!(gen(&a, "60", "9").status.success());
    assert!(gen(&b, "60", "9").status.success());
    let (fa, fb) = (fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert!(!fa.is_empty());
    assert_eq!(fa, fb);
    let c = path(&dir, "c.csv");
    assert!(gen(&c, "60", "10").status.success());
    assert_ne!(fa, fs::read(&c).unwrap());
}

#[test]
fn gen_then_scan_writes_report() {
    let dir = TempDir::new().unwrap();
    let data = path(&dir, "blobs.csv");
    assert!(gen(&data, "80", "1").status.success());
    let report = path(&dir, "report.csv");
    let o = irart(&[
        "scan", &data, "--labeled", "--rho-start", "0.2", "--rho-end", "0.4", "--rho-step", "0.1",
        "--orders", "3", "--out", &report,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("mARI"));
    let text = fs::read_to_string(&report).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("rho,aNMI,aARI,mean_clusters"));
    assert_eq!(lines.by_ref().take_while(|l| !l.is_empty()).count(), 3);
    assert_eq!(lines.next(), Some("statistic,NMI,ARI"));
    assert_eq!(
        lines.map(|l| l.split(',').next().unwrap()).collect::<Vec<_>>(),
        ["peak", "mean", "std"]
    );
}

#[test]
fn single_point_grid() {
    let dir = TempDir::new().unwrap();
    let data = path(&dir, "blobs.csv");
    assert!(gen(&data, "40", "2").status.success());
    let o = irart(&[
        "scan", &data, "--labeled", "--rho-start", "0.3", "--rho-end", "0.3", "--orders", "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("grid points: 1"), "{}", stdout(&o));
    assert!(stdout(&o).contains("sNMI: 0  sARI: 0"), "{}", stdout(&o));
}

#[test]
fn help_lists_defaults() {
    let o = irart(&["fit", "--help"]);
    assert!(o.status.success());
    let help = stdout(&o);
    for default in ["[default: 0.001]", "[default: 0.5]", "[default: 0.01]", "[default: 50]"] {
        assert!(help.contains(default), "missing {default} in\n{help}");
    }
}

#[test]
fn malformed_csv_names_row_and_column() {
    let dir = TempDir::new().unwrap();
    let input = path(&dir, "bad.csv");
    fs::write(&input, "a,b\n0.1,0.2\n0.3,oops\n").unwrap();
    let o = irart(&["fit", &input]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("row") && err.contains("column"), "{err}");
}

#[test]
fn missing_input_is_a_runtime_error() {
    let o = irart(&["fit", "/nonexistent/input.csv"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("/nonexistent/input.csv"));
}

#[test]
fn unimplemented_engine_is_rejected() {
    let dir = TempDir::new().unwrap();
    let input = path(&dir, "one.csv");
    fs::write(&input, "0.3,0.7\n").unwrap();
    let o = irart(&["fit", &input, "--engine", "sa-art"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("not implemented"), "{}", stderr(&o));
}

#[test]
fn fit_writes_assignment_and_trace() {
    let dir = TempDir::new().unwrap();
    let data = path(&dir, "blobs.csv");
    assert!(gen(&data, "30", "3").status.success());
    let (labels, trace) = (path(&dir, "labels.csv"), path(&dir, "trace.jsonl"));
    let o = irart(&[
        "fit", &data, "--labeled", "--rho", "0.4", "--seed", "5", "--out", &labels, "--trace", &trace,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("ARI: "));
    let rows: Vec<String> = fs::read_to_string(&labels).unwrap().lines().map(String::from).collect();
    assert_eq!(rows[0], "sample_index,cluster_id");
    assert_eq!(rows.len(), 31);
    for (i, row) in rows[1..].iter().enumerate() {
        assert!(row.starts_with(&format!("{i},")), "{row}");
    }
    let records = fs::read_to_string(&trace).unwrap();
    assert!(records.lines().count() >= 1);
    assert!(records.lines().last().unwrap().contains("termination"));
}

#[test]
fn report_round_trips_between_formats() {
    let dir = TempDir::new().unwrap();
    let data = path(&dir, "blobs.csv");
    assert!(gen(&data, "40", "4").status.success());
    let csv = path(&dir, "r.csv");
    let o = irart(&[
        "scan", &data, "--labeled", "--rho-start", "0.3", "--rho-end", "0.5", "--rho-step", "0.1",
        "--orders", "2", "--out", &csv,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let json = path(&dir, "r.json");
    let o = irart(&["report", &csv, "--out", &json, "--format", "json"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let back = path(&dir, "back.csv");
    let o = irart(&["report", &json, "--out", &back, "--format", "csv"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(fs::read(&csv).unwrap(), fs::read(&back).unwrap());
    assert!(Path::new(&json).exists());
}
