mod common;

use std::time::Instant;

use irart_core::report::{self, ReportFormat};
use irart_core::scan::{run_scan, RhoRecord, ScanConfig, ScanReport};
use irart_core::{generate_synthetic, metrics, run_ir_art, Engine, HyperParams, Shape};
use proptest::prelude::*;

fn one_point(rho: f64) -> ScanConfig {
    ScanConfig {
        rho_start: rho,
        rho_end: rho,
        orders: 1,
        ..ScanConfig::default()
    }
}

#[test]
fn perfect_single_cell() {
    let ds = generate_synthetic(Shape::TwoGaussians, 40, 5).unwrap();
    let report = run_scan(&ds, &one_point(0.5)).unwrap();
    assert_eq!(report.per_rho.len(), 1);
    let r = &report.per_rho[0];
    assert_eq!((r.a_nmi, r.a_ari), (1.0, 1.0));
    let s = &report.summary;
    assert_eq!((s.peak_ari, s.mean_ari, s.std_ari), (1.0, 1.0, 0.0));
    assert_eq!((s.peak_nmi, s.mean_nmi, s.std_nmi), (1.0, 1.0, 0.0));
}

#[test]
fn two_gaussians_recovered_across_vigilances() {
    let ds = generate_synthetic(Shape::TwoGaussians, 200, 7).unwrap();
    let truth = ds.class_ids().unwrap();
    let data = ds.to_inputs().unwrap();
    for rho in [0.1, 0.2, 0.3, 0.4, 0.5, 0.6] {
        let p = HyperParams::default().with_rho0(rho).unwrap();
        let run = run_ir_art(&data, &p).unwrap();
        let (_, ari) = metrics::score(&truth, &run.assignment).unwrap();
        assert!(ari > 0.9, "rho {rho}: ARI {ari}");
    }
}

#[test]
fn summary_matches_one_pass_oracle() {
    let ds = generate_synthetic(Shape::GridBlobs, 120, 2).unwrap();
    let cfg = ScanConfig {
        rho_start: 0.3,
        rho_end: 0.9,
        rho_step: 0.05,
        orders: 3,
        ..ScanConfig::default()
    };
    let report = run_scan(&ds, &cfg).unwrap();
    assert_eq!(report.per_rho.len(), cfg.grid().len());

    // Welford over the records.
    let (mut n, mut mean, mut m2, mut peak) = (0.0, 0.0, 0.0, f64::MIN);
    for r in &report.per_rho {
        n += 1.0;
        let delta = r.a_ari - mean;
        mean += delta / n;
        m2 += delta * (r.a_ari - mean);
        peak = f64::max(peak, r.a_ari);
    }
    let s = &report.summary;
    assert!((s.mean_ari - mean).abs() < 1e-12);
    assert!((s.std_ari - (m2 / n).sqrt()).abs() < 1e-12);
    assert_eq!(s.peak_ari, peak);
    assert!(s.peak_ari >= s.mean_ari && s.peak_nmi >= s.mean_nmi);
}

#[test]
fn repeat_scans_are_identical_and_parallel_matches_serial() {
    let ds = generate_synthetic(Shape::GridBlobs, 100, 4).unwrap();
    let serial = ScanConfig {
        rho_start: 0.2,
        rho_end: 0.9,
        rho_step: 0.1,
        orders: 4,
        base_seed: 99,
        workers: Some(1),
        ..ScanConfig::default()
    };
    let parallel = ScanConfig { workers: Some(3), ..serial.clone() };
    let a = run_scan(&ds, &serial).unwrap();
    assert_eq!(a, run_scan(&ds, &serial).unwrap());
    assert_eq!(report::to_csv(&a), report::to_csv(&run_scan(&ds, &parallel).unwrap()));
}

#[test]
fn growing_the_grid_keeps_existing_cells() {
    let ds = generate_synthetic(Shape::GridBlobs, 60, 8).unwrap();
    let short = ScanConfig { rho_start: 0.5, rho_end: 0.6, rho_step: 0.05, orders: 2, ..ScanConfig::default() };
    let long = ScanConfig { rho_end: 0.8, ..short.clone() };
    let a = run_scan(&ds, &short).unwrap();
    let b = run_scan(&ds, &long).unwrap();
    assert_eq!(a.per_rho[..], b.per_rho[..a.per_rho.len()]);
}

#[test]
fn baseline_engine_scans() {
    let ds = generate_synthetic(Shape::TwoGaussians, 50, 1).unwrap();
    let cfg = ScanConfig { engine: Engine::FuzzyArt, rho_start: 0.4, rho_end: 0.6, rho_step: 0.1, orders: 2, ..ScanConfig::default() };
    assert_eq!(run_scan(&ds, &cfg).unwrap().per_rho.len(), 3);
}

#[test]
fn default_scan_on_bundled_iris_is_fast() {
    let ds = irart_core::preprocess::load_csv(
        &common::data_dir().join("iris.csv"),
        &irart_core::CsvOptions { label: irart_core::LabelColumn::Last, has_header: None },
    )
    .unwrap();
    let start = Instant::now();
    let report = run_scan(&ds, &ScanConfig::default()).unwrap();
    assert_eq!(report.per_rho.len(), 91);
    assert!(start.elapsed().as_secs_f64() < 10.0, "took {:?}", start.elapsed());
}

#[test]
fn report_files_round_trip() {
    let ds = generate_synthetic(Shape::TwoGaussians, 30, 3).unwrap();
    let report = run_scan(&ds, &ScanConfig { rho_start: 0.5, rho_end: 0.9, rho_step: 0.2, orders: 2, ..ScanConfig::default() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    for (name, format) in [("r.csv", ReportFormat::Csv), ("r.json", ReportFormat::Json)] {
        let path = dir.path().join(name);
        report::emit_report(&report, format, &path).unwrap();
        let back = report::read_report(&path).unwrap();
        assert_eq!(back.per_rho.len(), report.per_rho.len());
        assert!((back.summary.mean_ari - report.summary.mean_ari).abs() <= 1e-12 * report.summary.mean_ari.abs().max(1.0));
    }
}

fn close_12(a: f64, b: f64) -> bool {
    a == b || (a - b).abs() <= 5e-12 * a.abs().max(b.abs())
}

proptest! {
    #[test]
    fn csv_and_json_preserve_12_digits(
        vals in prop::collection::vec((0.0f64..1.0, -1.0f64..1.0, 0.0f64..1.0, 1.0f64..500.0), 1..20)
    ) {
        let report = ScanReport::from_records(
            vals.iter().map(|&(rho, a, n, c)| RhoRecord { rho, a_nmi: n, a_ari: a, mean_clusters: c }).collect(),
        );
        let json = report::from_json(&report::to_json(&report).unwrap()).unwrap();
        prop_assert_eq!(&json, &report);
        let csv = report::from_csv(&report::to_csv(&report)).unwrap();
        for (x, y) in csv.per_rho.iter().zip(&report.per_rho) {
            prop_assert!(close_12(x.rho, y.rho) && close_12(x.a_ari, y.a_ari));
            prop_assert!(close_12(x.a_nmi, y.a_nmi) && close_12(x.mean_clusters, y.mean_clusters));
        }
        prop_assert!(close_12(csv.summary.std_ari, report.summary.std_ari));
        let text = report::to_csv(&report);
        prop_assert!(!text.contains("e-") && !text.contains("e+"));
    }
}
