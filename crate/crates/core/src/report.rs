//! Scan report serialization.
//!
//! CSV layout: a `rho,aNMI,aARI,mean_clusters` table, a blank line, then a
//! summary block with `statistic,NMI,ARI` rows for `peak`, `mean`, `std`.
//! Numbers are written with 12 significant digits and no exponent.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::scan::{RhoRecord, ScanReport, ScanSummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl std::str::FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(format!("unknown report format '{s}'; expected 'csv' or 'json'")),
        }
    }
}

/// Rounds to 12 significant digits and prints the shortest decimal form.
pub fn format_number(v: f64) -> String {
    let rounded: f64 = format!("{v:.11e}").parse().unwrap_or(v);
    let s = rounded.to_string();
    if s == "-0" {
        "0".into()
    } else {
        s
    }
}

pub fn to_csv(report: &ScanReport) -> String {
    let mut out = String::from("rho,aNMI,aARI,mean_clusters\n");
    for r in &report.per_rho {
        out.push_str(&format!(
            "{},{},{},{}\n",
            format_number(r.rho),
            format_number(r.a_nmi),
            format_number(r.a_ari),
            format_number(r.mean_clusters)
        ));
    }
    let s = &report.summary;
    out.push('\n');
    out.push_str("statistic,NMI,ARI\n");
    for (name, nmi, ari) in [
        ("peak", s.peak_nmi, s.peak_ari),
        ("mean", s.mean_nmi, s.mean_ari),
        ("std", s.std_nmi, s.std_ari),
    ] {
        out.push_str(&format!("{name},{},{}\n", format_number(nmi), format_number(ari)));
    }
    out
}

fn bad(line: usize, message: impl Into<String>) -> Error {
    Error::Data {
        row: line,
        column: 1,
        message: message.into(),
    }
}

fn numbers(line: usize, fields: &[&str]) -> Result<Vec<f64>> {
    fields
        .iter()
        .map(|f| f.trim().parse().map_err(|_| bad(line, format!("'{f}' is not a number"))))
        .collect()
}

pub fn from_csv(text: &str) -> Result<ScanReport> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    match lines.next() {
        Some((_, "rho,aNMI,aARI,mean_clusters")) => {}
        _ => return Err(bad(1, "missing report header")),
    }
    let mut per_rho = Vec::new();
    for (no, line) in lines.by_ref() {
        if line.trim().is_empty() {
            break;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 4 {
            return Err(bad(no, "expected 4 columns"));
        }
        let v = numbers(no, &f)?;
        per_rho.push(RhoRecord {
            rho: v[0],
            a_nmi: v[1],
            a_ari: v[2],
            mean_clusters: v[3],
        });
    }
    match lines.next() {
        Some((_, "statistic,NMI,ARI")) => {}
        other => return Err(bad(other.map_or(0, |(n, _)| n), "missing summary header")),
    }
    let mut stat = |name: &str| -> Result<(f64, f64)> {
        let (no, line) = lines.next().ok_or_else(|| bad(0, format!("missing '{name}' row")))?;
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 3 || f[0] != name {
            return Err(bad(no, format!("expected '{name}' summary row")));
        }
        let v = numbers(no, &f[1..])?;
        Ok((v[0], v[1]))
    };
    let (peak_nmi, peak_ari) = stat("peak")?;
    let (mean_nmi, mean_ari) = stat("mean")?;
    let (std_nmi, std_ari) = stat("std")?;
    Ok(ScanReport {
        per_rho,
        summary: ScanSummary {
            peak_nmi,
            peak_ari,
            mean_nmi,
            mean_ari,
            std_nmi,
            std_ari,
        },
    })
}

pub fn to_json(report: &ScanReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(report)?)
}

pub fn from_json(text: &str) -> Result<ScanReport> {
    Ok(serde_json::from_str(text)?)
}

pub fn render(report: &ScanReport, format: ReportFormat) -> Result<String> {
    match format {
        ReportFormat::Csv => Ok(to_csv(report)),
        ReportFormat::Json => to_json(report),
    }
}

pub fn emit_report(report: &ScanReport, format: ReportFormat, path: &Path) -> Result<()> {
    let text = render(report, format)?;
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_report(path: &Path) -> Result<ScanReport> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    if text.trim_start().starts_with('{') {
        from_json(&text)
    } else {
        from_csv(&text)
    }
}
