//! Dataset loading, Min-Max normalization, and complement coding.

use std::collections::HashMap;
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::art::InputVector;
use crate::error::{contract, Error, Result};

/// Tabular samples with optional ground-truth labels.
#[derive(Debug, Clone, PartialEq)]
pub struct RawDataset {
    rows: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
    feature_names: Option<Vec<String>>,
}

impl RawDataset {
    pub fn new(rows: Vec<Vec<f64>>, labels: Option<Vec<String>>) -> Result<Self> {
        let first = rows
            .first()
            .ok_or_else(|| contract("dataset must contain at least one sample"))?;
        let m = first.len();
        if m == 0 {
            return Err(contract("dataset must have at least one feature"));
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != m {
                return Err(Error::Data {
                    row: r + 1,
                    column: row.len().min(m) + 1,
                    message: format!("expected {m} features, found {}", row.len()),
                });
            }
            if let Some(c) = row.iter().position(|v| !v.is_finite()) {
                return Err(Error::Data {
                    row: r + 1,
                    column: c + 1,
                    message: "value is not finite".into(),
                });
            }
        }
        if let Some(l) = &labels {
            if l.len() != rows.len() {
                return Err(contract(format!(
                    "{} labels for {} samples",
                    l.len(),
                    rows.len()
                )));
            }
        }
        Ok(Self {
            rows,
            labels,
            feature_names: None,
        })
    }

    pub fn with_feature_names(mut self, names: Vec<String>) -> Self {
        self.feature_names = Some(names);
        self
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn feature_names(&self) -> Option<&[String]> {
        self.feature_names.as_deref()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn features(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    /// Labels mapped to dense class indices in order of first appearance.
    pub fn class_ids(&self) -> Option<Vec<usize>> {
        let labels = self.labels.as_ref()?;
        let mut index = HashMap::new();
        Some(
            labels
                .iter()
                .map(|l| {
                    let next = index.len();
                    *index.entry(l.as_str()).or_insert(next)
                })
                .collect(),
        )
    }

    /// Reorders samples (and labels in lockstep) by `order`.
    pub fn reordered(&self, order: &[usize]) -> Self {
        Self {
            rows: order.iter().map(|&i| self.rows[i].clone()).collect(),
            labels: self
                .labels
                .as_ref()
                .map(|l| order.iter().map(|&i| l[i].clone()).collect()),
            feature_names: self.feature_names.clone(),
        }
    }

    /// Normalizes and complement-codes every row.
    pub fn to_inputs(&self) -> Result<Vec<InputVector>> {
        minmax_normalize(self)?
            .rows
            .iter()
            .map(|r| complement_code(r))
            .collect()
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let file = File::create(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        self.write_csv_to(file)
    }

    pub fn write_csv_to<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let mut header: Vec<String> = match &self.feature_names {
            Some(n) => n.clone(),
            None => (0..self.features()).map(|i| format!("x{i}")).collect(),
        };
        if self.labels.is_some() {
            header.push("label".into());
        }
        w.write_record(&header)?;
        for (i, row) in self.rows.iter().enumerate() {
            let mut rec: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            if let Some(l) = &self.labels {
                rec.push(l[i].clone());
            }
            w.write_record(&rec)?;
        }
        w.flush().map_err(|source| Error::Io {
            path: "<csv>".into(),
            source,
        })?;
        Ok(())
    }
}

/// Column-wise Min-Max scaling into `[0, 1]`. Constant columns map to 0.
pub fn minmax_normalize(raw: &RawDataset) -> Result<RawDataset> {
    if raw.is_empty() || raw.features() == 0 {
        return Err(contract("cannot normalize an empty dataset"));
    }
    let m = raw.features();
    let mut lo = vec![f64::INFINITY; m];
    let mut hi = vec![f64::NEG_INFINITY; m];
    for row in &raw.rows {
        for (j, v) in row.iter().enumerate() {
            lo[j] = lo[j].min(*v);
            hi[j] = hi[j].max(*v);
        }
    }
    let rows = raw
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .map(|(j, v)| {
                    let span = hi[j] - lo[j];
                    if span > 0.0 {
                        ((v - lo[j]) / span).clamp(0.0, 1.0)
                    } else {
                        0.0
                    }
                })
                .collect()
        })
        .collect();
    Ok(RawDataset {
        rows,
        labels: raw.labels.clone(),
        feature_names: raw.feature_names.clone(),
    })
}

/// `(x, 1 - x)` for a normalized row.
pub fn complement_code(row: &[f64]) -> Result<InputVector> {
    InputVector::from_normalized(row)
}

/// Where the ground-truth label lives in a CSV file.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum LabelColumn {
    /// Every column is a feature.
    #[default]
    None,
    Last,
    /// Zero-based column index.
    Index(usize),
    /// Header name; requires a header line.
    Name(String),
}

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    pub label: LabelColumn,
    /// `None` detects a header from the first line: it is a header when any
    /// feature field fails to parse as a number.
    pub has_header: Option<bool>,
}

pub fn load_csv(path: &Path, options: &CsvOptions) -> Result<RawDataset> {
    let mut text = String::new();
    File::open(path)
        .and_then(|mut f| f.read_to_string(&mut text))
        .map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
    parse_csv(&text, options)
}

pub fn parse_csv(text: &str, options: &CsvOptions) -> Result<RawDataset> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let records = reader
        .records()
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let records: Vec<_> = records
        .into_iter()
        .filter(|r| !(r.len() == 1 && r[0].is_empty()))
        .collect();
    let first = records.first().ok_or(Error::Data {
        row: 1,
        column: 1,
        message: "file contains no rows".into(),
    })?;
    let width = first.len();

    let label_at = |header: Option<&csv::StringRecord>| -> Result<Option<usize>> {
        Ok(match &options.label {
            LabelColumn::None => None,
            LabelColumn::Last => Some(width - 1),
            LabelColumn::Index(i) if *i < width => Some(*i),
            LabelColumn::Index(i) => {
                return Err(Error::Config(format!(
                    "label column {i} out of range for {width} columns"
                )))
            }
            LabelColumn::Name(name) => {
                let header = header.ok_or_else(|| {
                    Error::Config(format!("label column '{name}' requested but file has no header"))
                })?;
                Some(header.iter().position(|h| h == name).ok_or_else(|| {
                    Error::Config(format!("no column named '{name}' in header"))
                })?)
            }
        })
    };

    let has_header = match (options.has_header, &options.label) {
        (Some(h), _) => h,
        (None, LabelColumn::Name(_)) => true,
        (None, other) => {
            let skip = label_at_plain(other, width);
            first
                .iter()
                .enumerate()
                .any(|(c, f)| Some(c) != skip && f.parse::<f64>().is_err())
        }
    };
    let label = label_at(has_header.then_some(first))?;
    parse_body(&records, has_header, label)
}

fn label_at_plain(label: &LabelColumn, width: usize) -> Option<usize> {
    match label {
        LabelColumn::Last => Some(width - 1),
        LabelColumn::Index(i) => Some(*i),
        _ => None,
    }
}

fn parse_body(records: &[csv::StringRecord], has_header: bool, label: Option<usize>) -> Result<RawDataset> {
    let width = records[0].len();
    let body = if has_header { &records[1..] } else { records };
    let line_offset = if has_header { 2 } else { 1 };
    if body.is_empty() {
        return Err(Error::Data {
            row: line_offset,
            column: 1,
            message: "file contains a header but no samples".into(),
        });
    }
    let mut rows = Vec::with_capacity(body.len());
    let mut labels = label.map(|_| Vec::with_capacity(body.len()));
    for (r, rec) in body.iter().enumerate() {
        let row_no = r + line_offset;
        if rec.len() != width {
            return Err(Error::Data {
                row: row_no,
                column: rec.len().min(width) + 1,
                message: format!("expected {width} columns, found {}", rec.len()),
            });
        }
        let mut row = Vec::with_capacity(width);
        for (c, field) in rec.iter().enumerate() {
            if Some(c) == label {
                if field.is_empty() {
                    return Err(Error::Data {
                        row: row_no,
                        column: c + 1,
                        message: "missing label".into(),
                    });
                }
                if let Some(l) = labels.as_mut() {
                    l.push(field.to_string());
                }
                continue;
            }
            if field.is_empty() {
                return Err(Error::Data {
                    row: row_no,
                    column: c + 1,
                    message: "missing value".into(),
                });
            }
            let v: f64 = field.parse().map_err(|_| Error::Data {
                row: row_no,
                column: c + 1,
                message: format!("'{field}' is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Data {
                    row: row_no,
                    column: c + 1,
                    message: format!("'{field}' is not finite"),
                });
            }
            row.push(v);
        }
        rows.push(row);
    }
    let names = has_header.then(|| {
        records[0]
            .iter()
            .enumerate()
            .filter(|(c, _)| Some(*c) != label)
            .map(|(_, h)| h.to_string())
            .collect::<Vec<_>>()
    });
    let ds = RawDataset::new(rows, labels)?;
    Ok(match names {
        Some(n) => ds.with_feature_names(n),
        None => ds,
    })
}
