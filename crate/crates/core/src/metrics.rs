//! External cluster validity indices: adjusted Rand index and normalized
//! mutual information (arithmetic-mean normalization, natural log).

use std::collections::HashMap;
use std::hash::Hash;

use crate::art::Assignment;
use crate::error::{contract, Result};

/// Class-by-cluster co-occurrence counts.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ContingencyTable {
    counts: Vec<Vec<u64>>,
    row_sums: Vec<u64>,
    col_sums: Vec<u64>,
    n: u64,
}

impl ContingencyTable {
    /// Tallies two equal-length label sequences. Rows follow the first
    /// appearance order of `truth`, columns that of `predicted`.
    pub fn from_labels<A, B>(truth: &[A], predicted: &[B]) -> Result<Self>
    where
        A: Eq + Hash,
        B: Eq + Hash,
    {
        if truth.len() != predicted.len() {
            return Err(contract(format!(
                "{} labels vs {} predictions",
                truth.len(),
                predicted.len()
            )));
        }
        let mut rows: HashMap<&A, usize> = HashMap::new();
        let mut cols: HashMap<&B, usize> = HashMap::new();
        let mut counts: Vec<Vec<u64>> = Vec::new();
        for (t, p) in truth.iter().zip(predicted) {
            let next = rows.len();
            let i = *rows.entry(t).or_insert(next);
            let next = cols.len();
            let j = *cols.entry(p).or_insert(next);
            if i == counts.len() {
                counts.push(Vec::new());
            }
            let row = &mut counts[i];
            if row.len() <= j {
                row.resize(j + 1, 0);
            }
            row[j] += 1;
        }
        let width = cols.len();
        for row in &mut counts {
            row.resize(width, 0);
        }
        Ok(Self::from_counts(counts))
    }

    pub fn from_counts(counts: Vec<Vec<u64>>) -> Self {
        let width = counts.first().map_or(0, Vec::len);
        let row_sums: Vec<u64> = counts.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<u64> = (0..width).map(|j| counts.iter().map(|r| r[j]).sum()).collect();
        let n = row_sums.iter().sum();
        Self {
            counts,
            row_sums,
            col_sums,
            n,
        }
    }

    pub fn counts(&self) -> &[Vec<u64>] {
        &self.counts
    }

    pub fn row_sums(&self) -> &[u64] {
        &self.row_sums
    }

    pub fn col_sums(&self) -> &[u64] {
        &self.col_sums
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// True when every class maps onto exactly one cluster and vice versa.
    fn is_bijective(&self) -> bool {
        let nonzero_rows = self
            .counts
            .iter()
            .all(|r| r.iter().filter(|&&c| c > 0).count() == 1);
        let nonzero_cols =
            (0..self.col_sums.len()).all(|j| self.counts.iter().filter(|r| r[j] > 0).count() == 1);
        nonzero_rows && nonzero_cols
    }
}

/// Contingency table of ground-truth classes against a complete assignment.
pub fn build_contingency(truth: &[usize], predicted: &Assignment) -> Result<ContingencyTable> {
    let ids = predicted.ids()?;
    ContingencyTable::from_labels(truth, &ids)
}

fn pairs(k: u64) -> u128 {
    let k = k as u128;
    k * k.saturating_sub(1) / 2
}

/// Hubert–Arabie adjusted Rand index.
///
/// Evaluated in exact integer arithmetic up to the final division, so the
/// result is exactly 1.0 for identical partitions. A zero denominator only
/// occurs when both partitions are identical and trivial; that case is 1.0.
pub fn adjusted_rand_index(table: &ContingencyTable) -> Result<f64> {
    if table.n < 2 {
        return Err(contract(format!(
            "adjusted Rand index needs at least 2 samples, got {}",
            table.n
        )));
    }
    let index: u128 = table.counts.iter().flatten().map(|&c| pairs(c)).sum();
    let sum_rows: u128 = table.row_sums.iter().map(|&a| pairs(a)).sum();
    let sum_cols: u128 = table.col_sums.iter().map(|&b| pairs(b)).sum();
    let total = pairs(table.n);

    // ARI = (index - E) / (max - E) with E = rows*cols/total, max = (rows+cols)/2;
    // multiplying through by 2*total keeps everything integral.
    let num = 2 * (index as i128 * total as i128 - (sum_rows * sum_cols) as i128);
    let den = ((sum_rows + sum_cols) * total) as i128 - 2 * (sum_rows * sum_cols) as i128;
    if den == 0 {
        return Ok(1.0);
    }
    Ok(num as f64 / den as f64)
}

fn entropy(marginals: &[u64], n: f64) -> f64 {
    marginals
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Mutual information normalized by the arithmetic mean of the two
/// entropies.
///
/// Both partitions trivial gives 1.0; exactly one trivial gives 0.0.
pub fn normalized_mutual_info(table: &ContingencyTable) -> f64 {
    if table.n == 0 {
        return 1.0;
    }
    let n = table.n as f64;
    let h_true = entropy(&table.row_sums, n);
    let h_pred = entropy(&table.col_sums, n);
    match (h_true == 0.0, h_pred == 0.0) {
        (true, true) => return 1.0,
        (true, false) | (false, true) => return 0.0,
        _ => {}
    }
    if table.is_bijective() {
        return 1.0;
    }
    let mut mi = 0.0;
    for (i, row) in table.counts.iter().enumerate() {
        for (j, &c) in row.iter().enumerate() {
            if c == 0 {
                continue;
            }
            let c = c as f64;
            let a = table.row_sums[i] as f64;
            let b = table.col_sums[j] as f64;
            mi += c / n * (n * c / (a * b)).ln();
        }
    }
    (mi / ((h_true + h_pred) / 2.0)).clamp(0.0, 1.0)
}

/// `(NMI, ARI)` of a complete assignment against class labels.
pub fn score(truth: &[usize], predicted: &Assignment) -> Result<(f64, f64)> {
    let table = build_contingency(truth, predicted)?;
    Ok((normalized_mutual_info(&table), adjusted_rand_index(&table)?))
}
