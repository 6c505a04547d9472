//! Vigilance scans: for every initial vigilance on a grid, cluster several
//! seeded permutations of a labeled dataset and average NMI / ARI.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::art::{HyperParams, InputVector};
use crate::error::{Error, Result};
use crate::irart::{Engine, RunTrace};
use crate::metrics;
use crate::preprocess::RawDataset;

const GRID_EPS: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub rho_start: f64,
    pub rho_end: f64,
    pub rho_step: f64,
    /// Random presentation orders per grid point.
    pub orders: usize,
    pub base_seed: u64,
    /// Everything but `rho0`, which the grid supplies.
    pub params: HyperParams,
    pub engine: Engine,
    /// Worker threads; `None` uses rayon's global pool, `Some(1)` runs
    /// serially on the calling thread.
    pub workers: Option<usize>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            rho_start: 0.05,
            rho_end: 0.95,
            rho_step: 0.01,
            orders: 10,
            base_seed: 0,
            params: HyperParams::default(),
            engine: Engine::IrArt,
            workers: None,
        }
    }
}

impl ScanConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rho_step.is_finite() && self.rho_step > 0.0) {
            return Err(Error::Config(format!("rho step must be > 0, got {}", self.rho_step)));
        }
        if self.rho_start.is_nan() || self.rho_end.is_nan() || self.rho_start > self.rho_end {
            return Err(Error::Config(format!(
                "rho start {} exceeds rho end {}",
                self.rho_start, self.rho_end
            )));
        }
        if self.rho_start < 0.0 || self.rho_end > 1.0 {
            return Err(Error::Config(format!(
                "rho grid [{}, {}] must lie within [0, 1]",
                self.rho_start, self.rho_end
            )));
        }
        if self.orders == 0 {
            return Err(Error::Config("orders must be at least 1".into()));
        }
        if self.workers == Some(0) {
            return Err(Error::Config("workers must be at least 1".into()));
        }
        self.params.validate()
    }

    /// Grid points `start + i*step`; `end` is included when it lies within
    /// 1e-9 of a step multiple.
    pub fn grid(&self) -> Vec<f64> {
        let span = (self.rho_end - self.rho_start) / self.rho_step;
        let count = (span + GRID_EPS).floor() as usize + 1;
        (0..count)
            .map(|i| {
                let rho = self.rho_start + i as f64 * self.rho_step;
                // Strip accumulated representation noise (0.060000000000000005).
                ((rho * 1e12).round() / 1e12).min(1.0)
            })
            .collect()
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one grid cell. Depends only on its own coordinates, so growing
/// the grid leaves other cells' orders unchanged.
pub fn cell_seed(base_seed: u64, rho_index: usize, order_index: usize) -> u64 {
    splitmix64(splitmix64(splitmix64(base_seed) ^ rho_index as u64) ^ order_index as u64)
}

/// Uniform random permutation of `0..n` from a ChaCha8 stream.
pub fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    order
}

/// Samples and labels reordered by [`permutation`].
pub fn permute(dataset: &RawDataset, seed: u64) -> RawDataset {
    dataset.reordered(&permutation(dataset.len(), seed))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoRecord {
    pub rho: f64,
    #[serde(rename = "aNMI")]
    pub a_nmi: f64,
    #[serde(rename = "aARI")]
    pub a_ari: f64,
    pub mean_clusters: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSummary {
    #[serde(rename = "peak_aNMI")]
    pub peak_nmi: f64,
    #[serde(rename = "peak_aARI")]
    pub peak_ari: f64,
    #[serde(rename = "mNMI")]
    pub mean_nmi: f64,
    #[serde(rename = "mARI")]
    pub mean_ari: f64,
    #[serde(rename = "sNMI")]
    pub std_nmi: f64,
    #[serde(rename = "sARI")]
    pub std_ari: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub per_rho: Vec<RhoRecord>,
    pub summary: ScanSummary,
}

/// Max, mean and population standard deviation.
fn peak_mean_std(values: &[f64]) -> (f64, f64, f64) {
    let n = values.len() as f64;
    let peak = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (peak, mean, var.sqrt())
}

impl ScanSummary {
    pub fn from_records(records: &[RhoRecord]) -> Self {
        let nmi: Vec<f64> = records.iter().map(|r| r.a_nmi).collect();
        let ari: Vec<f64> = records.iter().map(|r| r.a_ari).collect();
        let (peak_nmi, mean_nmi, std_nmi) = peak_mean_std(&nmi);
        let (peak_ari, mean_ari, std_ari) = peak_mean_std(&ari);
        Self {
            peak_nmi,
            peak_ari,
            mean_nmi,
            mean_ari,
            std_nmi,
            std_ari,
        }
    }
}

impl ScanReport {
    pub fn from_records(per_rho: Vec<RhoRecord>) -> Self {
        let summary = ScanSummary::from_records(&per_rho);
        Self { per_rho, summary }
    }
}

/// Outcome of one `(rho, order)` cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CellResult {
    pub rho_index: usize,
    pub order_index: usize,
    pub seed: u64,
    pub nmi: f64,
    pub ari: f64,
    pub clusters: usize,
    pub iterations: usize,
    pub trace: Option<RunTrace>,
}

struct Prepared {
    inputs: Vec<InputVector>,
    truth: Vec<usize>,
}

fn prepare(dataset: &RawDataset) -> Result<Prepared> {
    let truth = dataset.class_ids().ok_or_else(|| {
        Error::Config("scan needs a labeled dataset: NMI and ARI compare against ground truth".into())
    })?;
    // Min-Max statistics do not depend on order, so code once and permute
    // the coded vectors per cell.
    Ok(Prepared {
        inputs: dataset.to_inputs()?,
        truth,
    })
}

fn run_cell(
    prepared: &Prepared,
    config: &ScanConfig,
    grid: &[f64],
    rho_index: usize,
    order_index: usize,
    keep_trace: bool,
) -> Result<CellResult> {
    let seed = cell_seed(config.base_seed, rho_index, order_index);
    let order = permutation(prepared.inputs.len(), seed);
    let inputs: Vec<InputVector> = order.iter().map(|&i| prepared.inputs[i].clone()).collect();
    let truth: Vec<usize> = order.iter().map(|&i| prepared.truth[i]).collect();
    let params = config.params.with_rho0(grid[rho_index])?;
    let run = config.engine.run(&inputs, &params)?;
    let (nmi, ari) = metrics::score(&truth, &run.assignment)?;
    Ok(CellResult {
        rho_index,
        order_index,
        seed,
        nmi,
        ari,
        clusters: run.model.len(),
        iterations: run.trace.iterations(),
        trace: keep_trace.then_some(run.trace),
    })
}

fn run_cells(dataset: &RawDataset, config: &ScanConfig, keep_traces: bool) -> Result<(Vec<f64>, Vec<CellResult>)> {
    config.validate()?;
    let prepared = prepare(dataset)?;
    if prepared.inputs.len() < 2 {
        return Err(Error::Config("scan needs at least 2 samples for ARI".into()));
    }
    let grid = config.grid();
    let cells: Vec<(usize, usize)> = (0..grid.len())
        .flat_map(|r| (0..config.orders).map(move |o| (r, o)))
        .collect();
    let work = |&(r, o): &(usize, usize)| run_cell(&prepared, config, &grid, r, o, keep_traces);

    let results: Result<Vec<CellResult>> = match config.workers {
        Some(1) => cells.iter().map(work).collect(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))?
            .install(|| cells.par_iter().map(work).collect()),
        None => cells.par_iter().map(work).collect(),
    };
    Ok((grid, results?))
}

fn aggregate(grid: &[f64], orders: usize, cells: &[CellResult]) -> ScanReport {
    // Cells arrive in (rho, order) order regardless of which thread ran them.
    let per_rho = grid
        .iter()
        .enumerate()
        .map(|(r, &rho)| {
            let chunk = &cells[r * orders..(r + 1) * orders];
            let k = orders as f64;
            RhoRecord {
                rho,
                a_nmi: chunk.iter().map(|c| c.nmi).sum::<f64>() / k,
                a_ari: chunk.iter().map(|c| c.ari).sum::<f64>() / k,
                mean_clusters: chunk.iter().map(|c| c.clusters as f64).sum::<f64>() / k,
            }
        })
        .collect();
    ScanReport::from_records(per_rho)
}

/// Runs the full grid and aggregates per-rho averages and summaries.
pub fn run_scan(dataset: &RawDataset, config: &ScanConfig) -> Result<ScanReport> {
    let (grid, cells) = run_cells(dataset, config, false)?;
    Ok(aggregate(&grid, config.orders, &cells))
}

/// Like [`run_scan`], also returning every cell with its run trace.
pub fn run_scan_traced(dataset: &RawDataset, config: &ScanConfig) -> Result<(ScanReport, Vec<CellResult>)> {
    let (grid, cells) = run_cells(dataset, config, true)?;
    Ok((aggregate(&grid, config.orders, &cells), cells))
}
