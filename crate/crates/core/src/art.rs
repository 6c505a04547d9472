//! Fuzzy ART primitives: complement-coded inputs, category choice,
//! template matching, prototype learning, and a single presentation pass.

use serde::{Deserialize, Serialize};

use crate::error::{contract, Error, Result};

/// Tolerance for the complement-pair invariant `x_i + x̄_i = 1`.
const COMPLEMENT_TOL: f64 = 1e-12;

/// A complement-coded sample `(x, 1 - x)` of length `2m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InputVector {
    values: Vec<f64>,
}

impl InputVector {
    /// Complement-codes a normalized row. Every value must lie in `[0, 1]`.
    pub fn from_normalized(row: &[f64]) -> Result<Self> {
        if row.is_empty() {
            return Err(contract("cannot complement-code an empty row"));
        }
        if let Some((i, v)) = row
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..=1.0).contains(*v))
        {
            return Err(contract(format!(
                "feature {i} has value {v}, outside [0, 1]"
            )));
        }
        let mut values = Vec::with_capacity(row.len() * 2);
        values.extend_from_slice(row);
        values.extend(row.iter().map(|v| 1.0 - v));
        Ok(Self { values })
    }

    /// Wraps an already complement-coded vector, checking the pairing.
    pub fn from_coded(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || !values.len().is_multiple_of(2) {
            return Err(contract(format!(
                "complement-coded input must have even, non-zero length (got {})",
                values.len()
            )));
        }
        let m = values.len() / 2;
        for i in 0..m {
            let (x, xc) = (values[i], values[m + i]);
            if !(0.0..=1.0).contains(&x) || (x + xc - 1.0).abs() > COMPLEMENT_TOL {
                return Err(contract(format!(
                    "components {i} and {} ({x}, {xc}) are not complementary",
                    m + i
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Number of original features `m`.
    pub fn features(&self) -> usize {
        self.values.len() / 2
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn l1_norm(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// Stable cluster identifier; never reused within a model's lifetime.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ClusterId(pub u64);

impl std::fmt::Display for ClusterId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// One category: a weight hyper-rectangle and its own vigilance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    pub id: ClusterId,
    pub weight: Vec<f64>,
    pub vigilance: f64,
}

/// Ordered category field. Order is creation order, which is also the
/// tie-break order in category choice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    clusters: Vec<Cluster>,
    dimension: usize,
    next_id: u64,
}

impl ClusterModel {
    /// Empty model for inputs with `dimension` original features.
    pub fn new(dimension: usize) -> Self {
        Self {
            clusters: Vec::new(),
            dimension,
            next_id: 0,
        }
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn get(&self, id: ClusterId) -> Option<&Cluster> {
        self.clusters.iter().find(|c| c.id == id)
    }

    pub fn contains(&self, id: ClusterId) -> bool {
        self.get(id).is_some()
    }

    /// Appends a cluster coded from `input` and returns its fresh id.
    pub fn create(&mut self, input: &InputVector, vigilance: f64) -> Result<ClusterId> {
        self.check_input(input)?;
        let id = ClusterId(self.next_id);
        self.next_id += 1;
        self.clusters.push(Cluster {
            id,
            weight: input.values.clone(),
            vigilance,
        });
        Ok(id)
    }

    /// Drops every cluster for which `remove` returns true, keeping order.
    pub fn remove_where(&mut self, mut remove: impl FnMut(&Cluster) -> bool) {
        self.clusters.retain(|c| !remove(c));
    }

    /// Mutable access to vigilance values, used by vigilance expansion.
    pub fn vigilances_mut(&mut self) -> impl Iterator<Item = &mut f64> {
        self.clusters.iter_mut().map(|c| &mut c.vigilance)
    }

    fn check_input(&self, input: &InputVector) -> Result<()> {
        if input.len() != 2 * self.dimension {
            return Err(contract(format!(
                "input has length {} but the model expects {}",
                input.len(),
                2 * self.dimension
            )));
        }
        Ok(())
    }
}

/// Fuzzy ART hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HyperParams {
    /// Choice parameter, `> 0`.
    pub alpha: f64,
    /// Learning rate in `[0, 1]`.
    pub beta: f64,
    /// Initial vigilance in `[0, 1]`.
    pub rho0: f64,
    /// Vigilance expansion rate in `[0, 1)`.
    pub tau: f64,
    /// Maximum number of full passes, `>= 1`.
    pub t_max: usize,
}

impl Default for HyperParams {
    fn default() -> Self {
        Self {
            alpha: 0.001,
            beta: 0.5,
            rho0: 0.5,
            tau: 0.01,
            t_max: 50,
        }
    }
}

impl HyperParams {
    pub fn new(alpha: f64, beta: f64, rho0: f64, tau: f64, t_max: usize) -> Result<Self> {
        let params = Self {
            alpha,
            beta,
            rho0,
            tau,
            t_max,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn with_rho0(self, rho0: f64) -> Result<Self> {
        Self::new(self.alpha, self.beta, rho0, self.tau, self.t_max)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return Err(Error::Config(format!("alpha must be > 0, got {}", self.alpha)));
        }
        if !(0.0..=1.0).contains(&self.beta) {
            return Err(Error::Config(format!("beta must be in [0, 1], got {}", self.beta)));
        }
        if !(0.0..=1.0).contains(&self.rho0) {
            return Err(Error::Config(format!("rho0 must be in [0, 1], got {}", self.rho0)));
        }
        if !(0.0..1.0).contains(&self.tau) {
            return Err(Error::Config(format!("tau must be in [0, 1), got {}", self.tau)));
        }
        if self.t_max == 0 {
            return Err(Error::Config("t_max must be at least 1".into()));
        }
        Ok(())
    }
}

/// Per-sample cluster labels for one pass. `None` marks a sample left
/// unassigned after its cluster was deleted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    entries: Vec<Option<ClusterId>>,
}

impl Assignment {
    pub fn unassigned(n: usize) -> Self {
        Self {
            entries: vec![None; n],
        }
    }

    pub fn from_ids(ids: impl IntoIterator<Item = ClusterId>) -> Self {
        Self {
            entries: ids.into_iter().map(Some).collect(),
        }
    }

    pub fn entries(&self) -> &[Option<ClusterId>] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, index: usize) -> Option<ClusterId> {
        self.entries.get(index).copied().flatten()
    }

    pub fn set(&mut self, index: usize, id: Option<ClusterId>) {
        self.entries[index] = id;
    }

    pub fn is_complete(&self) -> bool {
        self.entries.iter().all(Option::is_some)
    }

    pub fn unassigned_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_none()).count()
    }

    /// Cluster ids of a complete assignment.
    pub fn ids(&self) -> Result<Vec<ClusterId>> {
        self.entries
            .iter()
            .enumerate()
            .map(|(i, e)| e.ok_or_else(|| contract(format!("sample {i} is unassigned"))))
            .collect()
    }

    /// Number of positions whose label differs between `self` and `other`.
    pub fn changes_from(&self, other: &Assignment) -> usize {
        self.entries
            .iter()
            .zip(&other.entries)
            .filter(|(a, b)| a != b)
            .count()
    }
}

fn check_lengths(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(contract(format!("length mismatch: {a} vs {b}")));
    }
    Ok(())
}

#[inline]
fn fuzzy_and_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.min(*y)).sum()
}

/// Category choice `|I ∧ w| / (α + |w|)`.
pub fn choice_function(input: &InputVector, cluster: &Cluster, alpha: f64) -> Result<f64> {
    check_lengths(input.len(), cluster.weight.len())?;
    let w_norm: f64 = cluster.weight.iter().sum();
    Ok(fuzzy_and_norm(&input.values, &cluster.weight) / (alpha + w_norm))
}

/// Template match `|I ∧ w| / |I|`.
pub fn match_function(input: &InputVector, cluster: &Cluster) -> Result<f64> {
    if input.is_empty() {
        return Err(contract("match function needs a non-empty input"));
    }
    check_lengths(input.len(), cluster.weight.len())?;
    Ok(fuzzy_and_norm(&input.values, &cluster.weight) / input.l1_norm())
}

/// Learning rule `β(I ∧ w) + (1 − β)w`.
pub fn prototype_learning(input: &InputVector, cluster: &Cluster, beta: f64) -> Result<Vec<f64>> {
    check_lengths(input.len(), cluster.weight.len())?;
    Ok(learn(&input.values, &cluster.weight, beta))
}

/// Each component stays within `[min(i, w), w]`; the clamp absorbs rounding
/// so weights never increase.
#[inline]
fn learn(input: &[f64], weight: &[f64], beta: f64) -> Vec<f64> {
    input
        .iter()
        .zip(weight)
        .map(|(i, w)| (beta * i.min(*w) + (1.0 - beta) * w).min(*w))
        .collect()
}

/// Presents one sample: choose, match, then resonate or create.
///
/// Candidates are visited in descending choice value, earliest cluster
/// first on ties. A candidate that fails its own vigilance is excluded for
/// the rest of this sample. When every candidate fails, a new cluster is
/// coded from the input with vigilance `rho0`.
pub fn present_sample(
    model: &mut ClusterModel,
    input: &InputVector,
    params: &HyperParams,
) -> Result<ClusterId> {
    model.check_input(input)?;
    let input_norm = input.l1_norm();

    // (choice, overlap, index)
    let mut ranked: Vec<(f64, f64, usize)> = model
        .clusters
        .iter()
        .enumerate()
        .map(|(j, c)| {
            let overlap = fuzzy_and_norm(&input.values, &c.weight);
            let w_norm: f64 = c.weight.iter().sum();
            (overlap / (params.alpha + w_norm), overlap, j)
        })
        .collect();
    // Stable sort keeps creation order among equal choice values.
    ranked.sort_by(|a, b| b.0.total_cmp(&a.0));

    for &(_, overlap, j) in &ranked {
        let cluster = &mut model.clusters[j];
        if overlap / input_norm >= cluster.vigilance {
            cluster.weight = learn(&input.values, &cluster.weight, params.beta);
            return Ok(cluster.id);
        }
    }
    model.create(input, params.rho0)
}

/// Presents every sample once, in order.
pub fn single_pass(
    model: &mut ClusterModel,
    dataset: &[InputVector],
    params: &HyperParams,
) -> Result<Assignment> {
    let ids = dataset
        .iter()
        .map(|input| present_sample(model, input, params))
        .collect::<Result<Vec<_>>>()?;
    Ok(Assignment::from_ids(ids))
}
