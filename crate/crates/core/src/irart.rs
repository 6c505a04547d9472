//! Iterative refinement engine.
//!
//! Iteration 1 is a plain Fuzzy ART pass. Each later iteration runs another
//! full pass, checks for termination, and otherwise prunes clusters that
//! lost samples since the previous pass and widens the vigilance region of
//! every survivor by a factor `1 - tau`.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::art::{single_pass, Assignment, ClusterId, ClusterModel, HyperParams, InputVector};
use crate::error::{contract, Result};

/// Which clustering loop to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Engine {
    /// Repeated passes with stability detection, deletion, and expansion.
    #[serde(rename = "ir-art")]
    IrArt,
    /// Repeated plain Fuzzy ART passes with the same termination test.
    #[serde(rename = "fuzzy-art")]
    FuzzyArt,
}

impl Engine {
    pub fn name(self) -> &'static str {
        match self {
            Engine::IrArt => "ir-art",
            Engine::FuzzyArt => "fuzzy-art",
        }
    }

    pub fn run(self, dataset: &[InputVector], params: &HyperParams) -> Result<RunResult> {
        self.run_traced(dataset, params, TraceLevel::Iterations)
    }

    pub fn run_traced(
        self,
        dataset: &[InputVector],
        params: &HyperParams,
        level: TraceLevel,
    ) -> Result<RunResult> {
        drive(dataset, params, self == Engine::IrArt, level)
    }
}

impl std::fmt::Display for Engine {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Engine {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "ir-art" => Ok(Engine::IrArt),
            "fuzzy-art" => Ok(Engine::FuzzyArt),
            "cm-art" | "am-art" | "hi-art" | "sa-art" => Err(format!(
                "engine '{s}' is a prior-work baseline and is not implemented; use 'ir-art' or 'fuzzy-art'"
            )),
            _ => Err(format!("unknown engine '{s}'; expected 'ir-art' or 'fuzzy-art'")),
        }
    }
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Termination {
    MaxIter,
    Converged,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Termination::MaxIter => "MAX_ITER",
            Termination::Converged => "CONVERGED",
        })
    }
}

/// How much detail a run records.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TraceLevel {
    /// Per-iteration cluster summaries.
    #[default]
    Iterations,
    /// Also keep the end-of-iteration per-sample assignment.
    Samples,
}

/// Snapshot taken at the end of one iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub t: usize,
    /// Clusters in the model right after the pass.
    pub clusters_before_deletion: usize,
    /// Clusters left after unstable-cluster deletion (equal to the above on
    /// the terminating iteration and for the baseline engine).
    pub clusters_after_deletion: usize,
    /// `(id, sample count)` for every cluster in the model after the pass.
    pub sample_sizes: Vec<(ClusterId, usize)>,
    pub deleted: Vec<ClusterId>,
    /// `(id, vigilance)` for surviving clusters at the end of the iteration.
    pub vigilances: Vec<(ClusterId, f64)>,
    /// Samples whose label differs from the previous pass; absent for t = 1.
    pub assignment_changes: Option<usize>,
    /// Samples left unassigned by deletion at the end of the iteration.
    pub unassigned: usize,
    /// End-of-iteration assignment, recorded at [`TraceLevel::Samples`].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub assignment: Option<Vec<Option<ClusterId>>>,
    /// Set on the final record only.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub termination: Option<Termination>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunTrace {
    pub records: Vec<IterationRecord>,
}

impl RunTrace {
    pub fn iterations(&self) -> usize {
        self.records.len()
    }

    pub fn termination(&self) -> Option<Termination> {
        self.records.last().and_then(|r| r.termination)
    }

    /// Writes one JSON object per iteration.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for record in &self.records {
            serde_json::to_writer(&mut out, record)?;
            out.write_all(b"\n").map_err(|source| crate::Error::Io {
                path: "<trace>".into(),
                source,
            })?;
        }
        Ok(())
    }

    pub fn read_jsonl(text: &str) -> Result<Self> {
        let records = text
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(serde_json::from_str)
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self { records })
    }
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub model: ClusterModel,
    pub assignment: Assignment,
    pub trace: RunTrace,
}

/// Partition of the model's clusters by whether they lost samples.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct StabilityVerdict {
    pub unstable: BTreeSet<ClusterId>,
    pub stable: BTreeSet<ClusterId>,
}

fn counts(assignment: &Assignment) -> HashMap<ClusterId, usize> {
    let mut map = HashMap::new();
    for id in assignment.entries().iter().flatten() {
        *map.entry(*id).or_insert(0) += 1;
    }
    map
}

/// Marks a cluster unstable iff its sample count in `current` is strictly
/// below its count in `previous`. Clusters absent from `previous` count as
/// zero there and are therefore stable.
pub fn detect_unstable(
    current: &Assignment,
    previous: &Assignment,
    model: &ClusterModel,
) -> Result<StabilityVerdict> {
    if current.len() != previous.len() {
        return Err(contract(format!(
            "assignment length mismatch: {} vs {}",
            current.len(),
            previous.len()
        )));
    }
    if !current.is_complete() || !previous.is_complete() {
        return Err(contract("stability detection needs fully assigned passes"));
    }
    let now = counts(current);
    let before = counts(previous);
    let mut verdict = StabilityVerdict::default();
    for cluster in model.clusters() {
        let n_now = now.get(&cluster.id).copied().unwrap_or(0);
        let n_before = before.get(&cluster.id).copied().unwrap_or(0);
        if n_now < n_before {
            verdict.unstable.insert(cluster.id);
        } else {
            verdict.stable.insert(cluster.id);
        }
    }
    Ok(verdict)
}

/// Removes unstable clusters and unassigns their samples.
pub fn delete_unstable(
    model: &mut ClusterModel,
    verdict: &StabilityVerdict,
    assignment: &Assignment,
) -> Assignment {
    model.remove_where(|c| verdict.unstable.contains(&c.id));
    let mut pruned = assignment.clone();
    for i in 0..pruned.len() {
        if let Some(id) = pruned.get(i) {
            if verdict.unstable.contains(&id) {
                pruned.set(i, None);
            }
        }
    }
    pruned
}

/// Scales every cluster's vigilance by `1 - tau`.
pub fn expand_vigilance(model: &mut ClusterModel, tau: f64) {
    let factor = 1.0 - tau;
    for rho in model.vigilances_mut() {
        *rho *= factor;
    }
}

pub fn run_ir_art(dataset: &[InputVector], params: &HyperParams) -> Result<RunResult> {
    Engine::IrArt.run(dataset, params)
}

pub fn run_fuzzy_art_baseline(dataset: &[InputVector], params: &HyperParams) -> Result<RunResult> {
    Engine::FuzzyArt.run(dataset, params)
}

fn snapshot(
    t: usize,
    model_after_pass: &[(ClusterId, usize)],
    model: &ClusterModel,
    deleted: Vec<ClusterId>,
    changes: Option<usize>,
    assignment: &Assignment,
    level: TraceLevel,
) -> IterationRecord {
    IterationRecord {
        t,
        clusters_before_deletion: model_after_pass.len(),
        clusters_after_deletion: model.len(),
        sample_sizes: model_after_pass.to_vec(),
        deleted,
        vigilances: model.clusters().iter().map(|c| (c.id, c.vigilance)).collect(),
        assignment_changes: changes,
        unassigned: assignment.unassigned_count(),
        assignment: (level == TraceLevel::Samples).then(|| assignment.entries().to_vec()),
        termination: None,
    }
}

fn sizes(model: &ClusterModel, assignment: &Assignment) -> Vec<(ClusterId, usize)> {
    let c = counts(assignment);
    model
        .clusters()
        .iter()
        .map(|cl| (cl.id, c.get(&cl.id).copied().unwrap_or(0)))
        .collect()
}

fn drive(
    dataset: &[InputVector],
    params: &HyperParams,
    refine: bool,
    level: TraceLevel,
) -> Result<RunResult> {
    params.validate()?;
    let first = dataset
        .first()
        .ok_or_else(|| contract("cannot cluster an empty dataset"))?;
    let mut model = ClusterModel::new(first.features());
    let mut records = Vec::new();

    let mut t = 1;
    let mut previous = single_pass(&mut model, dataset, params)?;
    let sz = sizes(&model, &previous);
    records.push(snapshot(t, &sz, &model, Vec::new(), None, &previous, level));
    if params.t_max == 1 {
        records[0].termination = Some(Termination::MaxIter);
        return Ok(RunResult {
            model,
            assignment: previous,
            trace: RunTrace { records },
        });
    }

    loop {
        t += 1;
        let current = single_pass(&mut model, dataset, params)?;
        let changes = current.changes_from(&previous);
        let sz = sizes(&model, &current);

        let stop = if changes == 0 {
            Some(Termination::Converged)
        } else if t >= params.t_max {
            Some(Termination::MaxIter)
        } else {
            None
        };
        if let Some(reason) = stop {
            let mut rec = snapshot(t, &sz, &model, Vec::new(), Some(changes), &current, level);
            rec.termination = Some(reason);
            records.push(rec);
            return Ok(RunResult {
                model,
                assignment: current,
                trace: RunTrace { records },
            });
        }

        if refine {
            let verdict = detect_unstable(&current, &previous, &model)?;
            assert!(
                model.is_empty() || !verdict.stable.is_empty(),
                "stability detection found no stable cluster at t = {t}"
            );
            let deleted = verdict.unstable.iter().copied().collect();
            // Samples of deleted clusters stay unassigned until the next pass
            // reassigns them; termination compares full passes only.
            let pruned = delete_unstable(&mut model, &verdict, &current);
            expand_vigilance(&mut model, params.tau);
            records.push(snapshot(t, &sz, &model, deleted, Some(changes), &pruned, level));
        } else {
            records.push(snapshot(t, &sz, &model, Vec::new(), Some(changes), &current, level));
        }
        previous = current;
    }
}
