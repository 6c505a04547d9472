//! Fuzzy ART clustering with iterative refinement of the category field.
//!
//! * [`art`]: complement-coded inputs, choice / match / learning, one pass.
//! * [`irart`]: the refinement loop (stability detection, deletion of
//!   shrinking clusters, vigilance expansion) and the plain baseline loop.
//! * [`preprocess`]: CSV ingestion, Min-Max scaling, complement coding.
//! * [`metrics`]: NMI and ARI against ground truth.
//! * [`scan`], [`report`], [`synth`]: vigilance-grid experiments.

pub mod art;
pub mod error;
pub mod irart;
pub mod metrics;
pub mod preprocess;
pub mod report;
pub mod scan;
pub mod synth;

pub use art::{
    choice_function, match_function, present_sample, prototype_learning, single_pass, Assignment,
    Cluster, ClusterId, ClusterModel, HyperParams, InputVector,
};
pub use error::{Error, Result};
pub use irart::{
    delete_unstable, detect_unstable, expand_vigilance, run_fuzzy_art_baseline, run_ir_art, Engine,
    IterationRecord, RunResult, RunTrace, StabilityVerdict, Termination, TraceLevel,
};
pub use metrics::{adjusted_rand_index, build_contingency, normalized_mutual_info, ContingencyTable};
pub use preprocess::{complement_code, minmax_normalize, CsvOptions, LabelColumn, RawDataset};
pub use report::{emit_report, ReportFormat};
pub use scan::{permute, run_scan, ScanConfig, ScanReport, ScanSummary};
pub use synth::{generate_synthetic, Shape};
