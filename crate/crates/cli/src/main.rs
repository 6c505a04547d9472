use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use irart_core::report::{self, ReportFormat};
use irart_core::scan::{self, ScanConfig};
use irart_core::{
    metrics, preprocess, synth, CsvOptions, Engine, Error, HyperParams, LabelColumn, RawDataset,
    TraceLevel,
};

/// Fuzzy ART and IR-ART clustering.
#[derive(Debug, Parser)]
#[command(name = "irart", version, about)]
struct Cli {
    /// Increase output detail (-v: trace summary, -vv: per-sample traces).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cluster one CSV file with a single engine run.
    Fit(FitArgs),
    /// Scan the initial vigilance over a grid with random presentation orders.
    Scan(ScanArgs),
    /// Write a labeled synthetic dataset.
    Gen(GenArgs),
    /// Print the summary of a saved scan report, optionally converting it.
    Report(ReportArgs),
}

fn unit_interval(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside the valid range [0, 1]"))
    }
}

fn half_open_unit(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if (0.0..1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is outside the valid range [0, 1)"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("'{s}' is not a number"))?;
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be > 0"))
    }
}

fn label_column(s: &str) -> Result<LabelColumn, String> {
    Ok(match s.parse::<usize>() {
        Ok(i) => LabelColumn::Index(i),
        Err(_) => LabelColumn::Name(s.to_string()),
    })
}

#[derive(Debug, Args)]
struct EngineArgs {
    /// Learning rate, in [0, 1].
    #[arg(long, default_value_t = 0.5, value_parser = unit_interval)]
    beta: f64,
    /// Vigilance expansion rate, in [0, 1).
    #[arg(long, default_value_t = 0.01, value_parser = half_open_unit)]
    tau: f64,
    /// Choice parameter, > 0.
    #[arg(long, default_value_t = 0.001, value_parser = positive)]
    alpha: f64,
    /// Maximum number of full passes.
    #[arg(long = "max-iter", default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    max_iter: u32,
    /// Clustering engine: ir-art or fuzzy-art.
    #[arg(long, default_value = "ir-art", value_parser = |s: &str| s.parse::<Engine>())]
    engine: Engine,
}

#[derive(Debug, Args)]
struct LabelArgs {
    /// Treat the last column as the ground-truth label.
    #[arg(long)]
    labeled: bool,
    /// Label column by zero-based index or header name (implies --labeled).
    #[arg(long = "label-col", value_parser = label_column)]
    label_col: Option<LabelColumn>,
}

impl LabelArgs {
    fn options(&self) -> CsvOptions {
        let label = match (&self.label_col, self.labeled) {
            (Some(c), _) => c.clone(),
            (None, true) => LabelColumn::Last,
            (None, false) => LabelColumn::None,
        };
        CsvOptions {
            label,
            has_header: None,
        }
    }
}

#[derive(Debug, Args)]
struct FitArgs {
    /// Input CSV.
    input: PathBuf,
    /// Initial vigilance, in [0, 1].
    #[arg(long, default_value_t = 0.5, value_parser = unit_interval)]
    rho: f64,
    #[command(flatten)]
    engine: EngineArgs,
    /// Shuffle the presentation order with this seed (file order when absent).
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    labels: LabelArgs,
    /// Write `sample_index,cluster_id` rows here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the run trace as JSON lines here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    /// Labeled input CSV.
    input: PathBuf,
    #[arg(long = "rho-start", default_value_t = 0.05, value_parser = unit_interval)]
    rho_start: f64,
    #[arg(long = "rho-end", default_value_t = 0.95, value_parser = unit_interval)]
    rho_end: f64,
    #[arg(long = "rho-step", default_value_t = 0.01, value_parser = positive)]
    rho_step: f64,
    /// Random presentation orders per vigilance value.
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u32).range(1..))]
    orders: u32,
    /// Base seed from which every cell's order is derived.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long, env = "IRART_WORKERS", value_parser = clap::value_parser!(u32).range(1..))]
    workers: Option<u32>,
    #[command(flatten)]
    engine: EngineArgs,
    #[command(flatten)]
    labels: LabelArgs,
    /// Report destination; the summary is always printed.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report format: csv or json.
    #[arg(long, default_value = "csv", value_parser = |s: &str| s.parse::<ReportFormat>())]
    format: ReportFormat,
    /// Write every cell's run trace as JSON lines here.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenArgs {
    /// two-gaussians or grid-blobs.
    #[arg(long, default_value = "two-gaussians", value_parser = |s: &str| s.parse::<synth::Shape>())]
    shape: synth::Shape,
    /// Number of samples, at least 4.
    #[arg(short, long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(4..))]
    n: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Saved scan report (CSV or JSON).
    input: PathBuf,
    /// Re-emit the report here.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = |s: &str| s.parse::<ReportFormat>())]
    format: ReportFormat,
}

/// A failure with its exit status: 1 for data and runtime errors, 2 for usage.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::Config(_)) { 2 } else { 1 };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn runtime(message: impl Into<String>) -> Failure {
    Failure {
        code: 1,
        message: message.into(),
    }
}

fn io_error(path: &Path, e: std::io::Error) -> Failure {
    runtime(format!("{}: {e}", path.display()))
}

fn params(engine: &EngineArgs, rho: f64) -> Result<HyperParams, Failure> {
    Ok(HyperParams::new(
        engine.alpha,
        engine.beta,
        rho,
        engine.tau,
        engine.max_iter as usize,
    )?)
}

fn load(path: &Path, labels: &LabelArgs) -> Result<RawDataset, Failure> {
    preprocess::load_csv(path, &labels.options()).map_err(|e| match e {
        Error::Config(_) => Failure::from(e),
        other => runtime(format!("{}: {other}", path.display())),
    })
}

fn create(path: &Path) -> Result<BufWriter<File>, Failure> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| io_error(path, e))
}

fn cmd_fit(args: &FitArgs, verbose: u8) -> Result<(), Failure> {
    let params = params(&args.engine, args.rho)?;
    let raw = load(&args.input, &args.labels)?;
    let order: Vec<usize> = match args.seed {
        Some(seed) => scan::permutation(raw.len(), seed),
        None => (0..raw.len()).collect(),
    };
    let inputs = raw.to_inputs()?;
    let presented: Vec<_> = order.iter().map(|&i| inputs[i].clone()).collect();
    let level = if verbose >= 2 {
        TraceLevel::Samples
    } else {
        TraceLevel::Iterations
    };
    let run = args.engine.engine.run_traced(&presented, &params, level)?;

    println!("engine: {}", args.engine.engine);
    println!("clusters: {}", run.model.len());
    println!("iterations: {}", run.trace.iterations());
    if let Some(reason) = run.trace.termination() {
        println!("termination: {reason}");
    }

    let ids = run.assignment.ids()?;
    let mut by_sample = vec![ids[0]; ids.len()];
    for (pos, &sample) in order.iter().enumerate() {
        by_sample[sample] = ids[pos];
    }
    if let Some(truth) = raw.class_ids() {
        let assignment = irart_core::Assignment::from_ids(by_sample.iter().copied());
        let table = metrics::build_contingency(&truth, &assignment)?;
        println!("NMI: {}", report::format_number(metrics::normalized_mutual_info(&table)));
        // ARI is undefined for a single sample.
        match metrics::adjusted_rand_index(&table) {
            Ok(ari) => println!("ARI: {}", report::format_number(ari)),
            Err(_) => println!("ARI: n/a"),
        }
    }
    if verbose >= 1 {
        for rec in &run.trace.records {
            eprintln!(
                "t={} clusters {} -> {} deleted={} changes={}",
                rec.t,
                rec.clusters_before_deletion,
                rec.clusters_after_deletion,
                rec.deleted.len(),
                rec.assignment_changes.map_or("-".into(), |c| c.to_string())
            );
        }
    }
    if let Some(path) = &args.out {
        let mut w = create(path)?;
        let write = |w: &mut BufWriter<File>| -> std::io::Result<()> {
            writeln!(w, "sample_index,cluster_id")?;
            for (i, id) in by_sample.iter().enumerate() {
                writeln!(w, "{i},{id}")?;
            }
            w.flush()
        };
        write(&mut w).map_err(|e| io_error(path, e))?;
    }
    if let Some(path) = &args.trace {
        run.trace.write_jsonl(create(path)?)?;
    }
    Ok(())
}

fn print_summary(report: &scan::ScanReport) {
    let s = &report.summary;
    let f = report::format_number;
    println!("grid points: {}", report.per_rho.len());
    println!("peak aNMI: {}  peak aARI: {}", f(s.peak_nmi), f(s.peak_ari));
    println!("mNMI: {}  mARI: {}", f(s.mean_nmi), f(s.mean_ari));
    println!("sNMI: {}  sARI: {}", f(s.std_nmi), f(s.std_ari));
}

fn cmd_scan(args: &ScanArgs, verbose: u8) -> Result<(), Failure> {
    let config = ScanConfig {
        rho_start: args.rho_start,
        rho_end: args.rho_end,
        rho_step: args.rho_step,
        orders: args.orders as usize,
        base_seed: args.seed,
        params: params(&args.engine, args.rho_start)?,
        engine: args.engine.engine,
        workers: args.workers.map(|w| w as usize),
    };
    config.validate()?;
    let raw = load(&args.input, &args.labels)?;
    if raw.labels().is_none() {
        return Err(runtime(
            "scan needs ground-truth labels because NMI and ARI are external indices; \
             pass --labeled or --label-col",
        ));
    }

    let report = if let Some(path) = &args.trace {
        let (report, cells) = scan::run_scan_traced(&raw, &config)?;
        let grid = config.grid();
        let mut w = create(path)?;
        for cell in &cells {
            let Some(trace) = &cell.trace else { continue };
            for rec in &trace.records {
                let line = format!(
                    "{{\"rho\":{},\"order\":{},\"seed\":{},\"record\":{}}}",
                    grid[cell.rho_index],
                    cell.order_index,
                    cell.seed,
                    serde_json_string(rec)?
                );
                writeln!(w, "{line}").map_err(|e| io_error(path, e))?;
            }
        }
        w.flush().map_err(|e| io_error(path, e))?;
        report
    } else {
        scan::run_scan(&raw, &config)?
    };

    if verbose >= 1 {
        for r in &report.per_rho {
            eprintln!(
                "rho={} aNMI={} aARI={} clusters={}",
                report::format_number(r.rho),
                report::format_number(r.a_nmi),
                report::format_number(r.a_ari),
                report::format_number(r.mean_clusters)
            );
        }
    }
    if let Some(path) = &args.out {
        report::emit_report(&report, args.format, path)?;
    }
    print_summary(&report);
    Ok(())
}

fn serde_json_string(rec: &irart_core::IterationRecord) -> Result<String, Failure> {
    let mut buf = Vec::new();
    irart_core::RunTrace {
        records: vec![rec.clone()],
    }
    .write_jsonl(&mut buf)?;
    Ok(String::from_utf8_lossy(&buf).trim_end().to_string())
}

fn cmd_gen(args: &GenArgs) -> Result<(), Failure> {
    let ds = synth::generate_synthetic(args.shape, args.n as usize, args.seed)?;
    ds.write_csv(&args.out)?;
    println!("wrote {} samples to {}", ds.len(), args.out.display());
    Ok(())
}

fn cmd_report(args: &ReportArgs) -> Result<(), Failure> {
    let report = report::read_report(&args.input)?;
    if let Some(path) = &args.out {
        report::emit_report(&report, args.format, path)?;
    }
    print_summary(&report);
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let result = match &cli.command {
        Command::Fit(a) => cmd_fit(a, cli.verbose),
        Command::Scan(a) => cmd_scan(a, cli.verbose),
        Command::Gen(a) => cmd_gen(a),
        Command::Report(a) => cmd_report(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
