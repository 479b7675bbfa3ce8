//! Command-line experiment runner for the minimax multi-view fuzzy
//! clustering toolkit.
//!
//! Subcommands: `fit` (the multi-view solver), `baseline` (single-view or
//! concatenated-view FCM), `sweep` (gamma or fuzzifier grid search), `synth`
//! (seeded dataset generation), and `eval` (recompute metrics from a result
//! file). Machine-readable results go to `--output` or stdout; human-readable
//! progress and timing go to stderr.
//!
//! Exit status: 0 on success, 1 on runtime failures, 2 on invalid input.

mod record;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use minimax_fcm::baselines;
use minimax_fcm::dataset::{self, Normalization};
use minimax_fcm::init;
use minimax_fcm::metrics;
use minimax_fcm::solver::{self, SolverConfig};
use minimax_fcm::synth::{self, SynthSpec, ViewKind};
use minimax_fcm::{load_manifest, EvaluationReport, MultiViewDataset};

use record::{ConfigEcho, RunRecord};

#[derive(Parser)]
#[command(
    name = "minimax-fcm",
    version,
    about = "Multi-view fuzzy clustering experiment runner"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a dataset with the minimax multi-view solver
    Fit(FitArgs),
    /// Run the single-view or concatenated-view FCM baselines
    Baseline(BaselineArgs),
    /// Sweep gamma or the fuzzifier over a grid, one record per point
    Sweep(SweepArgs),
    /// Generate a seeded synthetic multi-view dataset
    Synth(SynthArgs),
    /// Recompute evaluation metrics from a result file plus a labels file
    Eval(EvalArgs),
}

#[derive(Args)]
struct SolveArgs {
    /// Path to the dataset manifest (JSON)
    #[arg(long)]
    manifest: PathBuf,
    /// Number of clusters
    #[arg(long)]
    k: usize,
    /// Weight-distribution exponent, in [0, 1)
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    /// Fuzzifier (> 1)
    #[arg(long, default_value_t = 1.5)]
    m: f64,
    /// Convergence threshold on successive membership matrices
    #[arg(long, default_value_t = 1e-5)]
    epsilon: f64,
    /// Iteration cap
    #[arg(long = "max-iter", default_value_t = 100)]
    max_iter: usize,
}

#[derive(Args)]
struct FitArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Where to write the result record (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Include the full K x N membership matrix in the record
    #[arg(long)]
    emit_memberships: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BaselineMode {
    Single,
    Concat,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Which baseline to run
    #[arg(long, value_enum)]
    mode: BaselineMode,
    /// Where to write the records (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
    /// Include membership matrices in the records
    #[arg(long)]
    emit_memberships: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepParam {
    Gamma,
    M,
}

#[derive(Args)]
struct SweepArgs {
    #[command(flatten)]
    solve: SolveArgs,
    /// Which parameter to sweep; the other stays at its flag value
    #[arg(long, value_enum)]
    param: SweepParam,
    /// Inclusive grid as START:STOP:STEP
    #[arg(long)]
    range: String,
    /// Where to write the sweep record; a plot-data CSV is written next to it
    #[arg(long)]
    output: PathBuf,
    /// Concurrent grid points (0 = all cores; needs the parallel feature)
    #[arg(long, default_value_t = 0)]
    workers: usize,
}

// Gaussian draws go negative, so l1 row normalization never applies to
// generated data and is not offered here.
#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NormalizationFlag {
    None,
    UnitVarianceInvSqrtDim,
}

impl From<NormalizationFlag> for Normalization {
    fn from(value: NormalizationFlag) -> Self {
        match value {
            NormalizationFlag::None => Normalization::None,
            NormalizationFlag::UnitVarianceInvSqrtDim => Normalization::UnitVarianceInvSqrtDim,
        }
    }
}

#[derive(Args)]
struct SynthArgs {
    /// Directory to write manifest + CSV files into
    #[arg(long)]
    output: PathBuf,
    /// Number of clusters
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Objects per cluster
    #[arg(long, default_value_t = 100)]
    per_cluster: usize,
    /// Feature dimension of every view
    #[arg(long, default_value_t = 4)]
    dim: usize,
    /// Distance between adjacent cluster centers, in within-cluster sigmas
    #[arg(long, default_value_t = 5.0)]
    separation: f64,
    /// Comma-separated view kinds: informative, noise, or copy:<index>
    #[arg(long, default_value = "informative,informative")]
    views: String,
    /// Generator seed
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Dataset name recorded in the manifest
    #[arg(long)]
    name: Option<String>,
    /// Normalization tag recorded on each view
    #[arg(long, value_enum, default_value_t = NormalizationFlag::UnitVarianceInvSqrtDim)]
    normalization: NormalizationFlag,
}

#[derive(Args)]
struct EvalArgs {
    /// Result file holding a labels array (as written by fit)
    #[arg(long)]
    result: PathBuf,
    /// Ground-truth labels file, one integer per line
    #[arg(long)]
    labels: PathBuf,
    /// The labels file starts with a header line
    #[arg(long)]
    header: bool,
    /// Where to write the metrics (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug)]
enum CliError {
    Input(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Input(m) | CliError::Runtime(m) => m,
        }
    }
}

impl From<minimax_fcm::Error> for CliError {
    fn from(e: minimax_fcm::Error) -> Self {
        if e.is_invalid_input() {
            CliError::Input(e.to_string())
        } else {
            CliError::Runtime(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Fit(args) => cmd_fit(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Synth(args) => cmd_synth(args),
        Command::Eval(args) => cmd_eval(args),
    };
    if let Err(e) = outcome {
        eprintln!("error: {}", e.message());
        std::process::exit(e.exit_code());
    }
}

fn build_config(solve: &SolveArgs, dataset: &MultiViewDataset) -> CliResult<SolverConfig> {
    let config = SolverConfig {
        k: solve.k,
        gamma: solve.gamma,
        m: solve.m,
        epsilon: solve.epsilon,
        max_iter: solve.max_iter,
        measure: dataset.distance(),
    };
    config.validate()?;
    Ok(config)
}

fn load_and_hash(manifest: &Path) -> CliResult<(MultiViewDataset, String)> {
    let raw = load_manifest(manifest)?;
    let hash = record::dataset_sha256(&raw);
    Ok((raw, hash))
}

fn evaluate_if_labeled(
    labels: &[usize],
    dataset: &MultiViewDataset,
) -> CliResult<Option<EvaluationReport>> {
    match dataset.labels() {
        Some(truth) => Ok(Some(metrics::evaluate(labels, truth)?)),
        None => Ok(None),
    }
}

fn emit_json<T: Serialize>(value: &T, output: Option<&Path>) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Runtime(format!("serialization failed: {e}")))?;
    text.push('\n');
    match output {
        Some(path) => record::write_atomic(path, &text)
            .map_err(|e| CliError::Runtime(format!("failed to write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn report_metrics(metrics: &Option<EvaluationReport>) {
    if let Some(m) = metrics {
        eprintln!(
            "accuracy {:.4}  nmi {:.4}  f-measure {:.4}",
            m.accuracy, m.nmi, m.f_measure
        );
    }
}

fn cmd_fit(args: FitArgs) -> CliResult<()> {
    let (raw, hash) = load_and_hash(&args.solve.manifest)?;
    let config = build_config(&args.solve, &raw)?;
    let dataset = raw.normalize()?;
    let initial = init::initial_state(&dataset, &config)?;

    let start = Instant::now();
    let result = solver::fit(&dataset, &config, initial)?;
    let wall_ms = start.elapsed().as_secs_f64() * 1e3;

    let metrics = evaluate_if_labeled(&result.labels, &dataset)?;
    let echo = ConfigEcho::new(&config, &args.solve.manifest, hash);
    let rec = RunRecord::from_clustering(
        "minimax-fcm",
        echo,
        &result,
        metrics.clone(),
        args.emit_memberships,
        wall_ms,
    );
    emit_json(&rec, args.output.as_deref())?;
    eprintln!(
        "fit: {} iterations ({}) in {:.1} ms",
        result.iterations,
        if result.converged { "converged" } else { "hit iteration cap" },
        wall_ms
    );
    report_metrics(&metrics);
    Ok(())
}

fn cmd_baseline(args: BaselineArgs) -> CliResult<()> {
    let (raw, hash) = load_and_hash(&args.solve.manifest)?;
    let config = build_config(&args.solve, &raw)?;
    let dataset = raw.normalize()?;

    let mut records = Vec::new();
    match args.mode {
        BaselineMode::Single => {
            for view in dataset.views() {
                let centroids = init::select_initial_centroids(view, config.k, config.measure)?;
                let start = Instant::now();
                let result = baselines::fcm_fit(view, &config, &centroids)?;
                let wall_ms = start.elapsed().as_secs_f64() * 1e3;
                let metrics = evaluate_if_labeled(&result.labels, &dataset)?;
                records.push(RunRecord::from_fcm(
                    "fcm-single-view",
                    Some(view.name().to_string()),
                    ConfigEcho::new(&config, &args.solve.manifest, hash.clone()),
                    &result,
                    metrics,
                    args.emit_memberships,
                    wall_ms,
                ));
            }
        }
        BaselineMode::Concat => {
            let concatenated = dataset::concatenate_views(&dataset)?;
            let centroids =
                init::select_initial_centroids(&concatenated, config.k, config.measure)?;
            let start = Instant::now();
            let result = baselines::fcm_concatenated(&dataset, &config, &centroids)?;
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            let metrics = evaluate_if_labeled(&result.labels, &dataset)?;
            records.push(RunRecord::from_fcm(
                "fcm-concatenated",
                None,
                ConfigEcho::new(&config, &args.solve.manifest, hash),
                &result,
                metrics,
                args.emit_memberships,
                wall_ms,
            ));
        }
    }

    let summary = match args.mode {
        BaselineMode::Single => record::summarize(&records),
        BaselineMode::Concat => None,
    };
    for rec in &records {
        eprintln!(
            "{}{}: {} iterations in {:.1} ms",
            rec.algorithm,
            rec.view.as_deref().map(|v| format!(" [{v}]")).unwrap_or_default(),
            rec.iterations,
            rec.wall_time_ms.unwrap_or(0.0)
        );
        report_metrics(&rec.metrics);
    }
    let file = record::BaselineFile {
        schema_version: record::SCHEMA_VERSION,
        mode: match args.mode {
            BaselineMode::Single => "single".into(),
            BaselineMode::Concat => "concat".into(),
        },
        records,
        summary,
    };
    emit_json(&file, args.output.as_deref())
}

fn parse_range(text: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(CliError::Input(format!(
            "range must be START:STOP:STEP, got {text:?}"
        )));
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Input(format!("range component {p:?} is not a number")))
        })
        .collect::<CliResult<_>>()?;
    let (start, stop, step) = (nums[0], nums[1], nums[2]);
    if step.is_nan() || step <= 0.0 || stop < start || !start.is_finite() || !stop.is_finite() {
        return Err(CliError::Input(format!(
            "empty or inverted range: {text:?}"
        )));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn cmd_sweep(args: SweepArgs) -> CliResult<()> {
    let (raw, hash) = load_and_hash(&args.solve.manifest)?;
    let base_config = build_config(&args.solve, &raw)?;
    let dataset = raw.normalize()?;

    let values = parse_range(&args.range)?;
    let param_name = match args.param {
        SweepParam::Gamma => "gamma",
        SweepParam::M => "m",
    };
    // Validate each grid point up front so errors surface before any work.
    for &v in &values {
        let mut config = base_config;
        match args.param {
            SweepParam::Gamma => config.gamma = v,
            SweepParam::M => config.m = v,
        }
        config
            .validate()
            .map_err(|e| CliError::Input(format!("grid point {param_name}={v}: {e}")))?;
    }

    // Initialization depends only on K and the distance, so one initial state
    // serves every grid point.
    let initial = init::initial_state(&dataset, &base_config)?;
    let start = Instant::now();
    let runs = run_grid(args.workers, values.len(), |i| {
        let value = values[i];
        let mut config = base_config;
        match args.param {
            SweepParam::Gamma => config.gamma = value,
            SweepParam::M => config.m = value,
        }
        let point_start = Instant::now();
        let result = solver::fit(&dataset, &config, initial.clone())?;
        let wall_ms = point_start.elapsed().as_secs_f64() * 1e3;
        let metrics = evaluate_if_labeled(&result.labels, &dataset)?;
        Ok(RunRecord::from_clustering(
            "minimax-fcm",
            ConfigEcho::new(&config, &args.solve.manifest, hash.clone()),
            &result,
            metrics,
            false,
            wall_ms,
        ))
    });
    let records = runs.into_iter().collect::<CliResult<Vec<_>>>()?;
    let total_ms = start.elapsed().as_secs_f64() * 1e3;

    let value_of = |rec: &RunRecord| match args.param {
        SweepParam::Gamma => rec.config.gamma,
        SweepParam::M => rec.config.m,
    };
    let best_by_nmi = records
        .iter()
        .filter(|r| r.metrics.is_some())
        .max_by(|a, b| {
            let (am, bm) = (a.metrics.as_ref().unwrap(), b.metrics.as_ref().unwrap());
            am.nmi.partial_cmp(&bm.nmi).expect("finite nmi")
        })
        .map(|r| {
            let m = r.metrics.as_ref().unwrap();
            record::BestPoint {
                value: value_of(r),
                accuracy: m.accuracy,
                nmi: m.nmi,
                f_measure: m.f_measure,
            }
        });

    // Plot-data CSV next to the JSON record.
    let mut csv = format!("{param_name},accuracy,nmi,f_measure\n");
    for rec in &records {
        match &rec.metrics {
            Some(m) => csv.push_str(&format!(
                "{},{},{},{}\n",
                value_of(rec),
                m.accuracy,
                m.nmi,
                m.f_measure
            )),
            None => csv.push_str(&format!("{},,,\n", value_of(rec))),
        }
    }
    let csv_path = args.output.with_extension("csv");
    record::write_atomic(&csv_path, &csv)
        .map_err(|e| CliError::Runtime(format!("failed to write {}: {e}", csv_path.display())))?;

    let file = record::SweepFile {
        schema_version: record::SCHEMA_VERSION,
        param: param_name.to_string(),
        records,
        best_by_nmi: best_by_nmi.clone(),
    };
    emit_json(&file, Some(&args.output))?;
    eprintln!(
        "sweep: {} grid points in {:.1} ms; plot data at {}",
        values.len(),
        total_ms,
        csv_path.display()
    );
    if let Some(best) = best_by_nmi {
        eprintln!(
            "best {param_name} by nmi: {} (accuracy {:.4}, nmi {:.4}, f-measure {:.4})",
            best.value, best.accuracy, best.nmi, best.f_measure
        );
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn run_grid<T, F>(workers: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    use rayon::prelude::*;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool construction");
    pool.install(|| (0..n).into_par_iter().map(f).collect())
}

#[cfg(not(feature = "parallel"))]
fn run_grid<T, F>(workers: usize, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    if workers > 1 {
        eprintln!("note: built without the parallel feature; --workers is ignored");
    }
    (0..n).map(f).collect()
}

fn parse_views(text: &str) -> CliResult<Vec<ViewKind>> {
    text.split(',')
        .map(|tok| {
            let tok = tok.trim();
            if tok == "informative" {
                Ok(ViewKind::Informative)
            } else if tok == "noise" {
                Ok(ViewKind::Noise)
            } else if let Some(idx) = tok.strip_prefix("copy:") {
                idx.parse::<usize>().map(ViewKind::CopyOf).map_err(|_| {
                    CliError::Input(format!("bad copy index in view kind {tok:?}"))
                })
            } else {
                Err(CliError::Input(format!(
                    "unknown view kind {tok:?} (expected informative, noise, or copy:<index>)"
                )))
            }
        })
        .collect()
}

fn cmd_synth(args: SynthArgs) -> CliResult<()> {
    let views = parse_views(&args.views)?;
    let mut spec = SynthSpec::new(args.k, args.per_cluster, args.dim, args.separation, args.seed)
        .with_views(views);
    spec.normalization = args.normalization.into();
    if let Some(name) = args.name {
        spec.name = name;
    }
    let dataset = synth::generate(&spec)?;
    let manifest = dataset::write_dataset(&dataset, &args.output)?;
    println!("{}", manifest.display());
    eprintln!(
        "synth: {} objects, {} views, {} clusters -> {}",
        dataset.n_objects(),
        dataset.n_views(),
        args.k,
        args.output.display()
    );
    Ok(())
}

fn cmd_eval(args: EvalArgs) -> CliResult<()> {
    let text = fs::read_to_string(&args.result)
        .map_err(|e| CliError::Input(format!("failed to read {}: {e}", args.result.display())))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::Input(format!("{} is not valid JSON: {e}", args.result.display())))?;
    let labels: Vec<usize> = value
        .get("labels")
        .and_then(|l| l.as_array())
        .ok_or_else(|| {
            CliError::Input(format!(
                "{} has no top-level labels array",
                args.result.display()
            ))
        })?
        .iter()
        .map(|v| {
            v.as_u64().map(|u| u as usize).ok_or_else(|| {
                CliError::Input("labels array holds a non-integer".to_string())
            })
        })
        .collect::<CliResult<_>>()?;
    let truth = dataset::read_labels_file(&args.labels, args.header)?;
    let report = metrics::evaluate(&labels, &truth)?;
    emit_json(&report, args.output.as_deref())?;
    report_metrics(&Some(report));
    Ok(())
}
