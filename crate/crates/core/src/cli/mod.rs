//! Command-line front end: `synth`, `fit`, `eval` and `plot-data`.
//!
//! Exit codes: 0 success, 2 input error, 3 numerical failure. Every command
//! prints a single-line JSON summary on stdout.

mod config;

pub use config::{parse_range, FileConfig};

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, CommandFactory, Parser, Subcommand};
use serde_json::{json, Value};

use crate::baselines::pairwise_squared_objective;
use crate::dataset::{load_csv, synthesize, write_csv, write_sidecar, GaussianSpec, LabelColumn, LabeledDataset, Sidecar};
use crate::eval::{
    average_min_pairwise_distance, corruption_sweep, export_projection_plot, fit_method, CorruptionGrid,
    EvaluationReport, DEFAULT_BINS,
};
use crate::fsutil::atomic_write;
use crate::scatter::{class_statistics, EpsilonPolicy};
use crate::solver::{objective, write_trace_csv, MAssembly, Method, ModelSnapshot, SolverConfig, SvdRoute};

pub const EXIT_INPUT: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Input(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_INPUT,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Input(m) => write!(f, "input error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl<E: Into<crate::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        let e = e.into();
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}

fn input(msg: impl Into<String>) -> CliError {
    CliError::Input(msg.into())
}

#[derive(Debug, Parser)]
#[command(name = "swrlda", version, about = "Self-weighted robust LDA experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic Gaussian dataset (CSV plus JSON sidecar).
    Synth(SynthArgs),
    /// Fit a projection and write the model snapshot and objective trace.
    Fit(FitArgs),
    /// Cross-validated 1-NN evaluation, dimension and corruption sweeps.
    Eval(EvalArgs),
    /// Export plot data from a model snapshot.
    PlotData(PlotArgs),
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Built-in geometry.
    #[arg(long, value_parser = ["syn1", "syn2"], conflicts_with = "spec")]
    pub preset: Option<String>,
    /// Explicit Gaussian spec (JSON: means, covariance, samples_per_class, seed).
    #[arg(long)]
    pub spec: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_parser = positive)]
    pub samples_per_class: Option<usize>,
    /// Output CSV; the sidecar goes next to it as `<stem>.meta.json`.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args, Clone)]
pub struct DataArgs {
    /// Dataset CSV (one sample per row).
    #[arg(short, long)]
    pub input: PathBuf,
    /// Label column: zero-based index, header name, or `last`.
    #[arg(long)]
    pub label: Option<String>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct SolverArgs {
    /// JSON experiment config; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed of the initial projection.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    /// Ridge as a multiple of trace(S_w)/d.
    #[arg(long, conflicts_with = "epsilon_abs")]
    pub epsilon_rel: Option<f64>,
    /// Absolute ridge added to S_w.
    #[arg(long)]
    pub epsilon_abs: Option<f64>,
    #[arg(long, value_parser = ["fast", "naive"])]
    pub assembly: Option<String>,
    #[arg(long, value_parser = ["thin", "gram"])]
    pub svd: Option<String>,
    #[arg(long)]
    pub zero_threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long)]
    pub method: Option<String>,
    /// Projected dimension.
    #[arg(short, value_parser = positive)]
    pub m: Option<usize>,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Model snapshot path (default `<input stem>_<method>_m<m>.json`).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Objective trace CSV (default next to the model).
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Comma-separated methods.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<String>>,
    #[arg(short, value_parser = positive)]
    pub m: Option<usize>,
    /// Dimension sweep `a..b` (inclusive); overrides `-m`.
    #[arg(long)]
    pub dims: Option<String>,
    #[arg(long)]
    pub folds: Option<usize>,
    /// Seed of the fold assignment.
    #[arg(long)]
    pub cv_seed: Option<u64>,
    /// Robustness sweep, e.g. `classes=0..3,frac=0.2/0.4,pixels=0.3,seeds=5`.
    #[arg(long)]
    pub corrupt: Option<String>,
    /// Drop wall-time fields so output is byte-stable.
    #[arg(long)]
    pub no_timing: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Report JSON path.
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    /// Accuracy table CSV (method, m, mean, std, min_pairwise_distance).
    #[arg(long)]
    pub table: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PlotArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Model snapshot written by `fit`.
    #[arg(long)]
    pub model: PathBuf,
    /// Output prefix (default: the model path without extension).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub bins: Option<usize>,
    /// Dimensions for the minimum-pairwise-distance curve (default 1..min(d, c-1)).
    #[arg(long)]
    pub mpd_dims: Option<String>,
    /// Seeded repetitions averaged per dimension.
    #[arg(long)]
    pub runs: Option<usize>,
    #[arg(long)]
    pub config: Option<PathBuf>,
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit code.
pub fn run<I, A>(args: I) -> i32
where
    I: IntoIterator<Item = A>,
    A: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            if !e.use_stderr() {
                return 0;
            }
            eprintln!("\n{}", usage_for(&args));
            return EXIT_INPUT;
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("swrlda: {e}");
            e.exit_code()
        }
    }
}

/// Usage line of the subcommand named in `args`, or of the whole program.
fn usage_for(args: &[OsString]) -> String {
    let mut command = Cli::command();
    command.build();
    let named = args.iter().skip(1).find_map(|a| {
        let name = a.to_str()?;
        command.get_subcommands().find(|s| s.get_name() == name).cloned()
    });
    match named {
        Some(mut sub) => sub.render_usage().to_string(),
        None => command.render_usage().to_string(),
    }
}

fn positive(text: &str) -> Result<usize, String> {
    match text.parse::<usize>() {
        Ok(0) => Err("must be at least 1".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

pub fn execute(command: &Command) -> Result<Value, CliError> {
    match command {
        Command::Synth(a) => cmd_synth(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Eval(a) => cmd_eval(a),
        Command::PlotData(a) => cmd_plot_data(a),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    atomic_write(path, bytes).map_err(|e| input(format!("cannot write {}: {e}", path.display())))
}

fn suffixed(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.file_name().map(|n| n.to_os_string()).unwrap_or_default();
    name.push(suffix);
    prefix.with_file_name(name)
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn load_dataset(data: &DataArgs, file: &FileConfig) -> Result<LabeledDataset<f64>, CliError> {
    let label: LabelColumn = data
        .label
        .as_deref()
        .or(file.label.as_deref())
        .map(|s| s.parse().expect("infallible"))
        .unwrap_or_default();
    load_csv(&data.input, &label).map_err(|e| input(format!("{}: {e}", data.input.display())))
}

fn solver_config(flags: &SolverArgs, file: &FileConfig, m: usize) -> Result<SolverConfig, CliError> {
    let defaults = SolverConfig::default();
    let epsilon_policy = match (flags.epsilon_rel, flags.epsilon_abs) {
        (Some(f), _) => EpsilonPolicy::RelativeToTrace(f),
        (None, Some(e)) => EpsilonPolicy::Absolute(e),
        (None, None) => file.epsilon_policy.unwrap_or(defaults.epsilon_policy),
    };
    let m_assembly = match flags.assembly.as_deref() {
        Some("naive") => MAssembly::Naive,
        Some(_) => MAssembly::Fast,
        None => file.m_assembly.unwrap_or_default(),
    };
    let svd_route = match flags.svd.as_deref() {
        Some("gram") => SvdRoute::Gram,
        Some(_) => SvdRoute::Thin,
        None => file.svd_route.unwrap_or_default(),
    };
    let config = SolverConfig {
        target_dim: m,
        tolerance: flags.tolerance.or(file.tolerance).unwrap_or(defaults.tolerance),
        max_iterations: flags.max_iterations.or(file.max_iterations).unwrap_or(defaults.max_iterations),
        seed: flags.seed.or(file.seed).unwrap_or(defaults.seed),
        epsilon_policy,
        m_assembly,
        svd_route,
        zero_norm_threshold: flags.zero_threshold.or(file.zero_norm_threshold).unwrap_or(defaults.zero_norm_threshold),
    };
    if !(config.tolerance > 0.0) || config.max_iterations == 0 {
        return Err(input("tolerance must be positive and max-iterations at least 1"));
    }
    Ok(config)
}

fn parse_method(s: &str) -> Result<Method, CliError> {
    s.parse().map_err(input)
}

fn cmd_synth(args: &SynthArgs) -> Result<Value, CliError> {
    let (mut spec, provenance, default_out) = match (&args.preset, &args.spec) {
        (Some(p), _) => {
            let spec = if p == "syn1" { GaussianSpec::syn1(0) } else { GaussianSpec::syn2(0) };
            (spec, format!("preset {p}"), PathBuf::from(format!("{p}.csv")))
        }
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
            let spec: GaussianSpec =
                serde_json::from_str(&text).map_err(|e| input(format!("bad spec {}: {e}", path.display())))?;
            (spec, format!("spec {}", path.display()), PathBuf::from("synthetic.csv"))
        }
        (None, None) => return Err(input("synth needs --preset or --spec")),
    };
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    if let Some(n) = args.samples_per_class {
        spec.samples_per_class = n;
    }
    let data: LabeledDataset<f64> = synthesize(&spec).map_err(|e| match e {
        crate::DatasetError::NotPositiveDefinite => {
            input(format!("covariance matrix in {provenance} is not positive definite"))
        }
        other => input(format!("{provenance}: {other}")),
    })?;
    let out = args.output.clone().unwrap_or(default_out);
    write_csv(&out, &data)?;
    let sidecar_path = sibling(&out, ".meta.json");
    write_sidecar(&sidecar_path, &Sidecar::describe(&data, Some(spec.seed), provenance))?;
    Ok(json!({
        "command": "synth",
        "output": out.display().to_string(),
        "sidecar": sidecar_path.display().to_string(),
        "d": data.dim(),
        "n": data.len(),
        "c": data.class_count(),
        "seed": spec.seed,
    }))
}

fn cmd_fit(args: &FitArgs) -> Result<Value, CliError> {
    let file = FileConfig::load(args.solver.config.as_deref()).map_err(input)?;
    let data = load_dataset(&args.data, &file)?;
    let method = parse_method(args.method.as_deref().or(file.method.as_deref()).unwrap_or("swrlda"))?;
    let m = args.m.or(file.m).unwrap_or(1);
    let config = solver_config(&args.solver, &file, m)?;
    let (projection, trace) = fit_method(&data, method, &config)?;

    let stem = args.data.input.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let model_path = args
        .output
        .clone()
        .unwrap_or_else(|| args.data.input.with_file_name(format!("{stem}_{method}_m{m}.json")));
    let snapshot = ModelSnapshot::new(&projection, &config, trace.as_ref());
    write_file(&model_path, snapshot.to_json().as_bytes())?;

    let stats = class_statistics(&data);
    let mut summary = json!({
        "command": "fit",
        "method": method,
        "m": m,
        "objective": objective(&projection.matrix, &stats),
        "squared_objective": pairwise_squared_objective(&projection.matrix, &stats),
        "constraint_residual": projection.constraint_residual,
        "model": model_path.display().to_string(),
    });
    if let Some(trace) = &trace {
        let trace_path = args.trace.clone().unwrap_or_else(|| sibling(&model_path, "_trace.csv"));
        write_trace_csv(&trace_path, &trace.objectives)
            .map_err(|e| input(format!("cannot write {}: {e}", trace_path.display())))?;
        summary["iterations"] = json!(trace.iterations);
        summary["converged"] = json!(trace.converged);
        summary["trace"] = json!(trace_path.display().to_string());
    }
    Ok(summary)
}

fn dims_for(spec: &str, d: usize) -> Result<Vec<usize>, CliError> {
    let (lo, hi) = parse_range(spec).map_err(input)?;
    if lo == 0 {
        return Err(input("dimensions start at 1"));
    }
    if lo > d {
        return Err(input(format!("dimension {lo} exceeds the feature dimension {d}")));
    }
    if hi > d {
        log::warn!("dimension sweep capped at the feature dimension {d} (requested up to {hi})");
    }
    Ok((lo..=hi.min(d)).collect())
}

fn cmd_eval(args: &EvalArgs) -> Result<Value, CliError> {
    let file = FileConfig::load(args.solver.config.as_deref()).map_err(input)?;
    let data = load_dataset(&args.data, &file)?;
    let method_names = args
        .methods
        .clone()
        .or(file.methods.clone())
        .unwrap_or_else(|| vec!["swrlda".into(), "lda".into()]);
    let methods = method_names.iter().map(|s| parse_method(s.trim())).collect::<Result<Vec<_>, _>>()?;
    let dims = match args.dims.as_deref().or(file.dims.as_deref()) {
        Some(spec) => dims_for(spec, data.dim())?,
        None => vec![args.m.or(file.m).unwrap_or(1)],
    };
    let folds = args.folds.or(file.folds).unwrap_or(5);
    let cv_seed = args.cv_seed.or(file.cv_seed).unwrap_or(0);
    let base = solver_config(&args.solver, &file, dims[0])?;

    let mut reports: Vec<EvaluationReport> = Vec::new();
    for &method in &methods {
        for &m in &dims {
            let mut report = crate::eval::cross_validate(&data, method, m, folds, cv_seed, &base)?;
            if args.no_timing {
                report.wall_time_s.clear();
            }
            reports.push(report);
        }
    }
    let mut out = json!({ "command": "eval", "reports": reports });

    if let Some(spec) = args.corrupt.as_deref().or(file.corrupt.as_deref()) {
        let grid: CorruptionGrid = spec.parse().map_err(input)?;
        let mut rows = Vec::new();
        for &method in &methods {
            for &m in &dims {
                rows.extend(corruption_sweep(&data, method, m, &grid, folds, cv_seed, &base)?);
            }
        }
        out["corruption"] = json!(rows);
    }

    if let Some(path) = &args.table {
        let mut csv = String::from("method,m,mean,std,min_pairwise_distance\n");
        for r in &reports {
            csv.push_str(&format!(
                "{},{},{},{},{}\n",
                r.method, r.projected_dim, r.mean_accuracy, r.std_accuracy, r.min_pairwise_distance
            ));
        }
        write_file(path, csv.as_bytes())?;
    }
    if let Some(path) = &args.output {
        let mut text = serde_json::to_string_pretty(&out).expect("report serializes");
        text.push('\n');
        write_file(path, text.as_bytes())?;
    }
    Ok(out)
}

fn cmd_plot_data(args: &PlotArgs) -> Result<Value, CliError> {
    let file = FileConfig::load(args.config.as_deref()).map_err(input)?;
    let data = load_dataset(&args.data, &file)?;
    let text = std::fs::read_to_string(&args.model)
        .map_err(|e| input(format!("cannot read {}: {e}", args.model.display())))?;
    let snapshot = ModelSnapshot::from_json(&text).map_err(|e| input(format!("bad model {}: {e}", args.model.display())))?;
    let w = snapshot.matrix::<f64>().map_err(input)?;
    if w.nrows() != data.dim() {
        return Err(input(format!("model has d = {}, dataset has d = {}", w.nrows(), data.dim())));
    }
    let prefix = args.output.clone().unwrap_or_else(|| args.model.with_extension(""));
    let bins = args.bins.or(file.bins).unwrap_or(DEFAULT_BINS);
    if bins == 0 {
        return Err(input("bins must be positive"));
    }
    let files = export_projection_plot(&data, &w, &prefix, bins)?;
    let mut summary = json!({
        "command": "plot-data",
        "scatter": files.scatter.display().to_string(),
        "histogram": files.histogram.as_ref().map(|p| p.display().to_string()),
    });

    if !snapshot.objective_trace.is_empty() {
        let path = suffixed(&prefix, "_trace.csv");
        write_trace_csv(&path, &snapshot.objective_trace)
            .map_err(|e| input(format!("cannot write {}: {e}", path.display())))?;
        summary["trace"] = json!(path.display().to_string());
    }

    let max_dim = data.dim().min(data.class_count() - 1).max(1);
    let default_dims = format!("1..{max_dim}");
    let dims = dims_for(args.mpd_dims.as_deref().unwrap_or(&default_dims), data.dim())?;
    let runs = args.runs.or(file.runs).unwrap_or(100);
    let mut csv = String::from("m,min_pairwise_distance\n");
    for m in dims {
        let config = SolverConfig { target_dim: m, ..snapshot.config.clone() };
        let value = average_min_pairwise_distance(&data, snapshot.source, &config, runs)?;
        csv.push_str(&format!("{m},{value}\n"));
    }
    let mpd_path = suffixed(&prefix, "_mpd.csv");
    write_file(&mpd_path, csv.as_bytes())?;
    summary["min_pairwise_distance"] = json!(mpd_path.display().to_string());
    Ok(summary)
}
