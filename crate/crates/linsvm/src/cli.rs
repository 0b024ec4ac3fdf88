//! Command-line front end: `train`, `compare`, `predict`, and `gen-data`
//! subcommands over the library. The binary in `src/main.rs` is a thin
//! wrapper around [`run`].

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::bench::{self, GridOptions, SolverKind};
use crate::data;
use crate::error::{Error, Result};
use crate::model::Model;
use crate::solver::{SolverConfig, TrainingReport};

#[derive(Debug, Parser)]
#[command(
    name = "linsvm",
    version,
    about = "Linear SVM training via dual coordinate descent, with uniform-sweep and adaptive-frequency engines"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train one model and optionally persist it with its report.
    Train(TrainArgs),
    /// Run both solvers over a C/epsilon grid and tabulate the results.
    Compare(CompareArgs),
    /// Score a dataset with a saved model.
    Predict(PredictArgs),
    /// Write a synthetic dataset in libsvm format.
    GenData(GenDataArgs),
}

/// Outer-iteration budget: a positive integer or `unbounded`.
#[derive(Debug, Clone, Copy)]
struct OuterCap(Option<u64>);

fn parse_outer_cap(text: &str) -> std::result::Result<OuterCap, String> {
    if text == "unbounded" {
        return Ok(OuterCap(None));
    }
    match text.parse::<u64>() {
        Ok(n) if n > 0 => Ok(OuterCap(Some(n))),
        _ => Err(format!("expected a positive integer or \"unbounded\", got {text:?}")),
    }
}

#[derive(Debug, Args)]
struct TrainArgs {
    /// Training data in libsvm format.
    #[arg(long)]
    data: PathBuf,
    /// Variable-selection engine.
    #[arg(long, value_enum)]
    solver: SolverKind,
    /// Regularization parameter (upper bound on each dual variable).
    #[arg(long)]
    c: f64,
    /// Stopping tolerance.
    #[arg(long, default_value_t = 0.01)]
    epsilon: f64,
    /// Seed for sweep shuffling and schedule rounding.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Outer-iteration cap, or "unbounded".
    #[arg(long, value_parser = parse_outer_cap, default_value = "unbounded")]
    max_outer: OuterCap,
    /// Write the trained model here.
    #[arg(long)]
    model_out: Option<PathBuf>,
    /// Write a JSON training record here.
    #[arg(long)]
    report_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct CompareArgs {
    /// Training data in libsvm format.
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated C values.
    #[arg(long, value_delimiter = ',', default_values_t = bench::default_c_grid())]
    c_grid: Vec<f64>,
    /// Comma-separated stopping tolerances.
    #[arg(long, value_delimiter = ',', default_values_t = bench::default_epsilons())]
    epsilons: Vec<f64>,
    /// Independent runs per cell; timings are averaged.
    #[arg(long, default_value_t = 1)]
    repeats: u32,
    /// Base seed; repeat r uses seed + r.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Outer-iteration cap per run, or "unbounded".
    #[arg(long, value_parser = parse_outer_cap, default_value = "unbounded")]
    max_outer: OuterCap,
    /// Per-cell wall-clock budget in seconds; capped cells are starred.
    #[arg(long)]
    deadline: Option<f64>,
    /// Write the CSV report here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct PredictArgs {
    /// A model written by `train --model-out`.
    #[arg(long)]
    model: PathBuf,
    /// Data to score, in libsvm format.
    #[arg(long)]
    data: PathBuf,
    /// Write one predicted label per line here.
    #[arg(long)]
    predictions_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenDataArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of examples.
    #[arg(long)]
    n: usize,
    /// Feature-space dimension.
    #[arg(long)]
    d: usize,
    /// Expected fraction of non-zero coordinates per example, in (0, 1].
    #[arg(long, default_value_t = 1.0)]
    density: f64,
    /// Label-flip probability.
    #[arg(long, default_value_t = 0.0)]
    noise: f64,
    /// Output path.
    #[arg(long)]
    out: PathBuf,
}

/// The JSON record written by `train --report-out`.
#[derive(Debug, Serialize, Deserialize)]
pub struct TrainRecord {
    pub dataset: String,
    pub solver: SolverKind,
    pub c: f64,
    pub epsilon: f64,
    pub seed: u64,
    #[serde(flatten)]
    pub report: TrainingReport,
}

/// Parses `std::env::args` and executes; errors go to stderr with a
/// non-zero exit status.
pub fn run() -> ExitCode {
    match Cli::try_parse() {
        Ok(cli) => match execute(cli) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err}");
                ExitCode::FAILURE
            }
        },
        // Clap prints its own message (also for --help/--version) and
        // picks the conventional status.
        Err(err) => ExitCode::from(err.exit_code() as u8),
    }
}

/// Test entry point: parses and executes the given argument vector.
pub fn run_from<I, T>(args: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args)
        .map_err(|e| Error::InvalidParameter(e.to_string()))?;
    execute(cli)
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train(args) => train(args),
        Command::Compare(args) => compare(args),
        Command::Predict(args) => predict(args),
        Command::GenData(args) => gen_data(args),
    }
}

fn dataset_label(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn train(args: TrainArgs) -> Result<()> {
    let config = SolverConfig {
        c: args.c,
        epsilon: args.epsilon,
        max_outer_iterations: args.max_outer.0,
        seed: args.seed,
        deadline: None,
    };
    config.validate()?;
    let data = data::load_libsvm(&args.data)?;
    let (state, report) = bench::train(args.solver, &data, &config)?;

    println!(
        "trained {} on {}: {} examples, {} features",
        args.solver,
        dataset_label(&args.data),
        data.len(),
        data.dimension()
    );
    println!(
        "steps {}  outer iterations {}  core-loop time {:.3}s  dual objective {:.6}  max KKT violation {:.3e}  converged {}",
        report.steps,
        report.outer_iterations,
        report.wall_time_seconds,
        report.dual_objective,
        report.exact_max_kkt_violation,
        report.converged
    );

    if let Some(path) = &args.model_out {
        let model = Model {
            weights: state.weights().to_vec(),
            solver: args.solver.name().to_string(),
            c: args.c,
            epsilon: args.epsilon,
            seed: args.seed,
        };
        model.save(path)?;
        println!("model written to {}", path.display());
    }
    if let Some(path) = &args.report_out {
        let record = TrainRecord {
            dataset: dataset_label(&args.data),
            solver: args.solver,
            c: args.c,
            epsilon: args.epsilon,
            seed: args.seed,
            report,
        };
        let file = File::create(path)?;
        serde_json::to_writer_pretty(BufWriter::new(file), &record)
            .map_err(|e| Error::InvalidParameter(format!("cannot write report: {e}")))?;
        println!("report written to {}", path.display());
    }
    Ok(())
}

fn compare(args: CompareArgs) -> Result<()> {
    let options = GridOptions {
        c_grid: args.c_grid,
        epsilons: args.epsilons,
        repeats: args.repeats,
        seed: args.seed,
        max_outer_iterations: args.max_outer.0,
        deadline: args.deadline,
    };
    options.validate()?;
    if let Some(deadline) = options.deadline {
        if !(deadline > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "deadline must be positive, got {deadline}"
            )));
        }
    }
    let data = data::load_libsvm(&args.data)?;
    let name = dataset_label(&args.data);
    let rows = bench::run_grid(&name, &data, &options, |row| {
        eprintln!(
            "  {} C={} epsilon={}: {:.3}s, {} steps, converged {}",
            row.solver, row.c, row.epsilon, row.wall_time_seconds, row.steps, row.converged
        );
    })?;

    print!("{}", bench::render_table(&rows));
    match &args.out {
        Some(path) => {
            let file = File::create(path)?;
            bench::write_csv(&rows, BufWriter::new(file))?;
            eprintln!("csv written to {}", path.display());
        }
        None => {
            let mut buf = Vec::new();
            bench::write_csv(&rows, &mut buf)?;
            print!("{}", String::from_utf8_lossy(&buf));
        }
    }
    Ok(())
}

fn predict(args: PredictArgs) -> Result<()> {
    let model = Model::load(&args.model)?;
    let data = data::load_libsvm(&args.data)?;
    let mut predictions = Vec::with_capacity(data.len());
    let mut correct = 0usize;
    for i in 0..data.len() {
        let label = model.predict(data.example(i));
        if label == data.label(i) {
            correct += 1;
        }
        predictions.push(label);
    }
    println!(
        "accuracy {:.4} ({}/{} correct)",
        correct as f64 / data.len() as f64,
        correct,
        data.len()
    );
    if let Some(path) = &args.predictions_out {
        let file = File::create(path)?;
        let mut writer = BufWriter::new(file);
        for label in predictions {
            writeln!(writer, "{}", if label > 0.0 { "+1" } else { "-1" })?;
        }
        writer.flush()?;
        println!("predictions written to {}", path.display());
    }
    Ok(())
}

fn gen_data(args: GenDataArgs) -> Result<()> {
    let data = data::generate_synthetic(args.seed, args.n, args.d, args.density, args.noise)?;
    data::save_libsvm(&data, &args.out)?;
    println!(
        "wrote {} examples ({} features, seed {}) to {}",
        data.len(),
        data.dimension(),
        args.seed,
        args.out.display()
    );
    Ok(())
}
