//! Benchmark harness: runs both solvers over a grid of regularization
//! values and tolerances, averages timings over repeats, and emits CSV
//! records plus a human-readable comparison table (one time row and one
//! step-count row per solver).

use std::fmt;
use std::io::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::avsf::avsf_solve;
use crate::baseline::baseline_solve;
use crate::data::Dataset;
use crate::error::{Error, Result};
use crate::solver::{SolverConfig, SolverState, StopReason, TrainingReport};

/// Which variable-selection engine to train with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SolverKind {
    /// Uniform sweeps with hard shrinking.
    Baseline,
    /// Adaptive variable selection frequencies with soft shrinking.
    Avsf,
}

impl SolverKind {
    pub const ALL: [SolverKind; 2] = [SolverKind::Baseline, SolverKind::Avsf];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Baseline => "baseline",
            SolverKind::Avsf => "avsf",
        }
    }
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "baseline" => Ok(SolverKind::Baseline),
            "avsf" => Ok(SolverKind::Avsf),
            other => Err(Error::InvalidParameter(format!(
                "unknown solver {other:?} (expected baseline or avsf)"
            ))),
        }
    }
}

/// Trains with the chosen engine.
pub fn train(
    kind: SolverKind,
    data: &Dataset,
    config: &SolverConfig,
) -> Result<(SolverState, TrainingReport)> {
    match kind {
        SolverKind::Baseline => baseline_solve(data, config),
        SolverKind::Avsf => avsf_solve(data, config),
    }
}

/// The regularization grid used by `compare` unless overridden.
pub fn default_c_grid() -> Vec<f64> {
    vec![0.01, 0.1, 1.0, 10.0, 100.0, 1000.0]
}

/// The tolerance grid used by `compare` unless overridden.
pub fn default_epsilons() -> Vec<f64> {
    vec![0.01, 0.001]
}

/// One measured grid cell: a (dataset, C, solver, epsilon) combination,
/// averaged over its repeats.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRow {
    pub dataset: String,
    pub c: f64,
    pub solver: SolverKind,
    pub epsilon: f64,
    /// Mean core-loop wall time over the repeats.
    pub wall_time_seconds: f64,
    /// Mean step count over the repeats, rounded to nearest.
    pub steps: u64,
    pub dual_objective: f64,
    pub max_kkt_violation: f64,
    /// True only if every repeat converged.
    pub converged: bool,
    /// True if any repeat was cut off by the per-cell deadline; such times
    /// are lower bounds and are starred in the rendered table.
    pub deadline_hit: bool,
}

/// Grid settings for [`run_grid`].
#[derive(Debug, Clone)]
pub struct GridOptions {
    pub c_grid: Vec<f64>,
    pub epsilons: Vec<f64>,
    pub repeats: u32,
    pub seed: u64,
    pub max_outer_iterations: Option<u64>,
    /// Per-cell wall-clock budget in seconds.
    pub deadline: Option<f64>,
}

impl Default for GridOptions {
    fn default() -> Self {
        Self {
            c_grid: default_c_grid(),
            epsilons: default_epsilons(),
            repeats: 1,
            seed: 0,
            max_outer_iterations: None,
            deadline: None,
        }
    }
}

impl GridOptions {
    pub fn validate(&self) -> Result<()> {
        if self.c_grid.is_empty() || self.epsilons.is_empty() {
            return Err(Error::InvalidParameter(
                "the C grid and epsilon list must be non-empty".into(),
            ));
        }
        if self.repeats == 0 {
            return Err(Error::InvalidParameter("repeats must be positive".into()));
        }
        for &c in &self.c_grid {
            SolverConfig::new(c, 1.0).validate()?;
        }
        for &eps in &self.epsilons {
            SolverConfig::new(1.0, eps).validate()?;
        }
        Ok(())
    }
}

/// Runs one grid cell: `repeats` runs with seeds `seed + r`, averaged.
pub fn run_cell(
    dataset_name: &str,
    data: &Dataset,
    kind: SolverKind,
    c: f64,
    epsilon: f64,
    options: &GridOptions,
) -> Result<ComparisonRow> {
    let mut total_time = 0.0;
    let mut total_steps = 0u64;
    let mut last_objective = 0.0;
    let mut worst_violation = 0.0f64;
    let mut converged = true;
    let mut deadline_hit = false;
    for repeat in 0..options.repeats {
        let mut config = SolverConfig::new(c, epsilon).with_seed(options.seed + repeat as u64);
        config.max_outer_iterations = options.max_outer_iterations;
        config.deadline = options.deadline;
        let (_, report) = train(kind, data, &config)?;
        total_time += report.wall_time_seconds;
        total_steps += report.steps;
        last_objective = report.dual_objective;
        worst_violation = worst_violation.max(report.exact_max_kkt_violation);
        converged &= report.converged;
        deadline_hit |= report.stop_reason == StopReason::Deadline;
    }
    let repeats = options.repeats as f64;
    Ok(ComparisonRow {
        dataset: dataset_name.to_string(),
        c,
        solver: kind,
        epsilon,
        wall_time_seconds: total_time / repeats,
        steps: ((total_steps as f64 / repeats).round()) as u64,
        dual_objective: last_objective,
        max_kkt_violation: worst_violation,
        converged,
        deadline_hit,
    })
}

/// Runs both solvers over every (epsilon, C) combination, sequentially so
/// cell timings do not disturb each other. `progress` receives each row as
/// it completes.
pub fn run_grid(
    dataset_name: &str,
    data: &Dataset,
    options: &GridOptions,
    mut progress: impl FnMut(&ComparisonRow),
) -> Result<Vec<ComparisonRow>> {
    options.validate()?;
    let mut rows = Vec::new();
    for &epsilon in &options.epsilons {
        for &c in &options.c_grid {
            for kind in SolverKind::ALL {
                let row = run_cell(dataset_name, data, kind, c, epsilon, options)?;
                progress(&row);
                rows.push(row);
            }
        }
    }
    Ok(rows)
}

/// The fixed CSV schema for comparison reports.
pub const CSV_HEADER: [&str; 9] = [
    "dataset",
    "C",
    "solver",
    "epsilon",
    "wall_time_seconds",
    "steps",
    "dual_objective",
    "max_kkt_violation",
    "converged",
];

/// Writes rows under the fixed header. Times carry millisecond resolution.
pub fn write_csv(rows: &[ComparisonRow], writer: impl std::io::Write) -> Result<()> {
    let mut csv_writer = csv::Writer::from_writer(writer);
    csv_writer.write_record(CSV_HEADER)?;
    for row in rows {
        csv_writer.write_record([
            row.dataset.as_str(),
            &row.c.to_string(),
            row.solver.name(),
            &row.epsilon.to_string(),
            &format!("{:.3}", row.wall_time_seconds),
            &row.steps.to_string(),
            &row.dual_objective.to_string(),
            &row.max_kkt_violation.to_string(),
            &row.converged.to_string(),
        ])?;
    }
    csv_writer.flush()?;
    Ok(())
}

impl From<csv::Error> for Error {
    fn from(err: csv::Error) -> Self {
        match err.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            other => Error::InvalidParameter(format!("csv error: {other:?}")),
        }
    }
}

/// Renders rows grouped by (dataset, epsilon): a column per C value and,
/// per solver, one wall-time row and one step-count row. Deadline-capped
/// cells are starred; unconverged ones are marked.
pub fn render_table(rows: &[ComparisonRow]) -> String {
    let mut out = Vec::new();
    let mut groups: Vec<(String, f64)> = Vec::new();
    for row in rows {
        let key = (row.dataset.clone(), row.epsilon);
        if !groups.contains(&key) {
            groups.push(key);
        }
    }
    for (dataset, epsilon) in groups {
        let group: Vec<&ComparisonRow> = rows
            .iter()
            .filter(|r| r.dataset == dataset && r.epsilon == epsilon)
            .collect();
        let mut c_values: Vec<f64> = group.iter().map(|r| r.c).collect();
        c_values.sort_by(f64::total_cmp);
        c_values.dedup();

        let _ = writeln!(
            out,
            "dataset {dataset}   epsilon {epsilon}   (seconds / update steps; * = deadline lower bound, ! = unconverged)"
        );
        let _ = write!(out, "{:<10} {:<6}", "solver", "");
        for c in &c_values {
            let _ = write!(out, " {:>12}", format!("C={c}"));
        }
        let _ = writeln!(out);
        for kind in SolverKind::ALL {
            let _ = write!(out, "{:<10} {:<6}", kind.name(), "time");
            for &c in &c_values {
                let cell = group.iter().find(|r| r.solver == kind && r.c == c);
                let _ = write!(out, " {:>12}", cell.map_or("-".into(), |r| format_time_cell(r)));
            }
            let _ = writeln!(out);
            let _ = write!(out, "{:<10} {:<6}", "", "steps");
            for &c in &c_values {
                let cell = group.iter().find(|r| r.solver == kind && r.c == c);
                let _ = write!(
                    out,
                    " {:>12}",
                    cell.map_or("-".into(), |r| format!("{:.2e}", r.steps as f64))
                );
            }
            let _ = writeln!(out);
        }
        let _ = writeln!(out);
    }
    String::from_utf8(out).expect("table output is UTF-8")
}

fn format_time_cell(row: &ComparisonRow) -> String {
    let mut cell = format!("{:.3}", row.wall_time_seconds);
    if row.deadline_hit {
        cell.push('*');
    } else if !row.converged {
        cell.push('!');
    }
    cell
}
