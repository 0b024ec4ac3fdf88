//! Watch the engines work through the observer hook: hard shrinking
//! removes variables from the baseline's sweeps (and occasionally has to
//! reset), while the adaptive engine keeps visiting everything but shifts
//! its visit counts.
//!
//! ```bash
//! cargo run --example solver_events
//! ```

use linsvm::{
    avsf_solve_observed, baseline_solve_observed, generate_synthetic, SolveEvent, SolverConfig,
};

fn main() -> linsvm::Result<()> {
    let data = generate_synthetic(5, 600, 60, 0.2, 0.2)?;
    let config = SolverConfig::new(0.1, 0.001).with_seed(9);

    let mut shrunk = 0u64;
    let mut resets = 0u64;
    let mut steps_per_sweep: Vec<u64> = Vec::new();
    let mut current = 0u64;
    let (_, report) = baseline_solve_observed(&data, &config, &mut |event| match event {
        SolveEvent::Step { .. } => current += 1,
        SolveEvent::Shrunk { .. } => shrunk += 1,
        SolveEvent::SweepEnd { .. } => {
            steps_per_sweep.push(current);
            current = 0;
        }
        SolveEvent::ActiveReset => resets += 1,
    })?;
    println!(
        "baseline: {} sweeps, {} variables shrunk, {} full-set resets",
        report.outer_iterations, shrunk, resets
    );
    let smallest_sweep = steps_per_sweep.iter().min().copied().unwrap_or(0);
    println!(
        "          sweep cost fell from {} steps to {} at its smallest",
        steps_per_sweep.first().copied().unwrap_or(0),
        smallest_sweep
    );

    let mut visits = vec![0u64; data.len()];
    let (_, report) = avsf_solve_observed(&data, &config, &mut |event| {
        if let SolveEvent::Step { index, .. } = event {
            visits[index] += 1;
        }
    })?;
    visits.sort_unstable();
    println!(
        "avsf:     {} sweeps, every sweep costs {} steps",
        report.outer_iterations,
        data.len()
    );
    println!(
        "          per-variable visit spread: min {}, median {}, max {} (soft shrinking at work)",
        visits[0],
        visits[visits.len() / 2],
        visits[visits.len() - 1]
    );
    Ok(())
}
