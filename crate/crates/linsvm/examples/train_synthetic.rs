//! Train both engines on the same synthetic problem and compare their
//! reports and final objectives.
//!
//! ```bash
//! cargo run --example train_synthetic
//! ```

use linsvm::{avsf_solve, baseline_solve, dual_objective, generate_synthetic, SolverConfig};

fn main() -> linsvm::Result<()> {
    let data = generate_synthetic(7, 500, 50, 0.2, 0.1)?;
    println!("training on {} examples, {} features", data.len(), data.dimension());

    let config = SolverConfig::new(10.0, 0.001).with_seed(1);

    let (base_state, base) = baseline_solve(&data, &config)?;
    println!(
        "baseline: {} steps over {} sweeps in {:.3}s, objective {:.4}, exact violation {:.2e}",
        base.steps,
        base.outer_iterations,
        base.wall_time_seconds,
        base.dual_objective,
        base.exact_max_kkt_violation
    );

    let (avsf_state, avsf) = avsf_solve(&data, &config)?;
    println!(
        "avsf:     {} steps over {} sweeps in {:.3}s, objective {:.4}, exact violation {:.2e}",
        avsf.steps,
        avsf.outer_iterations,
        avsf.wall_time_seconds,
        avsf.dual_objective,
        avsf.exact_max_kkt_violation
    );

    let w_base = dual_objective(&base_state, &data);
    let w_avsf = dual_objective(&avsf_state, &data);
    println!("objective difference |baseline - avsf| = {:.3e}", (w_base - w_avsf).abs());
    Ok(())
}
