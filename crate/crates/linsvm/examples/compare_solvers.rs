//! Run the benchmark grid over a C range and print the comparison table,
//! the way the `linsvm compare` subcommand does. Adaptive selection pulls
//! ahead as C grows; uniform sweeps with hard shrinking win at small C.
//!
//! ```bash
//! cargo run --release --example compare_solvers
//! ```

use linsvm::bench::{render_table, run_grid, write_csv, GridOptions};
use linsvm::generate_synthetic;

fn main() -> linsvm::Result<()> {
    let data = generate_synthetic(3, 1000, 250, 0.04, 0.15)?;
    let options = GridOptions {
        c_grid: vec![0.01, 1.0, 100.0, 1000.0],
        epsilons: vec![0.01],
        repeats: 1,
        seed: 1,
        ..GridOptions::default()
    };

    let rows = run_grid("synthetic", &data, &options, |row| {
        eprintln!(
            "  finished {} C={} : {:.3}s, {} steps",
            row.solver, row.c, row.wall_time_seconds, row.steps
        );
    })?;

    print!("\n{}", render_table(&rows));

    let mut csv = Vec::new();
    write_csv(&rows, &mut csv)?;
    println!("--- csv ---\n{}", String::from_utf8_lossy(&csv));
    Ok(())
}
