//! Linear SVM training via dual coordinate descent.
//!
//! The dual of the L1-loss, L2-regularized linear SVM is a box-constrained
//! quadratic program with one variable per training example. Keeping the
//! primal weight vector `w = sum_i y_i alpha_i x_i` up to date makes every
//! coordinate update an O(nnz) operation, so the bottleneck becomes *which*
//! variable to update next. This crate ships two interchangeable engines:
//!
//! - [`baseline_solve`]: randomized uniform sweeps over an active set with
//!   hard shrinking and a verification pass before termination.
//! - [`avsf_solve`]: adaptive variable selection frequencies (AVSF). Each
//!   variable carries a preference that grows when its steps gain more than
//!   a fading reference gain and shrinks toward a floor when they gain
//!   less; per-sweep schedules realize the preferences, which soft-shrinks
//!   bound variables without ever removing them.
//!
//! Both engines share the same state, stopping tolerance semantics, and
//! diagnostics, so their reports are directly comparable; the [`bench`]
//! module runs both over a C grid the way the `linsvm compare` subcommand
//! does.
//!
//! ```
//! use linsvm::{avsf_solve, baseline_solve, generate_synthetic, SolverConfig};
//!
//! let data = generate_synthetic(7, 200, 20, 0.3, 0.1).unwrap();
//! let config = SolverConfig::new(10.0, 0.01).with_seed(1);
//! let (_, fast) = avsf_solve(&data, &config).unwrap();
//! let (_, reference) = baseline_solve(&data, &config).unwrap();
//! assert!(fast.converged && reference.converged);
//! ```
//!
//! The `examples/` directory walks through each capability: training,
//! benchmark grids, schedule construction, libsvm round trips, and solver
//! instrumentation.

pub mod avsf;
pub mod baseline;
pub mod bench;
pub mod cli;
pub mod data;
mod error;
pub mod model;
pub mod solver;

pub use avsf::{avsf_solve, avsf_solve_observed, build_schedule, PreferenceRule, PreferenceState};
pub use baseline::{baseline_solve, baseline_solve_observed};
pub use bench::SolverKind;
pub use data::{generate_synthetic, load_libsvm, parse_libsvm, save_libsvm, write_libsvm};
pub use data::{Dataset, SparseVector};
pub use error::{Error, Result};
pub use model::Model;
pub use solver::{
    dual_objective, exact_max_violation, gain, kkt_violation, SolveEvent, SolverConfig,
    SolverState, StopReason, TrainingReport,
};
