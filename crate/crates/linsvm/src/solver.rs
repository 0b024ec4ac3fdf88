//! Shared optimization state and the coordinate-level mathematics used by
//! both training engines: dual gradient, clipped sub-problem step, weight
//! maintenance, gain, dual objective, and KKT diagnostics.
//!
//! The dual problem maximizes
//! `W(a) = sum_i a_i - 1/2 ||sum_i y_i a_i x_i||^2` subject to
//! `0 <= a_i <= C`, and the primal weights satisfy `w = sum_i y_i a_i x_i`.

use serde::{Deserialize, Serialize};

use crate::data::Dataset;
use crate::error::{Error, Result};

/// Parameters shared by both solvers.
#[derive(Debug, Clone)]
pub struct SolverConfig {
    /// Regularization parameter: the upper box bound on each dual variable.
    pub c: f64,
    /// Stopping tolerance on the in-sweep violation measure.
    pub epsilon: f64,
    /// Outer-iteration cap; `None` runs until the stopping criterion fires.
    pub max_outer_iterations: Option<u64>,
    /// Seed for sweep shuffling and schedule rounding.
    pub seed: u64,
    /// Optional wall-clock budget in seconds, checked between sweeps.
    pub deadline: Option<f64>,
}

impl SolverConfig {
    pub fn new(c: f64, epsilon: f64) -> Self {
        Self {
            c,
            epsilon,
            max_outer_iterations: None,
            seed: 0,
            deadline: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_max_outer_iterations(mut self, cap: u64) -> Self {
        self.max_outer_iterations = Some(cap);
        self
    }

    pub fn with_deadline(mut self, seconds: f64) -> Self {
        self.deadline = Some(seconds);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "C must be a positive finite value, got {}",
                self.c
            )));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "epsilon must be a positive finite value, got {}",
                self.epsilon
            )));
        }
        if let Some(cap) = self.max_outer_iterations {
            if cap == 0 {
                return Err(Error::InvalidParameter(
                    "max outer iterations must be positive".into(),
                ));
            }
        }
        if let Some(deadline) = self.deadline {
            if !(deadline > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "deadline must be positive, got {deadline}"
                )));
            }
        }
        Ok(())
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self::new(1.0, 0.01)
    }
}

/// Why a solver run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    /// The stopping criterion was satisfied.
    Converged,
    /// The outer-iteration cap was reached first.
    IterationCap,
    /// The wall-clock deadline expired first.
    Deadline,
}

/// Summary of one training run. Wall time covers only the core
/// optimization loop; data loading and diagnostics are excluded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainingReport {
    pub wall_time_seconds: f64,
    pub steps: u64,
    pub outer_iterations: u64,
    pub dual_objective: f64,
    pub exact_max_kkt_violation: f64,
    pub converged: bool,
    pub stop_reason: StopReason,
}

/// Mutable state of one solver run: dual variables, the maintained primal
/// weight vector, and progress counters.
#[derive(Debug, Clone)]
pub struct SolverState {
    alpha: Vec<f64>,
    w: Vec<f64>,
    steps: u64,
    outer_iterations: u64,
}

impl SolverState {
    /// Cold start: `alpha = 0`, `w = 0`. Examples with zero norm are pinned
    /// at their analytic optimum `alpha = C` immediately (their gradient is
    /// constantly 1) and must be excluded from all sweeps.
    pub fn new(data: &Dataset, c: f64) -> Self {
        let alpha = (0..data.len())
            .map(|i| if data.squared_norm(i) == 0.0 { c } else { 0.0 })
            .collect();
        Self {
            alpha,
            w: vec![0.0; data.dimension()],
            steps: 0,
            outer_iterations: 0,
        }
    }

    /// State at a given dual point: weights are accumulated from scratch as
    /// `w = sum_i y_i alpha_i x_i`.
    pub fn with_dual_variables(data: &Dataset, alpha: Vec<f64>, c: f64) -> Result<Self> {
        if alpha.len() != data.len() {
            return Err(Error::InvalidParameter(format!(
                "{} dual variables for {} examples",
                alpha.len(),
                data.len()
            )));
        }
        if let Some(bad) = alpha.iter().find(|&&a| !(0.0..=c).contains(&a)) {
            return Err(Error::InvalidParameter(format!(
                "dual variable {bad} outside [0, {c}]"
            )));
        }
        let mut w = vec![0.0; data.dimension()];
        for (i, &a) in alpha.iter().enumerate() {
            if a != 0.0 {
                data.example(i).add_scaled(&mut w, data.label(i) * a);
            }
        }
        Ok(Self {
            alpha,
            w,
            steps: 0,
            outer_iterations: 0,
        })
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    /// The maintained weight vector `w = sum_i y_i alpha_i x_i`.
    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn outer_iterations(&self) -> u64 {
        self.outer_iterations
    }

    pub(crate) fn begin_outer_iteration(&mut self) {
        self.outer_iterations += 1;
    }

    /// Dual gradient `g_i = 1 - y_i <x_i, w>`, touching only the non-zero
    /// entries of `x_i`.
    pub fn gradient(&self, i: usize, data: &Dataset) -> f64 {
        1.0 - data.label(i) * data.example(i).dot_dense(&self.w)
    }

    /// Solves the one-variable sub-problem for `i` given its gradient:
    /// clips `alpha_i + g_i / ||x_i||^2` back into `[0, C]`, applies the
    /// resulting step `mu` to `alpha_i` and to the maintained weights, and
    /// counts the step. Returns `mu`.
    ///
    /// Clamping the new `alpha` (rather than `mu`) keeps box feasibility
    /// exact in floating point.
    pub fn coordinate_step(&mut self, i: usize, g: f64, c: f64, data: &Dataset) -> f64 {
        let squared_norm = data.squared_norm(i);
        debug_assert!(squared_norm > 0.0, "coordinate step on zero-norm example {i}");
        let old = self.alpha[i];
        let new = (old + g / squared_norm).clamp(0.0, c);
        let mu = new - old;
        self.alpha[i] = new;
        if mu != 0.0 {
            data.example(i).add_scaled(&mut self.w, mu * data.label(i));
        }
        self.steps += 1;
        mu
    }
}

/// Dual objective gain of a coordinate step:
/// `delta = mu * (g_i - mu/2 * ||x_i||^2)`.
pub fn gain(mu: f64, g: f64, squared_norm: f64) -> f64 {
    mu * (g - 0.5 * mu * squared_norm)
}

/// Per-variable violation of the optimality conditions: `|g|` for interior
/// variables, `max(0, g)` at the lower bound, `max(0, -g)` at the upper.
pub fn kkt_violation(alpha: f64, g: f64, c: f64) -> f64 {
    if alpha <= 0.0 {
        g.max(0.0)
    } else if alpha >= c {
        (-g).max(0.0)
    } else {
        g.abs()
    }
}

/// Dual objective `W(alpha)`, computed from a freshly accumulated weight
/// sum rather than the maintained `w`, so it can serve as an independent
/// check on incremental bookkeeping.
pub fn dual_objective(state: &SolverState, data: &Dataset) -> f64 {
    let mut weights = vec![0.0; data.dimension()];
    let mut alpha_sum = 0.0;
    for i in 0..data.len() {
        let a = state.alpha()[i];
        alpha_sum += a;
        if a != 0.0 {
            data.example(i).add_scaled(&mut weights, data.label(i) * a);
        }
    }
    alpha_sum - 0.5 * weights.iter().map(|v| v * v).sum::<f64>()
}

/// Recomputes every gradient and returns the largest KKT violation: the
/// post-training ground-truth optimality certificate (an O(l*d) scan).
pub fn exact_max_violation(state: &SolverState, data: &Dataset, c: f64) -> f64 {
    (0..data.len())
        .map(|i| kkt_violation(state.alpha()[i], state.gradient(i, data), c))
        .fold(0.0, f64::max)
}

/// Indices that take part in sweeps: everything except zero-norm examples.
pub(crate) fn sweep_indices(data: &Dataset) -> Vec<usize> {
    (0..data.len())
        .filter(|&i| data.squared_norm(i) > 0.0)
        .collect()
}

pub(crate) fn make_report(
    state: &SolverState,
    data: &Dataset,
    c: f64,
    wall_time_seconds: f64,
    stop_reason: StopReason,
) -> TrainingReport {
    TrainingReport {
        wall_time_seconds,
        steps: state.steps(),
        outer_iterations: state.outer_iterations(),
        dual_objective: dual_objective(state, data),
        exact_max_kkt_violation: exact_max_violation(state, data, c),
        converged: stop_reason == StopReason::Converged,
        stop_reason,
    }
}

/// Progress notifications emitted by the instrumented solver entry points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SolveEvent {
    /// A coordinate step was taken on `index` with gradient `g`, moving the
    /// dual variable by `mu`.
    Step { index: usize, g: f64, mu: f64 },
    /// The uniform-sweep engine removed `index` from its active set.
    Shrunk { index: usize },
    /// An outer iteration finished.
    SweepEnd { sweep: u64 },
    /// The working set was restored to full strength: the uniform-sweep
    /// engine reset its active set, or the adaptive engine reset its
    /// preferences to uniform.
    ActiveReset,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{generate_synthetic, Dataset, SparseVector};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dataset(rows: &[(f64, &[(u32, f64)])]) -> Dataset {
        let examples = rows
            .iter()
            .map(|(_, entries)| SparseVector::new(entries.iter().copied()))
            .collect();
        let labels = rows.iter().map(|(y, _)| *y).collect();
        Dataset::new(examples, labels).unwrap()
    }

    /// Literal double-sum evaluation of the dual objective,
    /// `sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j <x_i, x_j>`, used to
    /// cross-check the weight-sum route.
    fn dual_objective_double_sum(state: &SolverState, data: &Dataset) -> f64 {
        let mut linear = 0.0;
        let mut quadratic = 0.0;
        for i in 0..data.len() {
            linear += state.alpha()[i];
            for j in 0..data.len() {
                let mut dot = 0.0;
                for (idx_i, val_i) in data.example(i).iter() {
                    for (idx_j, val_j) in data.example(j).iter() {
                        if idx_i == idx_j {
                            dot += val_i * val_j;
                        }
                    }
                }
                quadratic +=
                    state.alpha()[i] * state.alpha()[j] * data.label(i) * data.label(j) * dot;
            }
        }
        linear - 0.5 * quadratic
    }

    #[test]
    fn gradient_is_one_at_cold_start() {
        let data = dataset(&[(1.0, &[(0, 0.5)]), (-1.0, &[(1, 2.0)])]);
        let state = SolverState::new(&data, 1.0);
        for i in 0..data.len() {
            assert_eq!(state.gradient(i, &data), 1.0);
        }
    }

    #[test]
    fn gradient_matches_hand_evaluations() {
        let data = dataset(&[(1.0, &[(0, 1.0)]), (-1.0, &[(0, 2.0)])]);
        let mut state = SolverState::new(&data, 10.0);
        // Drive w to (1, 0) through a unit step on the first example.
        let g = state.gradient(0, &data);
        state.coordinate_step(0, g, 10.0, &data);
        assert_eq!(state.weights(), &[1.0]);
        // Margin exactly 1 for the first example.
        assert_eq!(state.gradient(0, &data), 0.0);
        // y = -1, x = (2, 0), w = (1, 0): g = 1 - (-1)(2) = 3.
        assert_eq!(state.gradient(1, &data), 3.0);
    }

    #[test]
    fn coordinate_step_reaches_unclipped_optimum() {
        let data = dataset(&[(1.0, &[(0, 1.0)])]);
        let mut state = SolverState::new(&data, 1.0);
        let g = state.gradient(0, &data);
        assert_eq!(g, 1.0);
        let mu = state.coordinate_step(0, g, 1.0, &data);
        assert_eq!(mu, 1.0);
        assert_eq!(state.alpha(), &[1.0]);
        assert_eq!(state.weights(), &[1.0]);
        assert_eq!(state.steps(), 1);
    }

    #[test]
    fn coordinate_step_clamps_at_upper_bound() {
        let data = dataset(&[(1.0, &[(0, 1.0)])]);
        let mut state = SolverState::new(&data, 1.0);
        state.coordinate_step(0, 1.0, 1.0, &data);
        // At alpha = C with positive gradient nothing moves but the counter.
        let mu = state.coordinate_step(0, 0.5, 1.0, &data);
        assert_eq!(mu, 0.0);
        assert_eq!(state.alpha(), &[1.0]);
        assert_eq!(state.weights(), &[1.0]);
        assert_eq!(state.steps(), 2);
    }

    #[test]
    fn coordinate_step_clamps_at_lower_bound() {
        let data = dataset(&[(1.0, &[(0, 1.0)])]);
        let mut state = SolverState::new(&data, 1.0);
        state.coordinate_step(0, 0.5, 1.0, &data);
        assert_eq!(state.alpha(), &[0.5]);
        // g = -2 with ||x||^2 = 1 asks for a -2 step; the box stops it at 0.
        let mu = state.coordinate_step(0, -2.0, 1.0, &data);
        assert_eq!(mu, -0.5);
        assert_eq!(state.alpha(), &[0.0]);
    }

    #[test]
    fn gain_examples() {
        assert_eq!(gain(0.0, 3.0, 2.0), 0.0);
        // One-example problem: W(1) - W(0) = 0.5 exactly.
        let data = dataset(&[(1.0, &[(0, 1.0)])]);
        let mut state = SolverState::new(&data, 1.0);
        let before = dual_objective(&state, &data);
        let g = state.gradient(0, &data);
        let mu = state.coordinate_step(0, g, 1.0, &data);
        let after = dual_objective(&state, &data);
        assert_eq!(gain(mu, g, 1.0), 0.5);
        assert_eq!(after - before, 0.5);
        // Unclipped steps gain g^2 / (2 ||x||^2).
        for &(g, sq) in &[(0.7, 2.0), (-1.3, 0.5), (2.5, 4.0)] {
            let mu = g / sq;
            let expected = g * g / (2.0 * sq);
            assert!((gain(mu, g, sq) - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn dual_objective_examples() {
        let data = dataset(&[(1.0, &[(0, 1.0)])]);
        let state = SolverState::new(&data, 1.0);
        assert_eq!(dual_objective(&state, &data), 0.0);
        let mut state = state;
        state.coordinate_step(0, 1.0, 1.0, &data);
        assert_eq!(dual_objective(&state, &data), 0.5);
    }

    #[test]
    fn dual_objective_matches_double_sum_oracle() {
        let data = generate_synthetic(3, 12, 6, 0.6, 0.3).unwrap();
        let c = 2.0;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let mut state = SolverState::new(&data, c);
        for _ in 0..60 {
            let i = rng.random_range(0..data.len());
            let g = state.gradient(i, &data);
            state.coordinate_step(i, g, c, &data);
        }
        let fast = dual_objective(&state, &data);
        let slow = dual_objective_double_sum(&state, &data);
        assert!((fast - slow).abs() <= 1e-9 * (1.0 + slow.abs()), "{fast} vs {slow}");
    }

    #[test]
    fn dual_objective_bounded_by_c_times_l() {
        let data = generate_synthetic(8, 30, 8, 0.5, 0.4).unwrap();
        let c = 1.5;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut state = SolverState::new(&data, c);
        for _ in 0..200 {
            let i = rng.random_range(0..data.len());
            let g = state.gradient(i, &data);
            state.coordinate_step(i, g, c, &data);
            assert!(dual_objective(&state, &data) <= c * data.len() as f64);
        }
    }

    #[test]
    fn kkt_violation_cases() {
        assert_eq!(kkt_violation(0.0, -0.5, 1.0), 0.0);
        assert_eq!(kkt_violation(0.0, 0.7, 1.0), 0.7);
        assert_eq!(kkt_violation(0.5, -0.3, 1.0), 0.3);
        assert_eq!(kkt_violation(0.5, 0.3, 1.0), 0.3);
        assert_eq!(kkt_violation(1.0, 0.4, 1.0), 0.0);
        assert_eq!(kkt_violation(1.0, -0.4, 1.0), 0.4);
    }

    #[test]
    fn exact_violation_is_one_at_cold_start() {
        let data = generate_synthetic(2, 25, 8, 0.7, 0.2).unwrap();
        let state = SolverState::new(&data, 1.0);
        assert_eq!(exact_max_violation(&state, &data, 1.0), 1.0);
    }

    #[test]
    fn exact_violation_vanishes_at_one_example_optimum() {
        let data = dataset(&[(1.0, &[(0, 2.0)])]);
        // Unclipped optimum: alpha* = 1 / ||x||^2 = 0.25 with C large.
        let mut state = SolverState::new(&data, 10.0);
        let g = state.gradient(0, &data);
        state.coordinate_step(0, g, 10.0, &data);
        assert!(exact_max_violation(&state, &data, 10.0) <= 1e-12);
    }

    #[test]
    fn zero_norm_examples_are_pinned_and_skipped() {
        let data = dataset(&[(1.0, &[]), (-1.0, &[(0, 1.0)])]);
        let c = 3.0;
        let state = SolverState::new(&data, c);
        assert_eq!(state.alpha(), &[3.0, 0.0]);
        assert_eq!(sweep_indices(&data), vec![1]);
        // The pinned variable is optimal: g = 1, alpha = C, violation 0.
        assert_eq!(kkt_violation(c, state.gradient(0, &data), c), 0.0);
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(1.0, 0.01).validate().is_ok());
        assert!(SolverConfig::new(0.0, 0.01).validate().is_err());
        assert!(SolverConfig::new(-1.0, 0.01).validate().is_err());
        assert!(SolverConfig::new(1.0, 0.0).validate().is_err());
        assert!(SolverConfig::new(f64::NAN, 0.01).validate().is_err());
        assert!(SolverConfig::new(1.0, 0.01).with_deadline(0.0).validate().is_err());
    }

    #[test]
    fn steps_never_leave_the_box() {
        let data = generate_synthetic(4, 40, 10, 0.5, 0.3).unwrap();
        let c = 0.7;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut state = SolverState::new(&data, c);
        for _ in 0..2000 {
            let i = rng.random_range(0..data.len());
            let g = state.gradient(i, &data) + rng.random::<f64>() - 0.5;
            state.coordinate_step(i, g, c, &data);
            assert!(state.alpha()[i] >= 0.0 && state.alpha()[i] <= c);
        }
    }
}
