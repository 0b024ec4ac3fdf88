//! Dual coordinate descent with adaptive variable selection frequencies
//! (AVSF): per-variable preferences realized by a stochastic schedule,
//! gain-driven preference adaptation against a fading reference gain, and
//! soft shrinking by frequency reduction instead of removal.
//!
//! Termination follows a confirmation protocol: convergence detected under
//! adapted preferences is only accepted after one further sweep with the
//! preferences reset to uniform, which visits every variable exactly once.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::baseline::shuffle_sweep_order;
use crate::data::Dataset;
use crate::error::Result;
use crate::solver::{
    gain, make_report, sweep_indices, SolveEvent, SolverConfig, SolverState, StopReason,
    TrainingReport,
};

/// Multiplier on the relative gain surplus in the preference update.
pub const GAIN_SENSITIVITY: f64 = 0.2;
/// Lower clamp on preferences; keeps every variable visited occasionally.
pub const MIN_PREFERENCE: f64 = 0.05;
/// Upper clamp on preferences.
pub const MAX_PREFERENCE: f64 = 20.0;

/// How a step's gain is compared against the reference gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PreferenceRule {
    /// `h = c * (gain / reference - 1)`: scale-invariant under rescaling
    /// of the objective. The default.
    #[default]
    RelativeGain,
    /// `h = c * (gain - reference)`: an experimental alternative whose
    /// effect depends on the objective's scale.
    AbsoluteGain,
}

/// Per-variable selection preferences with their running sum and the
/// fading reference gain they are judged against.
#[derive(Debug, Clone)]
pub struct PreferenceState {
    preferences: Vec<f64>,
    preference_sum: f64,
    reference_gain: f64,
    first_sweep: bool,
    rule: PreferenceRule,
}

impl PreferenceState {
    /// Uniform preferences over `n` variables; the first sweep only
    /// calibrates the reference gain.
    pub fn new(n: usize) -> Self {
        Self::with_rule(n, PreferenceRule::default())
    }

    pub fn with_rule(n: usize, rule: PreferenceRule) -> Self {
        Self {
            preferences: vec![1.0; n],
            preference_sum: n as f64,
            reference_gain: 0.0,
            first_sweep: true,
            rule,
        }
    }

    pub fn len(&self) -> usize {
        self.preferences.len()
    }

    pub fn is_empty(&self) -> bool {
        self.preferences.is_empty()
    }

    pub fn preferences(&self) -> &[f64] {
        &self.preferences
    }

    pub fn preference_sum(&self) -> f64 {
        self.preference_sum
    }

    pub fn reference_gain(&self) -> f64 {
        self.reference_gain
    }

    pub fn is_first_sweep(&self) -> bool {
        self.first_sweep
    }

    /// Ends the calibration phase; later updates adapt the preferences.
    pub fn finish_first_sweep(&mut self) {
        self.first_sweep = false;
    }

    /// Resets preferences (but not the reference gain) to uniform.
    pub fn reset_uniform(&mut self) {
        self.preferences.fill(1.0);
        self.preference_sum = self.preferences.len() as f64;
    }

    /// Overrides the preference of one variable; test and demo hook.
    pub fn set_preference(&mut self, slot: usize, value: f64) {
        let clamped = value.clamp(MIN_PREFERENCE, MAX_PREFERENCE);
        self.preference_sum += clamped - self.preferences[slot];
        self.preferences[slot] = clamped;
    }

    /// Folds the gain of a just-executed coordinate step into the state:
    /// during the first sweep only the reference gain accumulates; after
    /// it, the preference of `slot` is scaled by `exp(h)` (clamped to
    /// `[MIN_PREFERENCE, MAX_PREFERENCE]`) and the reference gain fades
    /// toward the observed gain.
    ///
    /// A zero reference gain never faults: zero gain leaves the preference
    /// unchanged, positive gain saturates it at the maximum.
    pub fn update(&mut self, slot: usize, mu: f64, g: f64, squared_norm: f64) {
        let n = self.preferences.len() as f64;
        let delta = gain(mu, g, squared_norm);
        if self.first_sweep {
            self.reference_gain += delta / n;
            return;
        }
        let old = self.preferences[slot];
        let new = match self.rule {
            PreferenceRule::RelativeGain => {
                if self.reference_gain > 0.0 {
                    let h = GAIN_SENSITIVITY * (delta / self.reference_gain - 1.0);
                    (h.exp() * old).clamp(MIN_PREFERENCE, MAX_PREFERENCE)
                } else if delta > 0.0 {
                    MAX_PREFERENCE
                } else {
                    old.clamp(MIN_PREFERENCE, MAX_PREFERENCE)
                }
            }
            PreferenceRule::AbsoluteGain => {
                let h = GAIN_SENSITIVITY * (delta - self.reference_gain);
                (h.exp() * old).clamp(MIN_PREFERENCE, MAX_PREFERENCE)
            }
        };
        self.preference_sum += new - old;
        self.preferences[slot] = new;
        self.reference_gain = (1.0 - 1.0 / n) * self.reference_gain + delta / n;
    }
}

/// A sweep's visiting plan: exactly one entry per variable slot count,
/// with multiplicities realizing the preference frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Schedule {
    entries: Vec<usize>,
}

impl Schedule {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.entries
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.entries.iter().copied()
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.entries
    }
}

/// Draws a schedule of exactly `prefs.len()` slot indices by a systematic
/// pass with stochastic rounding: slot `i` receives
/// `m = p_i * (slots remaining) / (preference mass remaining)` copies in
/// expectation, rounded down and bumped with probability `frac(m)`. The
/// final slot fills the remainder deterministically. Runs in O(n).
pub fn build_schedule(prefs: &PreferenceState, rng: &mut impl Rng) -> Schedule {
    let mut entries = Vec::with_capacity(prefs.len());
    fill_schedule(prefs, rng, &mut entries);
    Schedule { entries }
}

fn fill_schedule(prefs: &PreferenceState, rng: &mut impl Rng, entries: &mut Vec<usize>) {
    let n = prefs.len();
    entries.clear();
    let mut remaining_mass = prefs.preference_sum();
    let mut filled = 0usize;
    for slot in 0..n {
        let open = n - filled;
        if open == 0 {
            break;
        }
        let count = if slot + 1 == n {
            open
        } else {
            let share = prefs.preferences()[slot] * open as f64 / remaining_mass;
            let share = share.clamp(0.0, open as f64);
            let mut count = share.floor() as usize;
            if rng.random::<f64>() < share - share.floor() {
                count += 1;
            }
            count.min(open)
        };
        entries.extend(std::iter::repeat(slot).take(count));
        filled += count;
        remaining_mass -= prefs.preferences()[slot];
    }
}

/// Trains with adaptive variable selection frequencies.
pub fn avsf_solve(data: &Dataset, config: &SolverConfig) -> Result<(SolverState, TrainingReport)> {
    solve_impl(data, config, PreferenceRule::default(), |_| {})
}

/// Same as [`avsf_solve`], reporting per-step progress to `observer`.
pub fn avsf_solve_observed(
    data: &Dataset,
    config: &SolverConfig,
    observer: &mut dyn FnMut(SolveEvent),
) -> Result<(SolverState, TrainingReport)> {
    solve_impl(data, config, PreferenceRule::default(), |event| observer(event))
}

/// [`avsf_solve`] with an explicit preference-update rule.
pub fn avsf_solve_with_rule(
    data: &Dataset,
    config: &SolverConfig,
    rule: PreferenceRule,
) -> Result<(SolverState, TrainingReport)> {
    solve_impl(data, config, rule, |_| {})
}

fn solve_impl(
    data: &Dataset,
    config: &SolverConfig,
    rule: PreferenceRule,
    mut observer: impl FnMut(SolveEvent),
) -> Result<(SolverState, TrainingReport)> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut state = SolverState::new(data, config.c);
    let active = sweep_indices(data);
    let mut prefs = PreferenceState::with_rule(active.len(), rule);
    let mut can_stop = true;
    let mut order: Vec<usize> = Vec::with_capacity(active.len());

    let start = Instant::now();
    let stop_reason = loop {
        if active.is_empty() {
            break StopReason::Converged;
        }
        if let Some(cap) = config.max_outer_iterations {
            if state.outer_iterations() >= cap {
                break StopReason::IterationCap;
            }
        }
        if let Some(deadline) = config.deadline {
            if start.elapsed().as_secs_f64() >= deadline {
                break StopReason::Deadline;
            }
        }
        state.begin_outer_iteration();

        let mut violation = 0.0f64;
        fill_schedule(&prefs, &mut rng, &mut order);
        shuffle_sweep_order(&mut order, &mut rng);
        for &slot in &order {
            let i = active[slot];
            let g = state.gradient(i, data);
            let a = state.alpha()[i];
            if a > 0.0 && -g > violation {
                violation = -g;
            }
            if a < config.c && g > violation {
                violation = g;
            }
            let mu = state.coordinate_step(i, g, config.c, data);
            observer(SolveEvent::Step { index: i, g, mu });
            prefs.update(slot, mu, g, data.squared_norm(i));
        }
        prefs.finish_first_sweep();
        observer(SolveEvent::SweepEnd {
            sweep: state.outer_iterations(),
        });

        if violation < config.epsilon {
            if can_stop {
                break StopReason::Converged;
            }
            // Confirm on one uniform-preference sweep before stopping; the
            // reference gain is carried over.
            prefs.reset_uniform();
            can_stop = true;
            observer(SolveEvent::ActiveReset);
        } else {
            can_stop = false;
        }
    };
    let wall_time = start.elapsed().as_secs_f64();

    let report = make_report(&state, data, config.c, wall_time, stop_reason);
    Ok((state, report))
}
