//! How preference-weighted schedules work: uniform preferences reproduce a
//! plain sweep, skewed preferences redistribute the same number of slots,
//! and the update rule rewards above-average gains while driving zero-gain
//! variables to the floor.
//!
//! ```bash
//! cargo run --example adaptive_schedule
//! ```

use linsvm::avsf::{MAX_PREFERENCE, MIN_PREFERENCE};
use linsvm::{build_schedule, PreferenceState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn counts(schedule: &linsvm::avsf::Schedule, n: usize) -> Vec<usize> {
    let mut counts = vec![0usize; n];
    for slot in schedule.iter() {
        counts[slot] += 1;
    }
    counts
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);

    // Uniform preferences: every variable exactly once, in order.
    let uniform = PreferenceState::new(8);
    let schedule = build_schedule(&uniform, &mut rng);
    println!("uniform preferences  -> schedule {:?}", schedule.as_slice());

    // Skewed preferences: same schedule length, slots shifted toward the
    // preferred variables (stochastic rounding decides the remainders).
    let mut skewed = PreferenceState::new(8);
    skewed.finish_first_sweep();
    skewed.set_preference(0, 4.0);
    skewed.set_preference(1, 2.0);
    skewed.set_preference(7, MIN_PREFERENCE);
    for _ in 0..3 {
        let schedule = build_schedule(&skewed, &mut rng);
        println!(
            "skewed {:?} -> counts {:?} (len {})",
            skewed.preferences().iter().map(|p| format!("{p:.2}")).collect::<Vec<_>>(),
            counts(&schedule, 8),
            schedule.len()
        );
    }

    // The update rule: gains above the fading reference raise a preference,
    // zero gains sink it to the floor.
    let mut prefs = PreferenceState::new(4);
    // First sweep only calibrates the reference gain.
    for slot in 0..4 {
        prefs.update(slot, 1.0, 1.0, 1.0); // every step gains 0.5
    }
    prefs.finish_first_sweep();
    println!(
        "\nafter calibration: reference gain {:.3}, preferences {:?}",
        prefs.reference_gain(),
        prefs.preferences()
    );

    for round in 1..=6 {
        prefs.update(0, 1.0, 2.0, 1.0); // keeps gaining 1.5: three times the reference
        prefs.update(1, 0.0, -0.4, 1.0); // stuck at a bound: zero gain
        println!(
            "round {round}: preferences {:?} (reference gain {:.4})",
            prefs
                .preferences()
                .iter()
                .map(|p| format!("{p:.3}"))
                .collect::<Vec<_>>(),
            prefs.reference_gain()
        );
    }
    println!(
        "\npreferences stay inside [{MIN_PREFERENCE}, {MAX_PREFERENCE}] by construction"
    );
}
