//! File-format tour: write a dataset in libsvm text format, parse it back,
//! train, persist the model, reload it, and score.
//!
//! ```bash
//! cargo run --example libsvm_roundtrip
//! ```

use linsvm::{
    avsf_solve, generate_synthetic, load_libsvm, save_libsvm, Model, SolverConfig,
};

fn main() -> linsvm::Result<()> {
    let dir = std::env::temp_dir().join("linsvm_roundtrip");
    std::fs::create_dir_all(&dir)?;
    let data_path = dir.join("demo.svm");
    let model_path = dir.join("demo.model");

    // Separable data (noise 0) round-trips through the text format exactly.
    let data = generate_synthetic(11, 400, 30, 0.3, 0.0)?;
    save_libsvm(&data, &data_path)?;
    let reloaded = load_libsvm(&data_path)?;
    assert_eq!(data, reloaded);
    println!("wrote and re-read {} examples from {}", reloaded.len(), data_path.display());

    let config = SolverConfig::new(100.0, 0.001).with_seed(2);
    let (state, report) = avsf_solve(&reloaded, &config)?;
    println!(
        "trained in {} steps ({} sweeps), exact violation {:.2e}",
        report.steps, report.outer_iterations, report.exact_max_kkt_violation
    );

    let model = Model {
        weights: state.weights().to_vec(),
        solver: "avsf".into(),
        c: config.c,
        epsilon: config.epsilon,
        seed: config.seed,
    };
    model.save(&model_path)?;
    let restored = Model::load(&model_path)?;
    assert_eq!(model, restored);

    println!(
        "model round-tripped through {}; training accuracy {:.4}",
        model_path.display(),
        restored.accuracy(&reloaded)
    );
    Ok(())
}
