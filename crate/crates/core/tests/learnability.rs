use msn_core::harness::{self, DataSource, ExperimentConfig, OptimizerConfig, TaskConfig, TrialCause};

// Zero-noise digits must be learnable by a small dense network.
#[test]
fn msn_fits_clean_synthetic_digits() {
    let mut c = ExperimentConfig::new(
        OptimizerConfig::default(),
        TaskConfig::Classification {
            data: DataSource::Synthetic {
                n: 200,
                image_size: 8,
                num_classes: 10,
                noise: 0.0,
                seed: 0,
            },
            subset_size: None,
            network: None,
            target_loss: None,
            target_accuracy: Some(0.95),
        },
    );
    c.repetitions = 1;
    c.termination.max_steps = 3000;
    let r = harness::run_experiment(&c).unwrap();
    let t = &r.trials[0];
    assert_eq!(t.cause, TrialCause::AccuracyReached, "{t:?}");
    assert!(t.final_accuracy.unwrap() >= 0.95);
}
