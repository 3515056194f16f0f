//! Kept in its own binary: it changes the process environment.

use lqglab::harness::{run, Experiment, ExperimentConfig};
use lqglab::LabError;

#[test]
fn lab_threads_must_be_a_positive_integer() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(Experiment::Field);
    cfg.grid_size = 32;
    cfg.spacing = 4.0 / 32.0;
    cfg.output_dir = dir.path().join("out");
    for bad in ["0", "-1", "two", ""] {
        std::env::set_var("LAB_THREADS", bad);
        let err = run(&cfg).unwrap_err();
        assert!(
            matches!(err, LabError::Validation { ref field, .. } if field == "LAB_THREADS"),
            "{bad}: {err}"
        );
        assert!(!cfg.output_dir.exists());
    }
    std::env::set_var("LAB_THREADS", "2");
    let one = run(&cfg).unwrap();
    std::env::set_var("LAB_THREADS", "1");
    let other = run(&cfg).unwrap();
    assert!(one.differing_outputs(&other).is_empty());
    std::env::remove_var("LAB_THREADS");
}
