mod common;

use common::criteria;
use common::*;
use frlstsvm::experiment::{mean_std, results_jsonl, run_nested_cv, write_results, ExperimentConfig};

fn small_grid() -> ExperimentConfig {
    ExperimentConfig {
        tau: vec![0.0, 0.2],
        gamma: vec![1.0],
        c1: vec![0.25, 1.0, 4.0],
        folds: 5,
        repeats: 2,
        seed: 3,
        ..ExperimentConfig::default()
    }
}

#[test]
fn separable_blobs_are_classified() {
    let ds = blobs(31, 40, 120, 3, 6.0, 0.5);
    let res = run_nested_cv(&ds, "blobs", &small_grid()).unwrap();
    assert_eq!(res.records.len(), 10);
    assert!(res.summary.accuracy.mean >= 0.99, "{:?}", res.summary.accuracy);
}

#[test]
fn results_are_identical_across_worker_counts_and_leak_free() {
    let detail = criteria::determinism_and_leakage().unwrap();
    println!("{detail}");
}

#[test]
fn repeated_runs_write_identical_files() {
    let ds = random_dataset(32, 20, 60, 2, 0.4);
    let dir = tempfile::tempdir().unwrap();
    let a = run_nested_cv(&ds, "r", &small_grid()).unwrap();
    let b = run_nested_cv(&ds, "r", &small_grid()).unwrap();
    let (ca, ja) = write_results(&a, &dir.path().join("a")).unwrap();
    let (cb, jb) = write_results(&b, &dir.path().join("b")).unwrap();
    assert_eq!(std::fs::read(ca).unwrap(), std::fs::read(cb).unwrap());
    assert_eq!(std::fs::read(ja).unwrap(), std::fs::read(jb).unwrap());
}

#[test]
fn summary_is_population_statistics_over_all_folds() {
    let ds = random_dataset(33, 20, 60, 2, 0.4);
    let res = run_nested_cv(&ds, "r", &small_grid()).unwrap();
    let acc: Vec<f64> = res.records.iter().map(|r| r.metrics.accuracy).collect();
    let n = acc.len() as f64;
    let mean = acc.iter().sum::<f64>() / n;
    let std = (acc.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n).sqrt();
    assert_eq!(res.summary.folds, 10);
    assert!((res.summary.accuracy.mean - mean).abs() < 1e-15);
    assert!((res.summary.accuracy.std - std).abs() < 1e-15);
    let ms = mean_std(&acc);
    assert_eq!((ms.mean, ms.std), (res.summary.accuracy.mean, res.summary.accuracy.std));
}

#[test]
fn oversized_tau_points_are_skipped() {
    let ds = random_dataset(34, 20, 60, 2, 0.4);
    let cfg = ExperimentConfig {
        tau: vec![0.0, 1.0],
        ..small_grid()
    };
    let res = run_nested_cv(&ds, "r", &cfg).unwrap();
    for r in &res.records {
        assert_eq!(r.selection.point.tau, 0.0);
        assert!(r.selection.skipped >= 3, "{:?}", r.selection);
    }
}

#[test]
fn all_points_failing_aborts_with_partial_results() {
    let ds = random_dataset(35, 20, 60, 2, 0.4);
    let cfg = ExperimentConfig {
        tau: vec![1.0],
        ..small_grid()
    };
    let partial = run_nested_cv(&ds, "r", &cfg).unwrap_err();
    assert!(partial.partial.records.is_empty() || partial.partial.records.len() < 10);
    assert!(!partial.error.to_string().is_empty());
    assert!(results_jsonl(&partial.partial).contains("summary"));
}
