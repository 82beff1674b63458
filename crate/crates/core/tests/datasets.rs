mod common;

use common::*;
use frlstsvm::dataset::{
    imbalance_ratio, load_csv, minmax_apply, minmax_fit, split_by_class, stratified_kfold, CsvOptions, Label,
};

#[test]
fn haberman_csv_and_keel_agree() {
    let csv = load_csv(data_path("haberman.csv"), &CsvOptions::new("Died")).unwrap();
    let dat = keel("haberman");
    for ds in [&csv, &dat] {
        assert_eq!((ds.len(), ds.n_attributes()), (306, 3));
        assert_eq!(ds.class_counts(), (81, 225));
        assert!((imbalance_ratio(ds) - 2.7779).abs() < 0.01);
    }
    assert_eq!(csv.features(), dat.features());
    assert_eq!(csv.labels(), dat.labels());
}

#[test]
fn yeast3_shape() {
    let ds = keel("yeast3");
    assert_eq!((ds.len(), ds.n_attributes()), (1484, 8));
    assert!((imbalance_ratio(&ds) - 8.1075).abs() < 0.01);
}

#[test]
fn yeast4_folds_hold_five_or_six_minority_rows() {
    let ds = keel("yeast4");
    let (m1, _) = ds.class_counts();
    assert_eq!(m1, 51);
    for seed in 0..5 {
        let plan = stratified_kfold(&ds, 10, seed).unwrap();
        for f in 0..10 {
            let pos = plan
                .test_indices(f)
                .iter()
                .filter(|&&i| ds.labels()[i] == Label::Positive)
                .count();
            assert!(pos == 5 || pos == 6, "fold {f}: {pos}");
        }
    }
}

#[test]
fn bundled_imbalance_ratios() {
    // The bundled copies are the public KEEL files; where their counts give a
    // slightly different ratio than the reference figures, the file wins.
    for (name, m, n, ratio) in [
        ("pima", 768, 8, 1.8657),
        ("wisconsin", 683, 9, 1.8577),
        ("vehicle0", 846, 18, 3.2513),
    ] {
        let ds = keel(name);
        assert_eq!((ds.len(), ds.n_attributes()), (m, n), "{name}");
        assert!(
            (imbalance_ratio(&ds) - ratio).abs() < 1e-3,
            "{name}: {}",
            imbalance_ratio(&ds)
        );
    }
    assert!((imbalance_ratio(&keel("vehicle0")) - 3.2337).abs() < 0.05);
}

#[test]
fn abalone19_from_numeric_csv() {
    // the KEEL file carries the nominal Sex input, which the loader rejects
    let err = frlstsvm::dataset::load_keel(data_path("abalone19.dat"), "positive").unwrap_err();
    assert!(err.to_string().contains("Sex"), "{err}");
    let ds = load_csv(data_path("abalone19.csv"), &CsvOptions::new("positive")).unwrap();
    assert_eq!((ds.len(), ds.n_attributes()), (4174, 7));
    assert_eq!(ds.class_counts(), (32, 4142));
    let ratio = imbalance_ratio(&ds);
    assert!((ratio - 129.4375).abs() < 1e-9);
    assert!((ratio - 128.8701).abs() / 128.8701 < 0.01);
}

#[test]
fn training_fold_scaling_spans_the_unit_interval() {
    let ds = keel("pima");
    let plan = stratified_kfold(&ds, 10, 3).unwrap();
    let train = ds.subset(&plan.train_indices(0)).unwrap();
    let scaled = minmax_apply(&minmax_fit(train.features()), train.features()).unwrap();
    for c in 0..scaled.cols() {
        let col = scaled.col_vec(c);
        let lo = col.iter().copied().fold(f64::MAX, f64::min);
        let hi = col.iter().copied().fold(f64::MIN, f64::max);
        assert_eq!((lo, hi), (0.0, 1.0), "column {c}");
    }
    let split = split_by_class(&train).unwrap();
    assert_eq!(split.m1() + split.m2(), train.len());
}
