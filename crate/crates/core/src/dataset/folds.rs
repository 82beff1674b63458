use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Label, LabeledDataset};
use crate::error::{Error, Result};

/// Stratified assignment of rows to `k` folds.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub assignments: Vec<usize>,
    pub seed: u64,
}

impl FoldPlan {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] == fold)
            .collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.assignments.len())
            .filter(|&i| self.assignments[i] != fold)
            .collect()
    }
}

/// Each class is shuffled with a ChaCha8 stream seeded by `seed` and dealt
/// round-robin over the folds. The second class continues the rotation where
/// the first stopped, so fold sizes also differ by at most one.
pub fn stratified_kfold(ds: &LabeledDataset, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::Parameter(format!("fold count must be >= 2, got {k}")));
    }
    let labels = ds.labels();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignments = vec![0; labels.len()];
    let mut next = 0;
    for class in [Label::Positive, Label::Negative] {
        let mut rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        if rows.len() < k {
            return Err(Error::TooFewForFolds {
                class: class.name(),
                count: rows.len(),
                k,
            });
        }
        rows.shuffle(&mut rng);
        for row in rows {
            assignments[row] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldPlan { k, assignments, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use proptest::prelude::*;

    fn balanced(n_pos: usize, n_neg: usize) -> LabeledDataset {
        let m = n_pos + n_neg;
        let x = DenseMatrix::from_fn(m, 1, |r, _| r as f64);
        let labels = (0..m)
            .map(|i| if i < n_pos { Label::Positive } else { Label::Negative })
            .collect();
        LabeledDataset::from_parts(x, labels).unwrap()
    }

    fn per_fold_counts(ds: &LabeledDataset, plan: &FoldPlan, class: Label) -> Vec<usize> {
        let mut counts = vec![0; plan.k];
        for (i, &f) in plan.assignments.iter().enumerate() {
            if ds.labels()[i] == class {
                counts[f] += 1;
            }
        }
        counts
    }

    #[test]
    fn five_per_class_five_folds() {
        let ds = balanced(5, 5);
        let plan = stratified_kfold(&ds, 5, 1).unwrap();
        for class in [Label::Positive, Label::Negative] {
            assert_eq!(per_fold_counts(&ds, &plan, class), vec![1; 5]);
        }
    }

    #[test]
    fn deterministic_for_same_seed() {
        let ds = balanced(7, 23);
        let a = stratified_kfold(&ds, 4, 99).unwrap();
        let b = stratified_kfold(&ds, 4, 99).unwrap();
        assert_eq!(a, b);
        let c = stratified_kfold(&ds, 4, 100).unwrap();
        assert_ne!(a.assignments, c.assignments);
    }

    #[test]
    fn too_few_minority_rows() {
        let ds = balanced(3, 30);
        match stratified_kfold(&ds, 5, 0) {
            Err(Error::TooFewForFolds { count: 3, k: 5, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(stratified_kfold(&ds, 1, 0).is_err());
    }

    #[test]
    fn train_and_test_partition() {
        let ds = balanced(6, 14);
        let plan = stratified_kfold(&ds, 3, 5).unwrap();
        for f in 0..3 {
            let mut all = plan.train_indices(f);
            all.extend(plan.test_indices(f));
            all.sort_unstable();
            assert_eq!(all, (0..20).collect::<Vec<_>>());
        }
    }

    proptest! {
        #[test]
        fn stratification_bounds(n_pos in 2usize..40, n_neg in 2usize..120, k in 2usize..10, seed in any::<u64>()) {
            prop_assume!(n_pos >= k && n_neg >= k);
            let ds = balanced(n_pos, n_neg);
            let plan = stratified_kfold(&ds, k, seed).unwrap();
            prop_assert!(plan.assignments.iter().all(|&f| f < k));
            for (class, n) in [(Label::Positive, n_pos), (Label::Negative, n_neg)] {
                for c in per_fold_counts(&ds, &plan, class) {
                    prop_assert!(c == n / k || c == n.div_ceil(k));
                }
            }
            let mut sizes = vec![0usize; k];
            for &f in &plan.assignments { sizes[f] += 1; }
            let (lo, hi) = (sizes.iter().min().unwrap(), sizes.iter().max().unwrap());
            prop_assert!(hi - lo <= 1);
        }
    }
}
