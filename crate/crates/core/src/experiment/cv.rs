//! Repeated nested stratified cross-validation.
//!
//! Repeat `r` splits the data into `k` outer folds with seed `seed + r`. On
//! each outer training part an inner stratified grid search (k−1 folds by
//! default) picks the grid point with the highest mean G-mean; ties go to
//! the earliest point in grid order. The winner is refit on the whole outer
//! training part and scored on the outer test fold.

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classifier::{Kernel, KernelKind, PreparedTraining, TrainConfig};
use crate::dataset::{stratified_kfold, LabeledDataset};
use crate::error::{Error, Result};
use crate::fuzzy_rough::{ClassSimilarity, FuzzyParams};
use crate::metrics::{confusion, report, ConfusionMatrix, MetricReport};

use super::config::ExperimentConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridPoint {
    pub tau: f64,
    pub gamma: f64,
    pub c1: f64,
    pub c2: f64,
    pub sigma: Option<f64>,
}

impl GridPoint {
    pub fn train_config(&self, cfg: &ExperimentConfig) -> TrainConfig {
        TrainConfig {
            c1: self.c1,
            c2: self.c2,
            delta: cfg.delta,
            tau: self.tau,
            fuzzy: fuzzy_params(cfg, self.gamma),
            kernel: match self.sigma {
                Some(sigma) => Kernel::Gaussian { sigma },
                None => Kernel::Linear,
            },
            subsample: cfg.subsample,
            weights: cfg.weights,
        }
    }
}

fn fuzzy_params(cfg: &ExperimentConfig, gamma: f64) -> FuzzyParams {
    FuzzyParams {
        gamma,
        tnorm: cfg.tnorm,
        implicator: cfg.implicator,
        score_mode: cfg.score_mode,
    }
}

fn sorted_unique(v: &[f64]) -> Vec<f64> {
    let mut v = v.to_vec();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

/// Grid in search order: τ, γ, c₁, c₂, σ, each ascending. Axes that cannot
/// change the model (τ without subsampling, γ without subsampling and
/// weights) collapse to their first value.
pub fn grid_points(cfg: &ExperimentConfig) -> Vec<GridPoint> {
    let mut taus = sorted_unique(&cfg.tau);
    if !cfg.subsample {
        taus.truncate(1);
    }
    let mut gammas = sorted_unique(&cfg.gamma);
    if !cfg.subsample && !cfg.weights {
        gammas.truncate(1);
    }
    let c1s = sorted_unique(&cfg.c1);
    let sigmas: Vec<Option<f64>> = match cfg.kernel {
        KernelKind::Linear => vec![None],
        KernelKind::Gaussian => sorted_unique(&cfg.sigma).into_iter().map(Some).collect(),
    };
    let mut out = Vec::new();
    for &tau in &taus {
        for &gamma in &gammas {
            for &c1 in &c1s {
                let c2s = if cfg.untie_c { sorted_unique(&cfg.c2) } else { vec![c1] };
                for &c2 in &c2s {
                    for &sigma in &sigmas {
                        out.push(GridPoint {
                            tau,
                            gamma,
                            c1,
                            c2,
                            sigma,
                        });
                    }
                }
            }
        }
    }
    out
}

/// Well-mixed seed for the inner split of one outer fold (SplitMix64 finalizer).
pub fn fold_seed(seed: u64, repeat: usize, fold: usize) -> u64 {
    let mut z = seed
        ^ (repeat as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
        ^ (fold as u64).wrapping_add(1).wrapping_mul(0xD1B5_4A32_D192_ED03);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Outcome of the inner search on one outer training part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub point: GridPoint,
    pub inner_gmean: f64,
    /// Grid points that failed on some inner fold and were skipped.
    pub skipped: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FoldRecord {
    pub repeat: usize,
    pub fold: usize,
    pub selection: Selection,
    pub confusion: ConfusionMatrix,
    pub metrics: MetricReport,
    pub m2_kept: usize,
    pub test_size: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeanStd {
    pub mean: f64,
    /// Population standard deviation over the same values as `mean`.
    pub std: f64,
}

pub fn mean_std(values: &[f64]) -> MeanStd {
    if values.is_empty() {
        return MeanStd { mean: 0.0, std: 0.0 };
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    MeanStd { mean, std: var.sqrt() }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub accuracy: MeanStd,
    pub sensitivity: MeanStd,
    pub specificity: MeanStd,
    pub gmean: MeanStd,
    pub folds: usize,
}

impl Summary {
    pub fn from_records(records: &[FoldRecord]) -> Self {
        let col = |f: fn(&MetricReport) -> f64| -> MeanStd {
            mean_std(&records.iter().map(|r| f(&r.metrics)).collect::<Vec<_>>())
        };
        Self {
            accuracy: col(|m| m.accuracy),
            sensitivity: col(|m| m.sensitivity),
            specificity: col(|m| m.specificity),
            gmean: col(|m| m.gmean),
            folds: records.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvResult {
    pub dataset: String,
    pub config: ExperimentConfig,
    /// Sorted by (repeat, fold).
    pub records: Vec<FoldRecord>,
    pub summary: Summary,
    /// Not written to result files, which stay a pure function of the inputs.
    #[serde(skip)]
    pub wall_seconds: f64,
}

/// Per-grid-point mean inner G-mean, `None` where some inner fold failed.
fn inner_scores(
    train: &LabeledDataset,
    cfg: &ExperimentConfig,
    grid: &[GridPoint],
    seed: u64,
) -> Result<Vec<Option<f64>>> {
    let k = cfg.inner_folds.unwrap_or(cfg.folds - 1).max(2);
    let plan = stratified_kfold(train, k, seed)?;
    let mut sums: Vec<Option<f64>> = vec![Some(0.0); grid.len()];
    for f in 0..k {
        let inner_train = train.subset(&plan.train_indices(f))?;
        let inner_test = train.subset(&plan.test_indices(f))?;
        let prepared = PreparedTraining::new(&inner_train)?;
        let needs_sim = cfg.subsample || cfg.weights;
        let mut cache: Option<(f64, ClassSimilarity)> = None;
        for (i, p) in grid.iter().enumerate() {
            if sums[i].is_none() {
                continue;
            }
            let tc = p.train_config(cfg);
            if needs_sim && cache.as_ref().is_none_or(|(g, _)| *g != p.gamma) {
                cache = Some((p.gamma, prepared.similarity(&tc.fuzzy)?));
            }
            let sim = cache.as_ref().map(|(_, s)| s);
            let g = prepared
                .fit(&tc, sim)
                .and_then(|m| m.predict_all(inner_test.features()))
                .and_then(|pred| confusion(inner_test.labels(), &pred))
                .map(|cm| report(&cm, cfg.metric_convention).gmean);
            match g {
                Ok(g) => sums[i] = sums[i].map(|s| s + g),
                Err(e) => {
                    log::debug!("grid point {p:?} skipped on inner fold {f}: {e}");
                    sums[i] = None;
                }
            }
        }
    }
    Ok(sums.into_iter().map(|s| s.map(|v| v / k as f64)).collect())
}

/// Runs the inner grid search on `train` and returns the winning point.
pub fn select_point(
    train: &LabeledDataset,
    cfg: &ExperimentConfig,
    grid: &[GridPoint],
    seed: u64,
) -> Result<Option<Selection>> {
    let scores = inner_scores(train, cfg, grid, seed)?;
    let mut best: Option<(usize, f64)> = None;
    for (i, s) in scores.iter().enumerate() {
        if let Some(s) = *s {
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((i, s));
            }
        }
    }
    let skipped = scores.iter().filter(|s| s.is_none()).count();
    Ok(best.map(|(i, s)| Selection {
        point: grid[i],
        inner_gmean: s,
        skipped,
    }))
}

/// Training and test rows of one outer fold, with the training part
/// scaled and split exactly as the harness does it.
pub fn prepare_outer_fold(
    ds: &LabeledDataset,
    cfg: &ExperimentConfig,
    repeat: usize,
    fold: usize,
) -> Result<(PreparedTraining, Vec<usize>, Vec<usize>)> {
    let plan = stratified_kfold(ds, cfg.folds, cfg.seed.wrapping_add(repeat as u64))?;
    let train_idx = plan.train_indices(fold);
    let test_idx = plan.test_indices(fold);
    let prepared = PreparedTraining::new(&ds.subset(&train_idx)?)?;
    Ok((prepared, train_idx, test_idx))
}

fn run_fold(
    ds: &LabeledDataset,
    cfg: &ExperimentConfig,
    grid: &[GridPoint],
    repeat: usize,
    fold: usize,
    train_idx: &[usize],
    test_idx: &[usize],
) -> Result<FoldRecord> {
    let train = ds.subset(train_idx)?;
    let test = ds.subset(test_idx)?;
    let selection = select_point(&train, cfg, grid, fold_seed(cfg.seed, repeat, fold))?
        .ok_or(Error::FoldFailed { repeat, fold })?;
    let model = PreparedTraining::new(&train)?.fit(&selection.point.train_config(cfg), None)?;
    let pred = model.predict_all(test.features())?;
    let cm = confusion(test.labels(), &pred)?;
    Ok(FoldRecord {
        repeat,
        fold,
        confusion: cm,
        metrics: report(&cm, cfg.metric_convention),
        m2_kept: model.summary().m2_kept,
        test_size: test.len(),
        selection,
    })
}

/// Error from an aborted run together with the folds that did finish.
#[derive(Debug)]
pub struct PartialRun {
    pub error: Error,
    pub partial: CvResult,
}

/// A failed run hands back everything finished before the failure.
#[allow(clippy::result_large_err)]
pub fn run_nested_cv(
    ds: &LabeledDataset,
    name: &str,
    cfg: &ExperimentConfig,
) -> std::result::Result<CvResult, PartialRun> {
    let start = Instant::now();
    let fail = |error: Error, records: Vec<FoldRecord>| PartialRun {
        error,
        partial: CvResult {
            dataset: name.to_string(),
            config: cfg.clone(),
            summary: Summary::from_records(&records),
            records,
            wall_seconds: start.elapsed().as_secs_f64(),
        },
    };
    if let Err(e) = cfg.validate() {
        return Err(fail(e, Vec::new()));
    }
    let grid = grid_points(cfg);
    let mut tasks = Vec::new();
    for r in 0..cfg.repeats {
        let plan = match stratified_kfold(ds, cfg.folds, cfg.seed.wrapping_add(r as u64)) {
            Ok(p) => p,
            Err(e) => return Err(fail(e, Vec::new())),
        };
        for f in 0..cfg.folds {
            tasks.push((r, f, plan.train_indices(f), plan.test_indices(f)));
        }
    }
    let work = || -> Vec<Result<FoldRecord>> {
        tasks
            .par_iter()
            .map(|(r, f, tr, te)| {
                let out = run_fold(ds, cfg, &grid, *r, *f, tr, te);
                log::info!("repeat {r} fold {f} done");
                out
            })
            .collect()
    };
    let results = match rayon::ThreadPoolBuilder::new().num_threads(cfg.workers).build() {
        Ok(pool) => pool.install(work),
        Err(e) => return Err(fail(Error::Config(format!("worker pool: {e}")), Vec::new())),
    };
    let mut records = Vec::with_capacity(results.len());
    let mut first_error = None;
    for res in results {
        match res {
            Ok(rec) => records.push(rec),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    records.sort_by_key(|r| (r.repeat, r.fold));
    if let Some(e) = first_error {
        return Err(fail(e, records));
    }
    Ok(CvResult {
        dataset: name.to_string(),
        config: cfg.clone(),
        summary: Summary::from_records(&records),
        records,
        wall_seconds: start.elapsed().as_secs_f64(),
    })
}
