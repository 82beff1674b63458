//! Fuzzy-rough machinery: per-attribute similarity, B-indiscernibility,
//! lower approximation, positive-region scores, τ-threshold under-sampling
//! of the majority class and per-instance weights.
//!
//! All inputs are expected min-max scaled into `[0, 1]`, so the attribute
//! range `l(a)` is 1 unless explicit ranges are passed.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{ClassSplit, Label};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Lower bound applied to every instance weight. The solvers divide by the
/// weights, so zero is not allowed.
pub const WEIGHT_FLOOR: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TNorm {
    Minimum,
    Product,
    Lukasiewicz,
}

impl TNorm {
    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            TNorm::Minimum => a.min(b),
            TNorm::Product => a * b,
            TNorm::Lukasiewicz => (a + b - 1.0).max(0.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Implicator {
    Lukasiewicz,
    KleeneDienes,
}

impl Implicator {
    #[inline]
    pub fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Implicator::Lukasiewicz => (1.0 - a + b).min(1.0),
            Implicator::KleeneDienes => (1.0 - a).max(b),
        }
    }
}

/// How majority instances are scored before thresholding.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ScoreMode {
    /// Mean similarity to the other instances of the same class. Dense
    /// regions score high, isolated points low.
    Density,
    /// Fuzzy lower approximation of the crisp decision relation over all
    /// instances of both classes.
    LowerApprox,
}

macro_rules! keyword_enum {
    ($ty:ty { $($variant:ident => [$($kw:literal),+]),+ $(,)? }) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                let lower = s.trim().to_ascii_lowercase();
                match lower.as_str() {
                    $($($kw)|+ => Ok(<$ty>::$variant),)+
                    _ => Err(Error::Parameter(format!(
                        "unknown {} {s:?}", stringify!($ty)
                    ))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                let name = match self {
                    $(<$ty>::$variant => keyword_enum!(@first $($kw),+),)+
                };
                f.write_str(name)
            }
        }
    };
    (@first $first:literal $(, $rest:literal)*) => { $first };
}

keyword_enum!(TNorm {
    Minimum => ["minimum", "min"],
    Product => ["product", "prod"],
    Lukasiewicz => ["lukasiewicz", "luk"],
});

keyword_enum!(Implicator {
    Lukasiewicz => ["lukasiewicz", "luk"],
    KleeneDienes => ["kleene-dienes", "kleene_dienes", "kd"],
});

keyword_enum!(ScoreMode {
    Density => ["density"],
    LowerApprox => ["lower-approx", "lower_approx"],
});

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FuzzyParams {
    pub gamma: f64,
    pub tnorm: TNorm,
    pub implicator: Implicator,
    pub score_mode: ScoreMode,
}

impl Default for FuzzyParams {
    fn default() -> Self {
        Self {
            gamma: 1.0,
            tnorm: TNorm::Minimum,
            implicator: Implicator::Lukasiewicz,
            score_mode: ScoreMode::Density,
        }
    }
}

impl FuzzyParams {
    pub fn with_gamma(gamma: f64) -> Self {
        Self {
            gamma,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::Parameter(format!(
                "gamma must be a finite value > 0, got {}",
                self.gamma
            )));
        }
        Ok(())
    }
}

/// `max(0, 1 − γ·|ax − ay| / l(a))`.
#[inline]
pub fn attribute_similarity(ax: f64, ay: f64, range_la: f64, gamma: f64) -> f64 {
    (1.0 - gamma * (ax - ay).abs() / range_la).max(0.0)
}

/// T-norm over all attributes of the per-attribute similarities.
#[inline]
pub fn pair_similarity(x: &[f64], y: &[f64], ranges: Option<&[f64]>, params: &FuzzyParams) -> f64 {
    let mut acc = 1.0;
    for j in 0..x.len() {
        let la = ranges.map_or(1.0, |r| r[j]);
        acc = params
            .tnorm
            .apply(acc, attribute_similarity(x[j], y[j], la, params.gamma));
    }
    acc
}

/// Symmetric fuzzy B-indiscernibility matrix of a point set, unit diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    pub values: DenseMatrix,
    /// Source row of each matrix row.
    pub row_indices: Vec<usize>,
}

impl SimilarityMatrix {
    pub fn len(&self) -> usize {
        self.row_indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.row_indices.is_empty()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[(i, j)]
    }

    /// Mean similarity of each member of `subset` to the other members,
    /// in subset order. A singleton scores 1.
    pub fn subset_means(&self, subset: &[usize]) -> Vec<f64> {
        if subset.len() <= 1 {
            return vec![1.0; subset.len()];
        }
        let denom = (subset.len() - 1) as f64;
        subset
            .iter()
            .map(|&i| {
                let row = self.values.row(i);
                let mut s = 0.0;
                for &j in subset {
                    if j != i {
                        s += row[j];
                    }
                }
                s / denom
            })
            .collect()
    }
}

pub fn indiscernibility_matrix(x: &DenseMatrix, params: &FuzzyParams) -> Result<SimilarityMatrix> {
    indiscernibility_matrix_with_ranges(x, None, params)
}

/// Each unordered pair is evaluated once and mirrored, so the result is
/// exactly symmetric.
pub fn indiscernibility_matrix_with_ranges(
    x: &DenseMatrix,
    ranges: Option<&[f64]>,
    params: &FuzzyParams,
) -> Result<SimilarityMatrix> {
    params.validate()?;
    let p = x.rows();
    if p == 0 {
        return Err(Error::InvalidDataset("similarity of an empty point set".into()));
    }
    if let Some(r) = ranges {
        if r.len() != x.cols() || r.iter().any(|&v| !(v > 0.0)) {
            return Err(Error::Parameter("ranges must be positive, one per attribute".into()));
        }
    }
    let mut values = DenseMatrix::zeros(p, p);
    for i in 0..p {
        values[(i, i)] = 1.0;
        for j in 0..i {
            let s = pair_similarity(x.row(i), x.row(j), ranges, params);
            values[(i, j)] = s;
            values[(j, i)] = s;
        }
    }
    Ok(SimilarityMatrix {
        values,
        row_indices: (0..p).collect(),
    })
}

/// Rectangular similarity `R(a_i, b_j)`.
pub fn cross_similarity(a: &DenseMatrix, b: &DenseMatrix, params: &FuzzyParams) -> DenseMatrix {
    DenseMatrix::from_fn(a.rows(), b.rows(), |i, j| {
        pair_similarity(a.row(i), b.row(j), None, params)
    })
}

/// `inf_x L(R(x, y), A(x))`.
pub fn lower_approx_membership(sim_row: &[f64], concept_row: &[f64], implicator: Implicator) -> Result<f64> {
    if sim_row.len() != concept_row.len() {
        return Err(Error::Shape(format!(
            "similarity row has {} entries, concept row {}",
            sim_row.len(),
            concept_row.len()
        )));
    }
    if sim_row.is_empty() {
        return Err(Error::InvalidDataset("lower approximation over an empty set".into()));
    }
    Ok(sim_row
        .iter()
        .zip(concept_row)
        .map(|(&r, &a)| implicator.apply(r, a))
        .fold(f64::INFINITY, f64::min))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PositiveRegionScores {
    pub scores: Vec<f64>,
    /// Rows (of the matrix passed in) that were scored, ascending.
    pub rows: Vec<usize>,
    pub mode: ScoreMode,
    pub params: FuzzyParams,
}

/// Scores every instance of `target`.
///
/// * density: mean similarity to the other same-class instances;
/// * lower approximation: `inf_x L(R(x, y), R_d(x, y))` over all instances,
///   with the crisp decision relation `R_d(x, y) = [label(x) = label(y)]`.
pub fn positive_region_scores(
    x_all: &DenseMatrix,
    labels: &[Label],
    target: Label,
    params: &FuzzyParams,
) -> Result<PositiveRegionScores> {
    params.validate()?;
    if x_all.rows() != labels.len() {
        return Err(Error::Shape(format!(
            "{} rows but {} labels",
            x_all.rows(),
            labels.len()
        )));
    }
    let rows: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == target).collect();
    if rows.is_empty() {
        return Err(Error::InvalidDataset(format!(
            "no instances of the {} class to score",
            target.name()
        )));
    }
    let scores = match params.score_mode {
        ScoreMode::Density => {
            let sim = indiscernibility_matrix(&x_all.select_rows(&rows), params)?;
            let all: Vec<usize> = (0..rows.len()).collect();
            sim.subset_means(&all)
        }
        ScoreMode::LowerApprox => {
            let concept: Vec<f64> = labels.iter().map(|&l| if l == target { 1.0 } else { 0.0 }).collect();
            let mut sim_row = vec![0.0; labels.len()];
            rows.iter()
                .map(|&y| {
                    for (x, s) in sim_row.iter_mut().enumerate() {
                        *s = pair_similarity(x_all.row(x), x_all.row(y), None, params);
                    }
                    lower_approx_membership(&sim_row, &concept, params.implicator)
                })
                .collect::<Result<Vec<_>>>()?
        }
    };
    Ok(PositiveRegionScores {
        scores,
        rows,
        mode: params.score_mode,
        params: *params,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SubsampleResult {
    /// Positions into the scored set whose score is at least τ, ascending.
    pub kept: Vec<usize>,
    pub removed: Vec<usize>,
    pub scores: Vec<f64>,
    pub tau: f64,
}

/// Keeps `{i : score_i ≥ τ}`; a score equal to τ is kept.
pub fn subsample_majority(scores: &[f64], tau: f64) -> Result<SubsampleResult> {
    if !(0.0..=1.0).contains(&tau) {
        return Err(Error::Parameter(format!("tau must lie in [0, 1], got {tau}")));
    }
    let (kept, removed): (Vec<usize>, Vec<usize>) = (0..scores.len()).partition(|&i| scores[i] >= tau);
    if kept.is_empty() {
        return Err(Error::EmptySubsample {
            tau,
            max_score: scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        });
    }
    Ok(SubsampleResult {
        kept,
        removed,
        scores: scores.to_vec(),
        tau,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightVector {
    pub weights: Vec<f64>,
    pub class: Label,
}

impl WeightVector {
    pub fn ones(len: usize, class: Label) -> Self {
        Self {
            weights: vec![1.0; len],
            class,
        }
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    fn from_means(means: Vec<f64>, class: Label) -> Self {
        Self {
            weights: means.into_iter().map(|w| w.clamp(WEIGHT_FLOOR, 1.0)).collect(),
            class,
        }
    }
}

/// Per-instance weight: mean similarity to the other points of the same
/// class, clamped to `[1e-6, 1]`. A singleton gets weight 1.
pub fn class_weights(x_class: &DenseMatrix, class: Label, params: &FuzzyParams) -> Result<WeightVector> {
    let sim = indiscernibility_matrix(x_class, params)?;
    let all: Vec<usize> = (0..x_class.rows()).collect();
    Ok(WeightVector::from_means(sim.subset_means(&all), class))
}

/// Similarities of a training set split by class, computed once per γ and
/// reused across every τ and penalty on that γ.
#[derive(Debug, Clone)]
pub struct ClassSimilarity {
    pub params: FuzzyParams,
    pub majority: SimilarityMatrix,
    pub minority: SimilarityMatrix,
    /// `R(majority_i, minority_j)`; only materialized for lower-approximation
    /// scoring.
    pub cross: Option<DenseMatrix>,
    scores: Vec<f64>,
}

impl ClassSimilarity {
    pub fn new(split: &ClassSplit, params: &FuzzyParams) -> Result<Self> {
        let majority = indiscernibility_matrix(&split.majority, params)?;
        let minority = indiscernibility_matrix(&split.minority, params)?;
        let cross = match params.score_mode {
            ScoreMode::LowerApprox => Some(cross_similarity(&split.majority, &split.minority, params)),
            ScoreMode::Density => None,
        };
        let mut out = Self {
            params: *params,
            majority,
            minority,
            cross,
            scores: Vec::new(),
        };
        out.scores = out.compute_scores();
        Ok(out)
    }

    /// Positive-region scores of the majority instances. Matches
    /// [`positive_region_scores`] on the same rows.
    pub fn majority_scores(&self) -> &[f64] {
        &self.scores
    }

    fn compute_scores(&self) -> Vec<f64> {
        let p = self.majority.len();
        match (self.params.score_mode, self.cross.as_ref()) {
            (ScoreMode::Density, _) | (ScoreMode::LowerApprox, None) => {
                self.majority.subset_means(&(0..p).collect::<Vec<_>>())
            }
            (ScoreMode::LowerApprox, Some(cross)) => {
                let imp = self.params.implicator;
                (0..p)
                    .map(|y| {
                        let same = self
                            .majority
                            .values
                            .row(y)
                            .iter()
                            .map(|&r| imp.apply(r, 1.0))
                            .fold(f64::INFINITY, f64::min);
                        let other = cross
                            .row(y)
                            .iter()
                            .map(|&r| imp.apply(r, 0.0))
                            .fold(f64::INFINITY, f64::min);
                        same.min(other)
                    })
                    .collect()
            }
        }
    }

    /// Weights of the kept majority instances, computed among the kept set.
    pub fn majority_weights(&self, kept: &[usize]) -> WeightVector {
        WeightVector::from_means(self.majority.subset_means(kept), Label::Negative)
    }

    pub fn minority_weights(&self) -> WeightVector {
        let all: Vec<usize> = (0..self.minority.len()).collect();
        WeightVector::from_means(self.minority.subset_means(&all), Label::Positive)
    }
}
