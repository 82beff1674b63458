//! Labelled binary-classification data: loading, scaling, class split and
//! stratified folds.
//!
//! Internally `+1` ([`Label::Positive`]) is always the minority class and
//! `−1` ([`Label::Negative`]) the majority. Loaders map the user-supplied
//! positive label to `+1` and every other label value to `−1`.

mod csv;
mod folds;
mod keel;
mod scaling;

pub use self::csv::{load_csv, parse_csv, parse_feature_csv, write_csv, CsvOptions, LabelColumn};
pub use self::folds::{stratified_kfold, FoldPlan};
pub use self::keel::{load_keel, parse_keel};
pub use self::scaling::{minmax_apply, minmax_fit, ScalingParams};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    /// `+1`, the minority class.
    Positive,
    /// `−1`, the majority class.
    Negative,
}

impl Label {
    pub fn sign(self) -> i8 {
        match self {
            Label::Positive => 1,
            Label::Negative => -1,
        }
    }

    pub fn from_sign(v: i64) -> Result<Label> {
        match v {
            1 => Ok(Label::Positive),
            -1 => Ok(Label::Negative),
            other => Err(Error::InvalidDataset(format!("label {other} is not one of +1, -1"))),
        }
    }

    pub fn opposite(self) -> Label {
        match self {
            Label::Positive => Label::Negative,
            Label::Negative => Label::Positive,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Label::Positive => "minority (+1)",
            Label::Negative => "majority (-1)",
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.sign())
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Label> {
        let v: i64 = s
            .trim()
            .trim_start_matches('+')
            .parse()
            .map_err(|_| Error::InvalidDataset(format!("label {s:?} is not one of +1, -1")))?;
        Label::from_sign(v)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: DenseMatrix,
    labels: Vec<Label>,
    attribute_names: Vec<String>,
    scaling: Option<ScalingParams>,
}

impl LabeledDataset {
    /// Validates the invariants: at least two rows, one attribute, finite
    /// values and both classes present. Logs a warning when the `+1` class is
    /// not the smaller one.
    pub fn new(features: DenseMatrix, labels: Vec<Label>, attribute_names: Vec<String>) -> Result<Self> {
        let ds = Self::new_unchecked_classes(features, labels, attribute_names)?;
        let (pos, neg) = ds.class_counts();
        if pos == 0 {
            return Err(Error::SingleClass(Label::Negative.name()));
        }
        if neg == 0 {
            return Err(Error::SingleClass(Label::Positive.name()));
        }
        if pos > neg {
            log::warn!(
                "positive (+1) class has {pos} rows but the negative class only {neg}; \
                 +1 is expected to be the minority"
            );
        }
        Ok(ds)
    }

    fn new_unchecked_classes(features: DenseMatrix, labels: Vec<Label>, attribute_names: Vec<String>) -> Result<Self> {
        let (m, n) = features.shape();
        if m != labels.len() {
            return Err(Error::Shape(format!("{m} feature rows but {} labels", labels.len())));
        }
        if n != attribute_names.len() {
            return Err(Error::Shape(format!(
                "{n} feature columns but {} attribute names",
                attribute_names.len()
            )));
        }
        if m < 2 {
            return Err(Error::InvalidDataset(format!("need at least 2 rows, got {m}")));
        }
        if n < 1 {
            return Err(Error::InvalidDataset("need at least 1 attribute".into()));
        }
        Ok(Self {
            features,
            labels,
            attribute_names,
            scaling: None,
        })
    }

    /// Convenience constructor with generated attribute names `a0, a1, …`.
    pub fn from_parts(features: DenseMatrix, labels: Vec<Label>) -> Result<Self> {
        let names = (0..features.cols()).map(|j| format!("a{j}")).collect();
        Self::new(features, labels, names)
    }

    pub fn features(&self) -> &DenseMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn attribute_names(&self) -> &[String] {
        &self.attribute_names
    }

    pub fn scaling(&self) -> Option<&ScalingParams> {
        self.scaling.as_ref()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn n_attributes(&self) -> usize {
        self.features.cols()
    }

    /// `(count(+1), count(−1))`.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l == Label::Positive).count();
        (pos, self.labels.len() - pos)
    }

    /// Rows `idx`, in that order. Both classes must survive the selection.
    pub fn subset(&self, idx: &[usize]) -> Result<Self> {
        let features = self.features.select_rows(idx);
        let labels = idx.iter().map(|&i| self.labels[i]).collect();
        let mut ds = Self::new(features, labels, self.attribute_names.clone())?;
        ds.scaling = self.scaling.clone();
        Ok(ds)
    }

    /// Returns a copy with features min-max scaled by `params`.
    pub fn scaled(&self, params: &ScalingParams) -> Result<Self> {
        let features = minmax_apply(params, &self.features)?;
        Ok(Self {
            features,
            labels: self.labels.clone(),
            attribute_names: self.attribute_names.clone(),
            scaling: Some(params.clone()),
        })
    }
}

/// Rows of each class, with their original row indices.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSplit {
    pub minority: DenseMatrix,
    pub majority: DenseMatrix,
    pub minority_rows: Vec<usize>,
    pub majority_rows: Vec<usize>,
}

impl ClassSplit {
    pub fn m1(&self) -> usize {
        self.minority.rows()
    }

    pub fn m2(&self) -> usize {
        self.majority.rows()
    }
}

pub fn split_by_class(ds: &LabeledDataset) -> Result<ClassSplit> {
    split_rows(ds.features(), ds.labels())
}

pub(crate) fn split_rows(x: &DenseMatrix, labels: &[Label]) -> Result<ClassSplit> {
    let (minority_rows, majority_rows): (Vec<usize>, Vec<usize>) =
        (0..labels.len()).partition(|&i| labels[i] == Label::Positive);
    if minority_rows.is_empty() {
        return Err(Error::SingleClass(Label::Negative.name()));
    }
    if majority_rows.is_empty() {
        return Err(Error::SingleClass(Label::Positive.name()));
    }
    Ok(ClassSplit {
        minority: x.select_rows(&minority_rows),
        majority: x.select_rows(&majority_rows),
        minority_rows,
        majority_rows,
    })
}

/// Majority count over minority count, `m₂ / m₁`.
pub fn imbalance_ratio(ds: &LabeledDataset) -> f64 {
    let (pos, neg) = ds.class_counts();
    neg as f64 / pos as f64
}
