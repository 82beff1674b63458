//! Confusion-matrix statistics for imbalanced evaluation.
//!
//! Two conventions are supported. `Standard` uses recall-style ratios,
//! `Sen = TP/(TP+FN)` and `Spe = TN/(TN+FP)`. `PaperLiteral` uses the
//! predictive-value ratios `Sen = TP/(TP+FP)` and `Spe = TN/(TN+FN)`.
//! Accuracy and `G-mean = √(Sen·Spe)` are defined the same way in both.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::Label;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub fp: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.tp + self.fn_ + self.fp + self.tn
    }

    /// Class roles exchanged.
    pub fn swapped(&self) -> Self {
        Self {
            tp: self.tn,
            fn_: self.fp,
            fp: self.fn_,
            tn: self.tp,
        }
    }
}

impl std::ops::AddAssign for ConfusionMatrix {
    fn add_assign(&mut self, o: Self) {
        self.tp += o.tp;
        self.fn_ += o.fn_;
        self.fp += o.fp;
        self.tn += o.tn;
    }
}

pub fn confusion(y_true: &[Label], y_pred: &[Label]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::Shape(format!(
            "{} true labels but {} predictions",
            y_true.len(),
            y_pred.len()
        )));
    }
    if y_true.is_empty() {
        return Err(Error::InvalidDataset("no predictions to evaluate".into()));
    }
    let mut cm = ConfusionMatrix::default();
    for (&t, &p) in y_true.iter().zip(y_pred) {
        match (t, p) {
            (Label::Positive, Label::Positive) => cm.tp += 1,
            (Label::Positive, Label::Negative) => cm.fn_ += 1,
            (Label::Negative, Label::Positive) => cm.fp += 1,
            (Label::Negative, Label::Negative) => cm.tn += 1,
        }
    }
    Ok(cm)
}

/// Like [`confusion`] but on raw `±1` integers, rejecting anything else.
pub fn confusion_from_signs(y_true: &[i64], y_pred: &[i64]) -> Result<ConfusionMatrix> {
    let t = y_true
        .iter()
        .map(|&v| Label::from_sign(v))
        .collect::<Result<Vec<_>>>()?;
    let p = y_pred
        .iter()
        .map(|&v| Label::from_sign(v))
        .collect::<Result<Vec<_>>>()?;
    confusion(&t, &p)
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MetricConvention {
    #[default]
    Standard,
    PaperLiteral,
}

impl FromStr for MetricConvention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "standard" => Ok(Self::Standard),
            "paper-literal" | "paper_literal" | "literal" => Ok(Self::PaperLiteral),
            _ => Err(Error::Parameter(format!("unknown metric convention {s:?}"))),
        }
    }
}

impl fmt::Display for MetricConvention {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Standard => "standard",
            Self::PaperLiteral => "paper_literal",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub sensitivity: f64,
    pub specificity: f64,
    pub accuracy: f64,
    pub gmean: f64,
    pub convention: MetricConvention,
    /// A 0/0 ratio was replaced by 0.
    pub degenerate: bool,
}

impl MetricReport {
    /// `dataset,config,acc,sen,spe,gmean,convention`
    pub fn csv_line(&self, dataset: &str, config: &str) -> String {
        format!(
            "{dataset},{config},{},{},{},{},{}",
            self.accuracy, self.sensitivity, self.specificity, self.gmean, self.convention
        )
    }

    pub fn table(&self) -> String {
        format!(
            "{:<12}{:>10}\n{:<12}{:>10.4}\n{:<12}{:>10.4}\n{:<12}{:>10.4}\n{:<12}{:>10.4}\n",
            "convention",
            self.convention.to_string(),
            "accuracy",
            self.accuracy,
            "sensitivity",
            self.sensitivity,
            "specificity",
            self.specificity,
            "g-mean",
            self.gmean
        )
    }
}

fn ratio(num: u64, den: u64, degenerate: &mut bool) -> f64 {
    if den == 0 {
        *degenerate = true;
        0.0
    } else {
        num as f64 / den as f64
    }
}

pub fn report(cm: &ConfusionMatrix, convention: MetricConvention) -> MetricReport {
    let mut degenerate = false;
    let (sensitivity, specificity) = match convention {
        MetricConvention::Standard => (
            ratio(cm.tp, cm.tp + cm.fn_, &mut degenerate),
            ratio(cm.tn, cm.tn + cm.fp, &mut degenerate),
        ),
        MetricConvention::PaperLiteral => (
            ratio(cm.tp, cm.tp + cm.fp, &mut degenerate),
            ratio(cm.tn, cm.tn + cm.fn_, &mut degenerate),
        ),
    };
    let accuracy = ratio(cm.tp + cm.tn, cm.total(), &mut degenerate);
    MetricReport {
        sensitivity,
        specificity,
        accuracy,
        gmean: (sensitivity * specificity).sqrt(),
        convention,
        degenerate,
    }
}
