//! Twin-hyperplane classifiers: the weighted fuzzy-rough model (linear and
//! Gaussian kernel), the unweighted least-squares baseline and the complete
//! training pipeline.

mod kernel;
mod linear;
mod model_io;
mod pipeline;
pub mod solver;

pub use kernel::{fit_kernel, fit_kernel_lstsvm_baseline, gaussian_kernel, kernel_matrix, KernelModel, KernelSurface};
pub use linear::{fit_linear, fit_lstsvm_baseline, LinearModel};
pub use model_io::{load_model, read_model, save_model, write_model};
pub use pipeline::{fit_frlstsvm, PreparedTraining};

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dataset::{Label, ScalingParams};
use crate::error::{Error, Result};
use crate::fuzzy_rough::FuzzyParams;
use crate::linalg::{DenseMatrix, SpdSolveReport};

pub use solver::SolveReports;

pub const DEFAULT_DELTA: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Kernel {
    Linear,
    Gaussian { sigma: f64 },
}

impl Kernel {
    pub fn name(&self) -> &'static str {
        match self {
            Kernel::Linear => "linear",
            Kernel::Gaussian { .. } => "gaussian",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Linear => f.write_str("linear"),
            Kernel::Gaussian { sigma } => write!(f, "gaussian(sigma={sigma})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum KernelKind {
    Linear,
    Gaussian,
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "linear" => Ok(KernelKind::Linear),
            "gaussian" | "rbf" => Ok(KernelKind::Gaussian),
            other => Err(Error::Parameter(format!("unknown kernel {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub c1: f64,
    pub c2: f64,
    pub delta: f64,
    pub tau: f64,
    pub fuzzy: FuzzyParams,
    pub kernel: Kernel,
    pub subsample: bool,
    pub weights: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            c1: 1.0,
            c2: 1.0,
            delta: DEFAULT_DELTA,
            tau: 0.0,
            fuzzy: FuzzyParams::default(),
            kernel: Kernel::Linear,
            subsample: true,
            weights: true,
        }
    }
}

impl TrainConfig {
    /// Plain least-squares twin SVM: no subsampling, unit weights.
    pub fn baseline(c1: f64, c2: f64, delta: f64) -> Self {
        Self {
            c1,
            c2,
            delta,
            subsample: false,
            weights: false,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::Parameter(format!("{name} must be a finite value > 0, got {v}")))
            }
        };
        positive("c1", self.c1)?;
        positive("c2", self.c2)?;
        if !(self.delta >= 0.0 && self.delta.is_finite()) {
            return Err(Error::Parameter(format!("delta must be >= 0, got {}", self.delta)));
        }
        if !(0.0..=1.0).contains(&self.tau) {
            return Err(Error::Parameter(format!("tau must lie in [0, 1], got {}", self.tau)));
        }
        self.fuzzy.validate()?;
        if let Kernel::Gaussian { sigma } = self.kernel {
            positive("sigma", sigma)?;
        }
        Ok(())
    }
}

/// `wᵀx + b = 0`. A plane whose normal vanishes is flagged degenerate and
/// ignored at prediction time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Hyperplane {
    pub w: Vec<f64>,
    pub b: f64,
    pub degenerate: bool,
}

impl Hyperplane {
    /// Splits `u = [w; b]`.
    pub fn from_augmented(u: &[f64]) -> Self {
        let (w, b) = u.split_at(u.len() - 1);
        let degenerate = !(crate::linalg::norm(w) > 0.0);
        Self {
            w: w.to_vec(),
            b: b[0],
            degenerate,
        }
    }

    pub fn augmented(&self) -> Vec<f64> {
        let mut u = self.w.clone();
        u.push(self.b);
        u
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            w: self.w.iter().map(|v| v * c).collect(),
            b: self.b * c,
            degenerate: self.degenerate,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingSummary {
    pub m1: usize,
    pub m2: usize,
    /// Majority rows left after subsampling.
    pub m2_kept: usize,
    pub solver: SolveReports,
}

impl TrainingSummary {
    pub fn max_ridge(&self) -> f64 {
        let r = &self.solver;
        [r.gram1, r.gram2, r.inner1, r.inner2]
            .iter()
            .map(|s: &SpdSolveReport| s.ridge_added)
            .fold(0.0, f64::max)
    }
}

/// Prediction with the two plane distances (`+∞` for a degenerate plane).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub label: Label,
    pub dist1: f64,
    pub dist2: f64,
}

impl Decision {
    /// Nearest plane wins; an exact tie goes to the minority class.
    pub(crate) fn from_distances(dist1: f64, dist2: f64) -> Result<Self> {
        if dist1.is_infinite() && dist2.is_infinite() {
            return Err(Error::DegenerateModel);
        }
        let label = if dist1 <= dist2 {
            Label::Positive
        } else {
            Label::Negative
        };
        Ok(Self { label, dist1, dist2 })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Model {
    Linear(LinearModel),
    Kernel(KernelModel),
}

impl Model {
    pub fn n_attributes(&self) -> usize {
        match self {
            Model::Linear(m) => m.n_attributes(),
            Model::Kernel(m) => m.n_attributes(),
        }
    }

    pub fn config(&self) -> &TrainConfig {
        match self {
            Model::Linear(m) => &m.config,
            Model::Kernel(m) => &m.config,
        }
    }

    pub fn summary(&self) -> &TrainingSummary {
        match self {
            Model::Linear(m) => &m.summary,
            Model::Kernel(m) => &m.summary,
        }
    }

    pub fn scaling(&self) -> Option<&ScalingParams> {
        match self {
            Model::Linear(m) => m.scaling.as_ref(),
            Model::Kernel(m) => m.scaling.as_ref(),
        }
    }

    /// Classifies one raw (unscaled) row.
    pub fn decide(&self, x_raw: &[f64]) -> Result<Decision> {
        match self {
            Model::Linear(m) => m.decide(x_raw),
            Model::Kernel(m) => m.decide(x_raw),
        }
    }

    pub fn predict(&self, x_raw: &[f64]) -> Result<Label> {
        self.decide(x_raw).map(|d| d.label)
    }

    pub fn decide_all(&self, x_raw: &DenseMatrix) -> Result<Vec<Decision>> {
        x_raw.row_iter().map(|r| self.decide(r)).collect()
    }

    pub fn predict_all(&self, x_raw: &DenseMatrix) -> Result<Vec<Label>> {
        x_raw.row_iter().map(|r| self.predict(r)).collect()
    }
}

/// Applies `scaling` to a copy of `x_raw` after checking its width.
pub(crate) fn prepare_input(scaling: Option<&ScalingParams>, n: usize, x_raw: &[f64]) -> Result<Vec<f64>> {
    if x_raw.len() != n {
        return Err(Error::Shape(format!(
            "model expects {n} attributes, got {}",
            x_raw.len()
        )));
    }
    let mut x = x_raw.to_vec();
    if let Some(s) = scaling {
        s.apply_row(&mut x)?;
    }
    Ok(x)
}
