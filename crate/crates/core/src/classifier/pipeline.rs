use crate::dataset::{minmax_apply, minmax_fit, split_by_class, ClassSplit, Label, LabeledDataset, ScalingParams};
use crate::error::{Error, Result};
use crate::fuzzy_rough::{subsample_majority, ClassSimilarity, FuzzyParams, WeightVector};

use super::kernel::fit_kernel;
use super::linear::fit_linear;
use super::{Kernel, Model, TrainConfig};

/// A training set scaled with parameters fit on its own rows and split by
/// class. Everything downstream of scaling reads from here, so grid searches
/// can share one instance across all grid points.
#[derive(Debug, Clone)]
pub struct PreparedTraining {
    pub scaling: ScalingParams,
    pub split: ClassSplit,
}

impl PreparedTraining {
    pub fn new(ds: &LabeledDataset) -> Result<Self> {
        let scaling = minmax_fit(ds.features());
        let scaled = LabeledDataset::from_parts(minmax_apply(&scaling, ds.features())?, ds.labels().to_vec())?;
        Ok(Self {
            scaling,
            split: split_by_class(&scaled)?,
        })
    }

    pub fn similarity(&self, fuzzy: &FuzzyParams) -> Result<ClassSimilarity> {
        ClassSimilarity::new(&self.split, fuzzy)
    }

    /// Fits one model. `sim` must have been built from this training set with
    /// `config.fuzzy`; it is computed on the spot when absent and needed.
    pub fn fit(&self, config: &TrainConfig, sim: Option<&ClassSimilarity>) -> Result<Model> {
        config.validate()?;
        let owned;
        let sim = if config.subsample || config.weights {
            match sim {
                Some(s) if s.params == config.fuzzy => Some(s),
                Some(_) => {
                    return Err(Error::Parameter(
                        "similarity cache was built with different fuzzy parameters".into(),
                    ))
                }
                None => {
                    owned = self.similarity(&config.fuzzy)?;
                    Some(&owned)
                }
            }
        } else {
            None
        };

        let m2 = self.split.m2();
        let kept: Vec<usize> = match (config.subsample, sim) {
            (true, Some(s)) => subsample_majority(s.majority_scores(), config.tau)?.kept,
            _ => (0..m2).collect(),
        };
        let x1 = &self.split.minority;
        let x2hat = self.split.majority.select_rows(&kept);
        let (d1, d2) = match (config.weights, sim) {
            (true, Some(s)) => (s.minority_weights(), s.majority_weights(&kept)),
            _ => (
                WeightVector::ones(x1.rows(), Label::Positive),
                WeightVector::ones(kept.len(), Label::Negative),
            ),
        };
        let scaling = Some(self.scaling.clone());
        Ok(match config.kernel {
            Kernel::Linear => {
                let mut m = fit_linear(x1, &x2hat, &d1, &d2, config)?;
                m.scaling = scaling;
                m.summary.m2 = m2;
                Model::Linear(m)
            }
            Kernel::Gaussian { .. } => {
                let mut m = fit_kernel(x1, &x2hat, &d1, &d2, config)?;
                m.scaling = scaling;
                m.summary.m2 = m2;
                Model::Kernel(m)
            }
        })
    }
}

/// Scale, subsample the majority class, weight both classes and fit.
pub fn fit_frlstsvm(ds: &LabeledDataset, config: &TrainConfig) -> Result<Model> {
    PreparedTraining::new(ds)?.fit(config, None)
}
