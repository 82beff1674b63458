use crate::dataset::ScalingParams;
use crate::error::Result;
use crate::fuzzy_rough::WeightVector;
use crate::linalg::{dot, norm, DenseMatrix};

use super::solver::{dual_planes, primal_planes, TwinSolution};
use super::{prepare_input, Decision, Hyperplane, Kernel, TrainConfig, TrainingSummary};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearModel {
    /// Proximal to the minority class.
    pub plane1: Hyperplane,
    /// Proximal to the majority class.
    pub plane2: Hyperplane,
    /// `None` when the model was fit on already-prepared features.
    pub scaling: Option<ScalingParams>,
    pub config: TrainConfig,
    pub summary: TrainingSummary,
}

impl LinearModel {
    fn from_solution(sol: TwinSolution, config: TrainConfig, m1: usize, m2: usize) -> Self {
        Self {
            plane1: Hyperplane::from_augmented(&sol.u1),
            plane2: Hyperplane::from_augmented(&sol.u2),
            scaling: None,
            config: TrainConfig {
                kernel: Kernel::Linear,
                ..config
            },
            summary: TrainingSummary {
                m1,
                m2,
                m2_kept: m2,
                solver: sol.reports,
            },
        }
    }

    pub fn n_attributes(&self) -> usize {
        self.plane1.w.len()
    }

    /// Distances of an already-scaled point to both planes.
    pub fn distances(&self, x: &[f64]) -> (f64, f64) {
        (plane_distance(&self.plane1, x), plane_distance(&self.plane2, x))
    }

    pub fn decide(&self, x_raw: &[f64]) -> Result<Decision> {
        let x = prepare_input(self.scaling.as_ref(), self.n_attributes(), x_raw)?;
        let (d1, d2) = self.distances(&x);
        Decision::from_distances(d1, d2)
    }
}

fn plane_distance(p: &Hyperplane, x: &[f64]) -> f64 {
    if p.degenerate {
        return f64::INFINITY;
    }
    (dot(&p.w, x) + p.b).abs() / norm(&p.w)
}

/// Weighted twin planes for minority rows `x1` and (reduced) majority rows
/// `x2hat`, through the multiplier systems.
pub fn fit_linear(
    x1: &DenseMatrix,
    x2hat: &DenseMatrix,
    d1: &WeightVector,
    d2: &WeightVector,
    config: &TrainConfig,
) -> Result<LinearModel> {
    config.validate()?;
    let h = x1.augment_ones();
    let g = x2hat.augment_ones();
    let sol = dual_planes(&h, &g, &d1.weights, &d2.weights, config.c1, config.c2, config.delta)?;
    Ok(LinearModel::from_solution(sol, *config, x1.rows(), x2hat.rows()))
}

/// Plain least-squares twin SVM from the primal normal equations.
pub fn fit_lstsvm_baseline(x1: &DenseMatrix, x2: &DenseMatrix, c1: f64, c2: f64, delta: f64) -> Result<LinearModel> {
    let config = TrainConfig::baseline(c1, c2, delta);
    config.validate()?;
    let sol = primal_planes(&x1.augment_ones(), &x2.augment_ones(), c1, c2, delta)?;
    Ok(LinearModel::from_solution(sol, config, x1.rows(), x2.rows()))
}
