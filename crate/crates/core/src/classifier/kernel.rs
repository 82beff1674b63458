use crate::dataset::ScalingParams;
use crate::error::{Error, Result};
use crate::fuzzy_rough::WeightVector;
use crate::linalg::{dot, DenseMatrix};

use super::solver::{dual_planes, primal_planes, TwinSolution};
use super::{prepare_input, Decision, Kernel, TrainConfig, TrainingSummary};

pub fn gaussian_kernel(x: &[f64], y: &[f64], sigma: f64) -> f64 {
    let d2: f64 = x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum();
    (-d2 / (2.0 * sigma * sigma)).exp()
}

/// `K(a_i, b_j)` for the Gaussian kernel.
pub fn kernel_matrix(a: &DenseMatrix, b: &DenseMatrix, sigma: f64) -> DenseMatrix {
    DenseMatrix::from_fn(a.rows(), b.rows(), |i, j| gaussian_kernel(a.row(i), b.row(j), sigma))
}

fn symmetric_kernel_matrix(a: &DenseMatrix, sigma: f64) -> DenseMatrix {
    let p = a.rows();
    let mut k = DenseMatrix::zeros(p, p);
    for i in 0..p {
        k[(i, i)] = 1.0;
        for j in 0..i {
            let v = gaussian_kernel(a.row(i), a.row(j), sigma);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    k
}

/// `K(x, X_ref)·coef + b = 0`, with `norm = √(coefᵀ K(X_ref, X_ref) coef)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSurface {
    pub coef: Vec<f64>,
    pub b: f64,
    pub norm: f64,
    pub degenerate: bool,
}

impl KernelSurface {
    pub(crate) fn new(u: &[f64], gram: &DenseMatrix) -> Result<Self> {
        let (coef, b) = u.split_at(u.len() - 1);
        let kw = gram.matvec(coef)?;
        let sq = dot(coef, &kw);
        let degenerate = !(sq > 0.0);
        Ok(Self {
            coef: coef.to_vec(),
            b: b[0],
            norm: if degenerate { 0.0 } else { sq.sqrt() },
            degenerate,
        })
    }

    fn distance(&self, kx: &[f64]) -> f64 {
        if self.degenerate {
            return f64::INFINITY;
        }
        (dot(kx, &self.coef) + self.b).abs() / self.norm
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            coef: self.coef.iter().map(|v| v * c).collect(),
            b: self.b * c,
            norm: self.norm * c,
            degenerate: self.degenerate,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelModel {
    /// Minority rows stacked over the kept majority rows.
    pub xref: DenseMatrix,
    pub surface1: KernelSurface,
    pub surface2: KernelSurface,
    pub sigma: f64,
    /// `K(X_ref, X_ref)`.
    pub gram: DenseMatrix,
    pub scaling: Option<ScalingParams>,
    pub config: TrainConfig,
    pub summary: TrainingSummary,
}

impl KernelModel {
    pub(crate) fn assemble(
        xref: DenseMatrix,
        u1: &[f64],
        u2: &[f64],
        sigma: f64,
        config: TrainConfig,
        summary: TrainingSummary,
    ) -> Result<Self> {
        let gram = symmetric_kernel_matrix(&xref, sigma);
        if u1.len() != xref.rows() + 1 || u2.len() != xref.rows() + 1 {
            return Err(Error::Shape(format!(
                "kernel coefficients must have {} entries",
                xref.rows() + 1
            )));
        }
        Ok(Self {
            surface1: KernelSurface::new(u1, &gram)?,
            surface2: KernelSurface::new(u2, &gram)?,
            xref,
            sigma,
            gram,
            scaling: None,
            config,
            summary,
        })
    }

    pub fn n_attributes(&self) -> usize {
        self.xref.cols()
    }

    pub fn distances(&self, x: &[f64]) -> (f64, f64) {
        let kx: Vec<f64> = self
            .xref
            .row_iter()
            .map(|r| gaussian_kernel(x, r, self.sigma))
            .collect();
        (self.surface1.distance(&kx), self.surface2.distance(&kx))
    }

    pub fn decide(&self, x_raw: &[f64]) -> Result<Decision> {
        let x = prepare_input(self.scaling.as_ref(), self.n_attributes(), x_raw)?;
        let (d1, d2) = self.distances(&x);
        Decision::from_distances(d1, d2)
    }
}

fn sigma_of(config: &TrainConfig) -> Result<f64> {
    match config.kernel {
        Kernel::Gaussian { sigma } => Ok(sigma),
        Kernel::Linear => Err(Error::Parameter("kernel fit needs a gaussian kernel".into())),
    }
}

fn kernel_blocks(x1: &DenseMatrix, x2: &DenseMatrix, sigma: f64) -> Result<(DenseMatrix, DenseMatrix, DenseMatrix)> {
    if x1.cols() != x2.cols() {
        return Err(Error::Shape("class blocks differ in width".into()));
    }
    let mut data = x1.as_slice().to_vec();
    data.extend_from_slice(x2.as_slice());
    let xref = DenseMatrix::new(x1.rows() + x2.rows(), x1.cols(), data)?;
    let p = kernel_matrix(x1, &xref, sigma).augment_ones();
    let q = kernel_matrix(x2, &xref, sigma).augment_ones();
    Ok((xref, p, q))
}

fn finish(
    xref: DenseMatrix,
    sol: TwinSolution,
    sigma: f64,
    config: TrainConfig,
    m1: usize,
    m2: usize,
) -> Result<KernelModel> {
    let summary = TrainingSummary {
        m1,
        m2,
        m2_kept: m2,
        solver: sol.reports,
    };
    KernelModel::assemble(xref, &sol.u1, &sol.u2, sigma, config, summary)
}

/// Weighted kernel twin surfaces; the linear algebra of [`super::fit_linear`]
/// with `P = [K(X₁, X_ref) | 1]` and `Q = [K(X̂₂, X_ref) | 1]`.
pub fn fit_kernel(
    x1: &DenseMatrix,
    x2hat: &DenseMatrix,
    d1: &WeightVector,
    d2: &WeightVector,
    config: &TrainConfig,
) -> Result<KernelModel> {
    config.validate()?;
    let sigma = sigma_of(config)?;
    let (xref, p, q) = kernel_blocks(x1, x2hat, sigma)?;
    let sol = dual_planes(&p, &q, &d1.weights, &d2.weights, config.c1, config.c2, config.delta)?;
    finish(xref, sol, sigma, *config, x1.rows(), x2hat.rows())
}

/// Unweighted kernel least-squares twin SVM from the primal normal equations.
pub fn fit_kernel_lstsvm_baseline(
    x1: &DenseMatrix,
    x2: &DenseMatrix,
    c1: f64,
    c2: f64,
    delta: f64,
    sigma: f64,
) -> Result<KernelModel> {
    let config = TrainConfig {
        kernel: Kernel::Gaussian { sigma },
        ..TrainConfig::baseline(c1, c2, delta)
    };
    config.validate()?;
    let (xref, p, q) = kernel_blocks(x1, x2, sigma)?;
    let sol = primal_planes(&p, &q, c1, c2, delta)?;
    finish(xref, sol, sigma, config, x1.rows(), x2.rows())
}
