//! Closed-form twin-plane solves shared by the linear and kernel models.
//!
//! With `H = [X₁ | 1]` (minority) and `G = [X̂₂ | 1]` (majority), the planes
//! `u₁ = [w₁; b₁]` and `u₂ = [w₂; b₂]` minimize
//!
//! ```text
//! F₁(u) = ½‖Hu‖² + δ/2‖u‖² + c₁/2 (Gu + e)ᵀ D₂ (Gu + e)
//! F₂(u) = ½‖Gu‖² + δ/2‖u‖² + c₂/2 (e − Hu)ᵀ D₁ (e − Hu)
//! ```
//!
//! [`dual_planes`] goes through the multipliers α, β (systems of the size of
//! each class), [`primal_planes`] solves the unweighted normal equations
//! directly (systems of the size of `u`). With unit weights both describe
//! the same minimizers.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::linalg::{dot, gram, spd_solve, spd_solve_vec, DenseMatrix, SpdSolveReport};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct SolveReports {
    /// `(HᵀH + δI)` for plane 1, `(GᵀG + δI)` for plane 2.
    pub gram1: SpdSolveReport,
    pub gram2: SpdSolveReport,
    /// α and β systems; equal to the Gram reports on the primal route.
    pub inner1: SpdSolveReport,
    pub inner2: SpdSolveReport,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwinSolution {
    pub u1: Vec<f64>,
    pub u2: Vec<f64>,
    pub reports: SolveReports,
}

/// `α = (D⁻¹/c + B·(AᵀA + δI)⁻¹·Bᵀ)⁻¹·e`, returning `(AᵀA + δI)⁻¹·Bᵀ` and α.
fn multipliers(
    a: &DenseMatrix,
    b: &DenseMatrix,
    weights: &[f64],
    c: f64,
    delta: f64,
) -> Result<(DenseMatrix, Vec<f64>, SpdSolveReport, SpdSolveReport)> {
    let reg = gram(a).add_scaled_identity(delta)?;
    let (y, gram_report) = spd_solve(&reg, &b.transpose())?;
    // B·Y is symmetric in exact arithmetic; build the lower triangle and
    // mirror it
    let yt = y.transpose();
    let m = b.rows();
    let mut inner = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = dot(b.row(i), yt.row(j));
            inner[(i, j)] = v;
            inner[(j, i)] = v;
        }
        inner[(i, i)] += 1.0 / (c * weights[i]);
    }
    let ones = vec![1.0; b.rows()];
    let (alpha, inner_report) = spd_solve_vec(&inner, &ones)?;
    Ok((y, alpha, gram_report, inner_report))
}

/// Weighted planes through the multiplier systems.
///
/// `d1` weights the rows of `h` (minority), `d2` the rows of `g`
/// (majority); all weights must be positive.
pub fn dual_planes(
    h: &DenseMatrix,
    g: &DenseMatrix,
    d1: &[f64],
    d2: &[f64],
    c1: f64,
    c2: f64,
    delta: f64,
) -> Result<TwinSolution> {
    check_shapes(h, g, Some((d1, d2)))?;
    // u₁ = −(HᵀH + δI)⁻¹Gᵀα
    let (y, alpha, gram1, inner1) = multipliers(h, g, d2, c1, delta)?;
    let u1: Vec<f64> = y.matvec(&alpha)?.into_iter().map(|v| -v).collect();
    // u₂ = (GᵀG + δI)⁻¹Hᵀβ
    let (z, beta, gram2, inner2) = multipliers(g, h, d1, c2, delta)?;
    let u2 = z.matvec(&beta)?;
    Ok(TwinSolution {
        u1,
        u2,
        reports: SolveReports {
            gram1,
            gram2,
            inner1,
            inner2,
        },
    })
}

/// Unweighted planes from the normal equations
///
/// ```text
/// u₁ = −(GᵀG + (HᵀH + δI)/c₁)⁻¹ Gᵀe₂
/// u₂ =  (HᵀH + (GᵀG + δI)/c₂)⁻¹ Hᵀe₁
/// ```
///
/// δ rides with the Gram term it regularizes, so this matches
/// [`dual_planes`] with unit weights exactly in exact arithmetic.
pub fn primal_planes(h: &DenseMatrix, g: &DenseMatrix, c1: f64, c2: f64, delta: f64) -> Result<TwinSolution> {
    check_shapes(h, g, None)?;
    let hh = gram(h);
    let gg = gram(g);
    let combine = |own: &DenseMatrix, other: &DenseMatrix, c: f64| -> Result<DenseMatrix> {
        let reg = other.add_scaled_identity(delta)?;
        let data: Vec<f64> = own
            .as_slice()
            .iter()
            .zip(reg.as_slice())
            .map(|(a, b)| a + b / c)
            .collect();
        DenseMatrix::new(own.rows(), own.cols(), data)
    };
    let a1 = combine(&gg, &hh, c1)?;
    let rhs1 = g.tr_matvec(&vec![1.0; g.rows()])?;
    let (u1, r1) = spd_solve_vec(&a1, &rhs1)?;
    let a2 = combine(&hh, &gg, c2)?;
    let rhs2 = h.tr_matvec(&vec![1.0; h.rows()])?;
    let (u2, r2) = spd_solve_vec(&a2, &rhs2)?;
    Ok(TwinSolution {
        u1: u1.into_iter().map(|v| -v).collect(),
        u2,
        reports: SolveReports {
            gram1: r1,
            gram2: r2,
            inner1: r1,
            inner2: r2,
        },
    })
}

fn check_shapes(h: &DenseMatrix, g: &DenseMatrix, weights: Option<(&[f64], &[f64])>) -> Result<()> {
    use crate::error::Error;
    if h.cols() != g.cols() {
        return Err(Error::Shape(format!(
            "minority block has {} columns, majority block {}",
            h.cols(),
            g.cols()
        )));
    }
    if h.rows() == 0 || g.rows() == 0 {
        return Err(Error::Shape("both classes need at least one row".into()));
    }
    if let Some((d1, d2)) = weights {
        if d1.len() != h.rows() || d2.len() != g.rows() {
            return Err(Error::Shape(format!(
                "weights ({}, {}) do not match class sizes ({}, {})",
                d1.len(),
                d2.len(),
                h.rows(),
                g.rows()
            )));
        }
        if d1.iter().chain(d2).any(|&w| !(w > 0.0 && w.is_finite())) {
            return Err(Error::Parameter("instance weights must be positive and finite".into()));
        }
    }
    Ok(())
}
