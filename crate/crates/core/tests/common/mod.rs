//! Shared fixtures: seeded generators, bundled dataset paths and an
//! independent minimizer for the weighted twin-plane objectives.

#![allow(dead_code)]

pub mod criteria;

use std::f64::consts::PI;
use std::path::PathBuf;

use frlstsvm::dataset::{load_keel, Label, LabeledDataset};
use frlstsvm::linalg::DenseMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn keel(name: &str) -> LabeledDataset {
    load_keel(data_path(&format!("{name}.dat")), "positive").expect("bundled dataset loads")
}

pub fn uniform_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, lo: f64, hi: f64) -> DenseMatrix {
    DenseMatrix::from_fn(rows, cols, |_, _| rng.random_range(lo..hi))
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.random_range(f64::EPSILON..1.0);
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn labeled(rows: Vec<Vec<f64>>, labels: Vec<Label>) -> LabeledDataset {
    LabeledDataset::from_parts(DenseMatrix::from_rows(&rows).unwrap(), labels).unwrap()
}

/// Overlapping uniform clouds with the minority shifted by `shift` along
/// every attribute.
pub fn random_dataset(seed: u64, m1: usize, m2: usize, n: usize, shift: f64) -> LabeledDataset {
    let mut r = rng(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..m1 + m2 {
        let pos = i < m1;
        let off = if pos { shift } else { 0.0 };
        rows.push((0..n).map(|_| r.random_range(0.0..1.0) + off).collect());
        labels.push(if pos { Label::Positive } else { Label::Negative });
    }
    labeled(rows, labels)
}

/// Two isotropic Gaussian blobs centred at `±sep/2` on the first axis.
pub fn blobs(seed: u64, m1: usize, m2: usize, n: usize, sep: f64, spread: f64) -> LabeledDataset {
    let mut r = rng(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..m1 + m2 {
        let pos = i < m1;
        let centre = if pos { sep / 2.0 } else { -sep / 2.0 };
        let row: Vec<f64> = (0..n)
            .map(|j| if j == 0 { centre } else { 0.0 } + spread * gaussian(&mut r))
            .collect();
        rows.push(row);
        labels.push(if pos { Label::Positive } else { Label::Negative });
    }
    labeled(rows, labels)
}

/// Minority inner disc of radius ≤ 0.4, majority ring between radii 0.8
/// and 1.0, both centred at the origin.
pub fn circles(seed: u64, m1: usize, m2: usize) -> LabeledDataset {
    let mut r = rng(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..m1 + m2 {
        let pos = i < m1;
        let radius = if pos {
            r.random_range(0.0..0.4)
        } else {
            r.random_range(0.8..1.0)
        };
        let angle = r.random_range(0.0..2.0 * PI);
        rows.push(vec![radius * angle.cos(), radius * angle.sin()]);
        labels.push(if pos { Label::Positive } else { Label::Negative });
    }
    labeled(rows, labels)
}

pub fn accuracy(truth: &[Label], pred: &[Label]) -> f64 {
    let hits = truth.iter().zip(pred).filter(|(a, b)| a == b).count();
    hits as f64 / truth.len() as f64
}

/// Quadratic `½uᵀAu − bᵀu` with `A` dense and symmetric positive definite.
pub struct Quadratic {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

impl Quadratic {
    /// `F(u) = ½‖Ou‖² + δ/2‖u‖² + c/2 Σ d_i (sᵢ·(Pu)_i + 1)²` where `s = +1`
    /// gives the plane-1 residual `Pu + e` and `s = −1` the plane-2 residual
    /// `e − Pu`. `own` is `O`, `other` is `P`.
    pub fn twin(own: &DenseMatrix, other: &DenseMatrix, d: &[f64], c: f64, delta: f64, sign: f64) -> Self {
        let n = own.cols();
        let mut a = vec![vec![0.0; n]; n];
        let mut b = vec![0.0; n];
        for r in own.row_iter() {
            for i in 0..n {
                for j in 0..n {
                    a[i][j] += r[i] * r[j];
                }
            }
        }
        for (k, r) in other.row_iter().enumerate() {
            for i in 0..n {
                for j in 0..n {
                    a[i][j] += c * d[k] * r[i] * r[j];
                }
                // expanding c/2·d·(s·pᵀu + 1)² gives a linear term c·d·s·p
                b[i] -= c * d[k] * sign * r[i];
            }
        }
        for (i, row) in a.iter_mut().enumerate() {
            row[i] += delta;
        }
        Self { a, b }
    }

    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        self.a
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| row.iter().zip(u).map(|(x, y)| x * y).sum::<f64>() - bi)
            .collect()
    }

    /// Conjugate gradient descent from zero, restarted every `n` steps, until
    /// the gradient norm drops below `tol`.
    pub fn minimize(&self, tol: f64) -> Vec<f64> {
        let n = self.b.len();
        let mut u = vec![0.0; n];
        for _ in 0..200 {
            let mut g = self.gradient(&u);
            let mut p: Vec<f64> = g.iter().map(|v| -v).collect();
            for _ in 0..n {
                let gg: f64 = g.iter().map(|v| v * v).sum();
                if gg.sqrt() < tol {
                    return u;
                }
                let ap: Vec<f64> = self
                    .a
                    .iter()
                    .map(|row| row.iter().zip(&p).map(|(x, y)| x * y).sum())
                    .collect();
                let step = gg / p.iter().zip(&ap).map(|(x, y)| x * y).sum::<f64>();
                for i in 0..n {
                    u[i] += step * p[i];
                    g[i] += step * ap[i];
                }
                let beta = g.iter().map(|v| v * v).sum::<f64>() / gg;
                for i in 0..n {
                    p[i] = -g[i] + beta * p[i];
                }
            }
        }
        u
    }
}

pub fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    l2(&d) / l2(b).max(1e-300)
}
