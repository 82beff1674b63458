//! Dense row-major matrices and the symmetric positive-definite solve used by
//! every closed-form hyperplane computation.
//!
//! All reductions run in ascending index order so results are reproducible
//! bit for bit on a given platform.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

/// Ridge multipliers (times `trace(A) / dim`) tried after an unregularized
/// factorization fails.
const RIDGE_LADDER: [f64; 4] = [1e-12, 1e-10, 1e-8, 1e-6];

/// Relative asymmetry accepted by [`spd_solve`] before it refuses the input.
const SYMMETRY_TOL: f64 = 1e-10;

/// Residual bound for a successful [`spd_solve`], relative to `max(1, ‖B‖_F)`.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for DenseMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "DenseMatrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            writeln!(f, "  {:?}", self.row(r))?;
        }
        write!(f, "]")
    }
}

impl DenseMatrix {
    /// Builds a matrix from row-major data, rejecting wrong lengths and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows.checked_mul(cols) != Some(data.len()) {
            return Err(Error::Shape(format!(
                "{rows}x{cols} matrix needs {} values, got {}",
                rows * cols,
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Shape(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (i, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != cols {
                return Err(Error::Shape(format!(
                    "row {i} has {} columns, expected {cols}",
                    r.len()
                )));
            }
            data.extend_from_slice(r);
        }
        Self::new(rows.len(), cols, data)
    }

    /// Column vector.
    pub fn column(values: &[f64]) -> Self {
        Self {
            rows: values.len(),
            cols: 1,
            data: values.to_vec(),
        }
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Self { rows, cols, data }
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    #[inline]
    pub fn row_mut(&mut self, r: usize) -> &mut [f64] {
        &mut self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &[f64]> {
        (0..self.rows).map(move |r| self.row(r))
    }

    pub fn col_vec(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for r in 0..self.rows {
            for c in 0..self.cols {
                t.data[c * self.rows + r] = self.data[r * self.cols + c];
            }
        }
        t
    }

    /// `self · other`.
    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols != other.rows {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// `self · v`.
    pub fn matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.cols {
            return Err(Error::Shape(format!(
                "cannot multiply {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(self.row_iter().map(|r| dot(r, v)).collect())
    }

    /// `selfᵀ · v`.
    pub fn tr_matvec(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.rows {
            return Err(Error::Shape(format!(
                "cannot multiply transpose of {}x{} by vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        let mut out = vec![0.0; self.cols];
        for (r, &s) in self.row_iter().zip(v) {
            for (o, &a) in out.iter_mut().zip(r) {
                *o += a * s;
            }
        }
        Ok(out)
    }

    /// `self + δI`.
    pub fn add_scaled_identity(&self, delta: f64) -> Result<DenseMatrix> {
        if self.rows != self.cols {
            return Err(Error::Shape(format!(
                "identity shift needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        let mut out = self.clone();
        for i in 0..self.rows {
            out[(i, i)] += delta;
        }
        Ok(out)
    }

    /// Copy of the given rows, in the given order.
    pub fn select_rows(&self, idx: &[usize]) -> DenseMatrix {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        DenseMatrix {
            rows: idx.len(),
            cols: self.cols,
            data,
        }
    }

    /// `[self | 1]`: appends a column of ones.
    pub fn augment_ones(&self) -> DenseMatrix {
        let cols = self.cols + 1;
        let mut data = Vec::with_capacity(self.rows * cols);
        for r in self.row_iter() {
            data.extend_from_slice(r);
            data.push(1.0);
        }
        DenseMatrix {
            rows: self.rows,
            cols,
            data,
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest `|a_ij − a_ji|` relative to the largest `|a_ij|`.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in 0..i {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst / scale
    }

    /// Replaces each off-diagonal pair by its mean.
    pub fn symmetrize(&mut self) {
        for i in 0..self.rows {
            for j in 0..i {
                let m = 0.5 * (self[(i, j)] + self[(j, i)]);
                self[(i, j)] = m;
                self[(j, i)] = m;
            }
        }
    }

    fn sub(&self, other: &DenseMatrix) -> DenseMatrix {
        DenseMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Index<(usize, usize)> for DenseMatrix {
    type Output = f64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &f64 {
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for DenseMatrix {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut f64 {
        &mut self.data[r * self.cols + c]
    }
}

/// `[r₀·v, r₁·v, r₂·v, r₃·v]`, each with the same lane layout as [`dot`].
#[inline]
fn dot4(r: [&[f64]; 4], v: &[f64]) -> [f64; 4] {
    let mut acc = [[0.0f64; 4]; 4];
    let (vc, vt) = v.as_chunks::<4>();
    let body = vc.len();
    let [c0, c1, c2, c3] = r.map(|x| &x[..v.len()].as_chunks::<4>().0[..body]);
    for k in 0..body {
        let vk = vc[k];
        let (a0, a1, a2, a3) = (c0[k], c1[k], c2[k], c3[k]);
        for t in 0..4 {
            acc[0][t] += a0[t] * vk[t];
            acc[1][t] += a1[t] * vk[t];
            acc[2][t] += a2[t] * vk[t];
            acc[3][t] += a3[t] * vk[t];
        }
    }
    let mut out = [0.0; 4];
    for (q, o) in out.iter_mut().enumerate() {
        let a = &acc[q];
        let mut tail = 0.0;
        for (x, y) in r[q][body * 4..v.len()].iter().zip(vt) {
            tail += x * y;
        }
        *o = (a[0] + a[1]) + (a[2] + a[3]) + tail;
    }
    out
}

/// Four interleaved partial sums, combined in a fixed order. The result
/// depends only on the inputs, never on scheduling.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len().min(b.len());
    let (a, b) = (&a[..n], &b[..n]);
    let mut acc = [0.0f64; 4];
    let ca = a.chunks_exact(4);
    let cb = b.chunks_exact(4);
    let (ra, rb) = (ca.remainder(), cb.remainder());
    for (x, y) in ca.zip(cb) {
        for k in 0..4 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = 0.0;
    for (x, y) in ra.iter().zip(rb) {
        tail += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// `Aᵀ·A`. Only the lower triangle is accumulated; the upper triangle is a
/// mirror copy, so the result is exactly symmetric.
pub fn gram(a: &DenseMatrix) -> DenseMatrix {
    let n = a.cols;
    let mut g = DenseMatrix::zeros(n, n);
    for r in a.row_iter() {
        for i in 0..n {
            let ri = r[i];
            if ri == 0.0 {
                continue;
            }
            let g_row = &mut g.data[i * n..i * n + i + 1];
            for (o, &rj) in g_row.iter_mut().zip(&r[..=i]) {
                *o += ri * rj;
            }
        }
    }
    for i in 0..n {
        for j in 0..i {
            g.data[j * n + i] = g.data[i * n + j];
        }
    }
    g
}

/// `A·Aᵀ`, exactly symmetric.
pub fn outer_gram(a: &DenseMatrix) -> DenseMatrix {
    let m = a.rows;
    let mut g = DenseMatrix::zeros(m, m);
    for i in 0..m {
        for j in 0..=i {
            let v = dot(a.row(i), a.row(j));
            g.data[i * m + j] = v;
            g.data[j * m + i] = v;
        }
    }
    g
}

/// Diagnostics of one [`spd_solve`] call.
#[derive(Debug, Clone, Copy, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpdSolveReport {
    /// Ridge `r` actually added to the diagonal; 0 when the first
    /// factorization succeeded.
    pub ridge_added: f64,
    /// `‖(A + rI)·X − B‖_F` of the returned solution.
    pub residual_norm: f64,
    pub factorization_attempts: usize,
}

/// Lower Cholesky factor, row-major. `None` if a pivot is not positive.
fn cholesky(a: &DenseMatrix, ridge: f64) -> Option<DenseMatrix> {
    let n = a.rows;
    let mut l = DenseMatrix::zeros(n, n);
    // column by column: L_ij = (A_ij − Σ_{k<j} L_ik·L_jk) / L_jj, four rows
    // at a time so each load of row j feeds four products
    for j in 0..n {
        let (head, tail) = l.data.split_at_mut((j + 1) * n);
        let lj = &head[j * n..j * n + j];
        let d = a.data[j * n + j] + ridge - dot(lj, lj);
        if !(d > 0.0) || !d.is_finite() {
            return None;
        }
        let djj = d.sqrt();
        head[j * n + j] = djj;
        let lj = &head[j * n..j * n + j];
        let mut rows = tail.chunks_exact_mut(n);
        let mut i = j + 1;
        while let (Some(r0), Some(r1), Some(r2), Some(r3)) = (rows.next(), rows.next(), rows.next(), rows.next()) {
            let [s0, s1, s2, s3] = dot4([&r0[..j], &r1[..j], &r2[..j], &r3[..j]], lj);
            r0[j] = (a.data[i * n + j] - s0) / djj;
            r1[j] = (a.data[(i + 1) * n + j] - s1) / djj;
            r2[j] = (a.data[(i + 2) * n + j] - s2) / djj;
            r3[j] = (a.data[(i + 3) * n + j] - s3) / djj;
            i += 4;
        }
        for r in tail.chunks_exact_mut(n).skip(i - j - 1) {
            r[j] = (a.data[i * n + j] - dot(&r[..j], lj)) / djj;
            i += 1;
        }
    }
    Some(l)
}

/// Solves `L·Lᵀ·X = B` in place on a row-major copy of `B`.
fn cholesky_solve(l: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let n = l.rows;
    let k = b.cols;
    let mut x = b.clone();
    if k == 1 {
        let y = &mut x.data;
        for i in 0..n {
            let row = &l.data[i * n..i * n + i];
            y[i] = (y[i] - dot(row, &y[..i])) / l.data[i * n + i];
        }
        for i in (0..n).rev() {
            let xi = y[i] / l.data[i * n + i];
            y[i] = xi;
            for (yp, &lip) in y[..i].iter_mut().zip(&l.data[i * n..i * n + i]) {
                *yp -= lip * xi;
            }
        }
        return x;
    }
    // forward: L·Y = B, row operations keep the inner loop contiguous
    for i in 0..n {
        for p in 0..i {
            let lip = l.data[i * n + p];
            if lip == 0.0 {
                continue;
            }
            let (done, rest) = x.data.split_at_mut(i * k);
            let src = &done[p * k..(p + 1) * k];
            for (xi, &yp) in rest[..k].iter_mut().zip(src) {
                *xi -= lip * yp;
            }
        }
        let d = l.data[i * n + i];
        for v in &mut x.data[i * k..(i + 1) * k] {
            *v /= d;
        }
    }
    // backward: Lᵀ·X = Y
    for i in (0..n).rev() {
        for p in i + 1..n {
            let lpi = l.data[p * n + i];
            if lpi == 0.0 {
                continue;
            }
            let (head, tail) = x.data.split_at_mut(p * k);
            let src = &tail[..k];
            for (xi, &xp) in head[i * k..(i + 1) * k].iter_mut().zip(src) {
                *xi -= lpi * xp;
            }
        }
        let d = l.data[i * n + i];
        for v in &mut x.data[i * k..(i + 1) * k] {
            *v /= d;
        }
    }
    x
}

fn shifted_residual(a: &DenseMatrix, ridge: f64, x: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
    let mut ax = if x.cols == 1 {
        DenseMatrix::column(&a.matvec(&x.data).expect("conformable by construction"))
    } else {
        a.matmul(x).expect("conformable by construction")
    };
    if ridge != 0.0 {
        for (o, v) in ax.data.iter_mut().zip(&x.data) {
            // rows of X line up with rows of A; add r·X
            *o += ridge * v;
        }
    }
    ax.sub(b)
}

/// Solves `(A + rI)·X = B` for symmetric positive (semi)definite `A`.
///
/// `r` starts at 0 and escalates through `{1e-12, 1e-10, 1e-8, 1e-6}·trace(A)/dim`
/// whenever the factorization breaks down or the refined residual exceeds
/// `1e-8·max(1, ‖B‖_F)`. The ridge actually used is always reported.
pub fn spd_solve(a: &DenseMatrix, b: &DenseMatrix) -> Result<(DenseMatrix, SpdSolveReport)> {
    if a.rows != a.cols {
        return Err(Error::Shape(format!(
            "spd_solve needs a square matrix, got {}x{}",
            a.rows, a.cols
        )));
    }
    if b.rows != a.rows {
        return Err(Error::Shape(format!(
            "right-hand side has {} rows, system has {}",
            b.rows, a.rows
        )));
    }
    let asym = a.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::Shape(format!(
            "matrix is not symmetric (relative asymmetry {asym:e})"
        )));
    }
    let mut a = a.clone();
    if asym > 0.0 {
        a.symmetrize();
    }

    let n = a.rows;
    let tol = RESIDUAL_TOL * b.frobenius_norm().max(1.0);
    let scale = if n > 0 { a.trace() / n as f64 } else { 0.0 };
    let scale = if scale > 0.0 && scale.is_finite() { scale } else { 1.0 };

    let mut report = SpdSolveReport {
        ridge_added: 0.0,
        residual_norm: f64::INFINITY,
        factorization_attempts: 0,
    };
    let ridges = std::iter::once(0.0).chain(RIDGE_LADDER.iter().map(|m| m * scale));
    for ridge in ridges {
        report.factorization_attempts += 1;
        report.ridge_added = ridge;
        let Some(l) = cholesky(&a, ridge) else {
            continue;
        };
        let mut x = cholesky_solve(&l, b);
        let mut resid = shifted_residual(&a, ridge, &x, b);
        let mut rnorm = resid.frobenius_norm();
        if rnorm > tol && rnorm.is_finite() {
            // one step of iterative refinement
            let dx = cholesky_solve(&l, &resid);
            for (xi, d) in x.data.iter_mut().zip(&dx.data) {
                *xi -= d;
            }
            resid = shifted_residual(&a, ridge, &x, b);
            rnorm = resid.frobenius_norm();
        }
        report.residual_norm = rnorm;
        if rnorm <= tol && x.data.iter().all(|v| v.is_finite()) {
            return Ok((x, report));
        }
    }
    Err(Error::Singular(report))
}

/// [`spd_solve`] for a single right-hand-side vector.
pub fn spd_solve_vec(a: &DenseMatrix, b: &[f64]) -> Result<(Vec<f64>, SpdSolveReport)> {
    let (x, report) = spd_solve(a, &DenseMatrix::column(b))?;
    Ok((x.into_vec(), report))
}
