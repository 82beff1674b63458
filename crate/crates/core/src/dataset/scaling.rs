use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Per-attribute min-max scaling observed on training rows.
///
/// A constant attribute stores range `1` and is flagged constant; it scales
/// to `0` everywhere, so fuzzy similarity on it is identically `1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalingParams {
    pub min: Vec<f64>,
    pub range: Vec<f64>,
    pub constant: Vec<bool>,
}

impl ScalingParams {
    pub fn n_attributes(&self) -> usize {
        self.min.len()
    }

    /// Scales one row in place, clamping into `[0, 1]`.
    pub fn apply_row(&self, row: &mut [f64]) -> Result<()> {
        if row.len() != self.min.len() {
            return Err(Error::Shape(format!(
                "row has {} attributes, scaling was fit on {}",
                row.len(),
                self.min.len()
            )));
        }
        for (j, v) in row.iter_mut().enumerate() {
            *v = if self.constant[j] {
                0.0
            } else {
                ((*v - self.min[j]) / self.range[j]).clamp(0.0, 1.0)
            };
        }
        Ok(())
    }
}

pub fn minmax_fit(x: &DenseMatrix) -> ScalingParams {
    let n = x.cols();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for row in x.row_iter() {
        for (j, &v) in row.iter().enumerate() {
            lo[j] = lo[j].min(v);
            hi[j] = hi[j].max(v);
        }
    }
    let mut params = ScalingParams {
        min: Vec::with_capacity(n),
        range: Vec::with_capacity(n),
        constant: Vec::with_capacity(n),
    };
    for j in 0..n {
        if x.rows() == 0 {
            params.min.push(0.0);
            params.range.push(1.0);
            params.constant.push(true);
            continue;
        }
        let range = hi[j] - lo[j];
        params.min.push(lo[j]);
        if range > 0.0 {
            params.range.push(range);
            params.constant.push(false);
        } else {
            params.range.push(1.0);
            params.constant.push(true);
        }
    }
    params
}

pub fn minmax_apply(params: &ScalingParams, x: &DenseMatrix) -> Result<DenseMatrix> {
    if x.cols() != params.n_attributes() {
        return Err(Error::Shape(format!(
            "matrix has {} columns, scaling was fit on {}",
            x.cols(),
            params.n_attributes()
        )));
    }
    let mut out = x.clone();
    for r in 0..out.rows() {
        params.apply_row(out.row_mut(r))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn col(values: &[f64]) -> DenseMatrix {
        DenseMatrix::column(values)
    }

    #[test]
    fn fit_simple_column() {
        let p = minmax_fit(&col(&[2.0, 4.0, 6.0]));
        assert_eq!(p.min, vec![2.0]);
        assert_eq!(p.range, vec![4.0]);
    }

    #[test]
    fn constant_column_gets_sentinel() {
        let p = minmax_fit(&col(&[5.0, 5.0, 5.0]));
        assert_eq!(p.min, vec![5.0]);
        assert_eq!(p.range, vec![1.0]);
        assert_eq!(p.constant, vec![true]);
        let scaled = minmax_apply(&p, &col(&[5.0, 5.0, 7.0])).unwrap();
        assert_eq!(scaled.as_slice(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn two_columns() {
        let x = DenseMatrix::from_rows(&[[0.0, 10.0], [1.0, 30.0]]).unwrap();
        let p = minmax_fit(&x);
        assert_eq!(p.min, vec![0.0, 10.0]);
        assert_eq!(p.range, vec![1.0, 20.0]);
    }

    #[test]
    fn apply_and_clamp() {
        let p = minmax_fit(&col(&[2.0, 6.0]));
        let scaled = minmax_apply(&p, &col(&[4.0, 9.0, -3.0])).unwrap();
        assert_eq!(scaled.as_slice(), &[0.5, 1.0, 0.0]);
    }

    #[test]
    fn column_mismatch_is_error() {
        let p = minmax_fit(&col(&[2.0, 6.0]));
        let x = DenseMatrix::zeros(1, 2);
        assert!(minmax_apply(&p, &x).is_err());
    }

    proptest! {
        #[test]
        fn fit_then_apply_spans_unit_interval(
            rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 2..30)
        ) {
            let x = DenseMatrix::from_rows(&rows).unwrap();
            let p = minmax_fit(&x);
            let s = minmax_apply(&p, &x).unwrap();
            for j in 0..3 {
                let c = s.col_vec(j);
                let lo = c.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = c.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                prop_assert!(c.iter().all(|v| (0.0..=1.0).contains(v)));
                if p.constant[j] {
                    prop_assert_eq!(hi, 0.0);
                } else {
                    prop_assert_eq!(lo, 0.0);
                    prop_assert_eq!(hi, 1.0);
                }
            }
        }
    }
}
