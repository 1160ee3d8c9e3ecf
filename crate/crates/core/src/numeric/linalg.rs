//! Dense complex matrices, SVD rank and least-squares solves (backed by nalgebra).

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C;

use crate::error::{Error, Result};

/// Row-major complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    inner: DMatrix<C>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        ComplexMatrix { inner: DMatrix::zeros(rows, cols) }
    }

    pub fn identity(n: usize) -> Self {
        ComplexMatrix { inner: DMatrix::identity(n, n) }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C) -> Self {
        ComplexMatrix { inner: DMatrix::from_fn(rows, cols, f) }
    }

    /// Builds a matrix from row-major entries; the entry count must equal `rows * cols`.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[C]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::InvalidInput(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        Ok(ComplexMatrix { inner: DMatrix::from_row_slice(rows, cols, entries) })
    }

    pub fn rows(&self) -> usize {
        self.inner.nrows()
    }

    pub fn cols(&self) -> usize {
        self.inner.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> C {
        self.inner[(i, j)]
    }

    pub fn set(&mut self, i: usize, j: usize, v: C) {
        self.inner[(i, j)] = v;
    }

    pub fn adjoint(&self) -> Self {
        ComplexMatrix { inner: self.inner.adjoint() }
    }

    pub fn as_nalgebra(&self) -> &DMatrix<C> {
        &self.inner
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.inner.iter().zip(other.inner.iter()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }

    /// Singular values in decreasing order.
    pub fn singular_values(&self) -> Result<Vec<f64>> {
        if self.inner.iter().any(|z| !z.is_finite()) {
            return Err(Error::NonFiniteSample { at: f64::NAN });
        }
        if self.inner.is_empty() {
            return Ok(Vec::new());
        }
        let mut s: Vec<f64> = self.inner.clone().singular_values().iter().copied().collect();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        Ok(s)
    }

    /// Extracts a column subset.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        ComplexMatrix::from_fn(self.rows(), cols.len(), |i, j| self.inner[(i, cols[j])])
    }
}

/// Number of singular values above `tol` times the largest one.
pub fn complex_rank(m: &ComplexMatrix, tol: f64) -> Result<usize> {
    if !(tol > 0.0) {
        return Err(Error::InvalidInput(format!("rank tolerance must be positive, got {tol}")));
    }
    let s = m.singular_values()?;
    let smax = s.first().copied().unwrap_or(0.0);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&v| v > tol * smax).count())
}

/// Minimum-norm least-squares solution of `a x = b` through the SVD.
///
/// Fails with `SingularJacobian` when the ratio of extreme singular values exceeds `max_condition`.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>, max_condition: f64) -> Result<DVector<f64>> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !(cond <= max_condition) {
        return Err(Error::SingularJacobian { condition: cond });
    }
    svd.solve(b, 0.0).map_err(|_| Error::SingularJacobian { condition: cond })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranks_of_trivial_matrices() {
        assert_eq!(complex_rank(&ComplexMatrix::zeros(3, 3), 1e-8).unwrap(), 0);
        assert_eq!(complex_rank(&ComplexMatrix::identity(3), 1e-8).unwrap(), 3);
    }

    #[test]
    fn rank_of_outer_product() {
        let u = [C::new(1.0, 2.0), C::new(-0.5, 0.1), C::new(3.0, 0.0)];
        let v = [C::new(0.0, 1.0), C::new(2.0, -1.0)];
        let m = ComplexMatrix::from_fn(3, 2, |i, j| u[i] * v[j]);
        assert_eq!(complex_rank(&m, 1e-8).unwrap(), 1);
        assert_eq!(complex_rank(&m.adjoint(), 1e-8).unwrap(), 1);
    }

    #[test]
    fn entry_count_checked() {
        assert!(ComplexMatrix::from_row_slice(2, 2, &[C::new(1.0, 0.0); 3]).is_err());
    }

    #[test]
    fn lstsq_flags_singular_systems() {
        let a = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let b = DVector::from_vec(vec![1.0, 1.0]);
        assert!(matches!(lstsq(&a, &b, 1e12), Err(Error::SingularJacobian { .. })));
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 4.0]);
        let x = lstsq(&a, &b, 1e12).unwrap();
        assert!((x[0] - 0.5).abs() < 1e-15 && (x[1] - 0.25).abs() < 1e-15);
    }
}
