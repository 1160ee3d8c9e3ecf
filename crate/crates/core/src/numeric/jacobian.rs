//! Central-difference Jacobians of complex maps.

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use serde::Serialize;

use super::linalg::ComplexMatrix;
use crate::error::{Error, Result};

/// Default relative finite-difference step.
pub const DEFAULT_FD_STEP: f64 = 1e-6;

/// How derivatives were taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum JacobianMethod {
    /// One complex central difference per unknown; valid for holomorphic maps only.
    Holomorphic,
    /// Real and imaginary parts perturbed separately (Wirtinger derivatives).
    RealPairs,
}

/// Finite-difference Jacobian with the method that produced it.
#[derive(Debug, Clone)]
pub struct JacobianReport {
    pub method: JacobianMethod,
    /// `∂F/∂z`.
    pub dz: ComplexMatrix,
    /// `∂F/∂z̄`; zero for the holomorphic method.
    pub dzbar: ComplexMatrix,
}

impl JacobianReport {
    /// The real `2m × 2n` Jacobian acting on `(Re x, Im x)` stacked per unknown.
    pub fn real_matrix(&self) -> DMatrix<f64> {
        let (m, n) = (self.dz.rows(), self.dz.cols());
        let mut r = DMatrix::zeros(2 * m, 2 * n);
        for i in 0..m {
            for j in 0..n {
                let a = self.dz.get(i, j);
                let b = self.dzbar.get(i, j);
                // dF = a dz + b dz̄ with dz = dx + i dy.
                let fx = a + b;
                let fy = C::i() * (a - b);
                r[(2 * i, 2 * j)] = fx.re;
                r[(2 * i + 1, 2 * j)] = fx.im;
                r[(2 * i, 2 * j + 1)] = fy.re;
                r[(2 * i + 1, 2 * j + 1)] = fy.im;
            }
        }
        r
    }
}

fn checked(v: Vec<C>, at: f64) -> Result<Vec<C>> {
    if v.iter().all(|z| z.is_finite()) {
        Ok(v)
    } else {
        Err(Error::NonFiniteSample { at })
    }
}

/// Central-difference Jacobian of `map` at `x`; the step for unknown `j` is `step * max(1, |x_j|)`.
pub fn jacobian_fd<F>(mut map: F, x: &[C], step: f64, method: JacobianMethod) -> Result<JacobianReport>
where
    F: FnMut(&[C]) -> Vec<C>,
{
    if !(step > 0.0) {
        return Err(Error::InvalidInput(format!("finite-difference step must be positive, got {step}")));
    }
    let n = x.len();
    let f0 = checked(map(x), 0.0)?;
    let m = f0.len();
    let mut dz = ComplexMatrix::zeros(m, n);
    let mut dzbar = ComplexMatrix::zeros(m, n);
    let mut xp = x.to_vec();
    for j in 0..n {
        let h = step * x[j].norm().max(1.0);
        let mut diff = |dir: C| -> Result<Vec<C>> {
            xp[j] = x[j] + dir * h;
            let fp = checked(map(&xp), h)?;
            xp[j] = x[j] - dir * h;
            let fm = checked(map(&xp), h)?;
            xp[j] = x[j];
            Ok(fp.iter().zip(&fm).map(|(a, b)| (a - b) / (2.0 * h)).collect())
        };
        let fx = diff(C::new(1.0, 0.0))?;
        match method {
            JacobianMethod::Holomorphic => {
                for i in 0..m {
                    dz.set(i, j, fx[i]);
                }
            }
            JacobianMethod::RealPairs => {
                let fy = diff(C::i())?;
                for i in 0..m {
                    dz.set(i, j, 0.5 * (fx[i] - C::i() * fy[i]));
                    dzbar.set(i, j, 0.5 * (fx[i] + C::i() * fy[i]));
                }
            }
        }
    }
    Ok(JacobianReport { method, dz, dzbar })
}
