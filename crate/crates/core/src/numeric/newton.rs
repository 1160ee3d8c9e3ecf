//! Damped Gauss–Newton iteration for complex systems.

use nalgebra::DVector;
use num_complex::Complex64 as C;
use serde::Serialize;

use super::jacobian::{jacobian_fd, JacobianMethod, DEFAULT_FD_STEP};
use super::linalg::lstsq;
use crate::error::{Error, Result};

/// Options for [`newton_solve`].
#[derive(Debug, Clone, Copy)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub fd_step: f64,
    pub method: JacobianMethod,
    /// Jacobians whose condition number exceeds this are reported as singular.
    pub max_condition: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions {
            tol: 1e-10,
            max_iter: 50,
            fd_step: DEFAULT_FD_STEP,
            method: JacobianMethod::RealPairs,
            max_condition: 1e12,
        }
    }
}

/// Converged solution and iteration history.
#[derive(Debug, Clone, Serialize)]
pub struct NewtonReport {
    #[serde(skip)]
    pub x: Vec<C>,
    pub iterations: usize,
    pub residual: f64,
    pub method: JacobianMethod,
    pub history: Vec<f64>,
}

fn inf_norm(r: &[C]) -> f64 {
    r.iter().map(|z| z.re.abs().max(z.im.abs())).fold(0.0, f64::max)
}

/// Solves `residual(x) = 0` from `x0`; the residual may have more components than unknowns.
pub fn newton_solve<F>(mut residual: F, x0: &[C], opts: &NewtonOptions) -> Result<NewtonReport>
where
    F: FnMut(&[C]) -> Vec<C>,
{
    let mut x = x0.to_vec();
    let mut r = residual(&x);
    let mut norm = inf_norm(&r);
    if !norm.is_finite() {
        return Err(Error::NonFiniteSample { at: 0.0 });
    }
    let mut history = vec![norm];
    for it in 0..opts.max_iter {
        if norm <= opts.tol {
            return Ok(NewtonReport { x, iterations: it, residual: norm, method: opts.method, history });
        }
        if x.is_empty() {
            return Err(Error::NoConvergence { iterations: it, residual: norm });
        }
        let jac = jacobian_fd(&mut residual, &x, opts.fd_step, opts.method)?;
        let a = jac.real_matrix();
        let b = DVector::from_iterator(2 * r.len(), r.iter().flat_map(|z| [-z.re, -z.im]));
        let dx = lstsq(&a, &b, opts.max_condition)?;
        let step: Vec<C> = (0..x.len()).map(|j| C::new(dx[2 * j], dx[2 * j + 1])).collect();
        let mut lambda = 1.0;
        loop {
            let trial: Vec<C> = x.iter().zip(&step).map(|(a, d)| a + d * lambda).collect();
            let rt = residual(&trial);
            let nt = inf_norm(&rt);
            if nt.is_finite() && (nt < norm || lambda < 1e-3) {
                x = trial;
                r = rt;
                norm = nt;
                break;
            }
            lambda *= 0.5;
        }
        history.push(norm);
    }
    if norm <= opts.tol {
        return Ok(NewtonReport { x, iterations: opts.max_iter, residual: norm, method: opts.method, history });
    }
    Err(Error::NoConvergence { iterations: opts.max_iter, residual: norm })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn affine_in_one_step() {
        let rep = newton_solve(|x| vec![x[0] - 1.0], &[C::new(0.0, 0.0)], &NewtonOptions::default()).unwrap();
        assert!((rep.x[0] - 1.0).norm() < 1e-10);
        assert!(rep.iterations <= 2);
    }

    #[test]
    fn square_root_of_minus_one() {
        let rep = newton_solve(|x| vec![x[0] * x[0] + 1.0], &[C::new(0.0, 0.5)], &NewtonOptions::default()).unwrap();
        assert!((rep.x[0] - C::i()).norm() < 1e-10);
    }

    #[test]
    fn singular_jacobian_detected() {
        let err = newton_solve(|x| vec![x[0] + x[1] - 1.0, x[0] + x[1] - 1.0], &[C::new(0.0, 0.0); 2], &NewtonOptions::default())
            .unwrap_err();
        assert!(matches!(err, Error::SingularJacobian { .. }));
    }

    #[test]
    fn gives_up_after_max_iter() {
        let opts = NewtonOptions { max_iter: 2, ..Default::default() };
        let err = newton_solve(|x| vec![x[0].exp() - 1e6], &[C::new(0.0, 0.0)], &opts).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { .. }));
    }
}
