//! Numerical primitives: contour quadrature, finite-difference Jacobians, Newton iteration and SVD rank.

pub mod jacobian;
pub mod linalg;
pub mod newton;
pub mod poly;
pub mod quadrature;

pub use jacobian::{jacobian_fd, JacobianMethod, JacobianReport, DEFAULT_FD_STEP};
pub use linalg::{complex_rank, lstsq, ComplexMatrix};
pub use newton::{newton_solve, NewtonOptions, NewtonReport};
pub use poly::Polynomial;
pub use quadrature::{
    integrate_breaks, integrate_contour, integrate_interval, try_integrate_contour, ContourPath, PathKind, QuadValue,
    QuadratureSettings,
};

use num_complex::Complex64 as C;

/// Default relative rank tolerance.
pub const RANK_TOL: f64 = 1e-8;

/// Complex number from a `[re, im]` pair.
pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}
