//! Leading-order vortex domains `Ω_t` built from a balanced periodic configuration.
//!
//! With `f(z) = c0 + Σ a_i z/(z − p_i)`, `g_t = −i/(t f)` and the form `t ω0 = t f dz/z`, the domain is the
//! image of `{|t f| < 1}` under `φ_t = i log z`, the stream function is `u_t = Re ∫ t ω0` and the velocity at
//! `φ_t(z)` is `t·conj(f(z))`.

mod build;
mod surface;
mod trace;

pub use build::{build_domain, closure_defect, prop_ab_check, BuildSettings, BuiltDomain, ClosureDefect, PropAbReport};
pub use surface::BuilderSurface;
pub use trace::{t_max, trace_boundary, BoundaryTrace, DEFAULT_TRACE_SAMPLES};

use std::f64::consts::PI;

use num_complex::Complex64 as C;

use crate::configurations::{Case, PeriodicConfiguration};
use crate::error::{Error, Result};
use crate::numeric::{integrate_contour, ContourPath, QuadratureSettings};

/// Configuration, parameter `t` and coefficients `a_i` of `f`.
#[derive(Debug, Clone, PartialEq)]
pub struct BuilderInput {
    config: PeriodicConfiguration,
    t: f64,
    a: Vec<C>,
}

impl BuilderInput {
    /// Uses `a_i = c_i` when `a` is `None`.
    pub fn new(config: PeriodicConfiguration, t: f64, a: Option<Vec<C>>) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::ParameterOutOfRange(format!("t must be positive, got {t}")));
        }
        let a = a.unwrap_or_else(|| config.weights().iter().map(|&c| C::new(c, 0.0)).collect());
        if a.len() != config.len() {
            return Err(Error::InvalidInput(format!("{} coefficients for {} points", a.len(), config.len())));
        }
        let sum: C = a.iter().sum();
        let target = match config.case() {
            Case::A => C::new(0.0, 0.0),
            Case::B => -2.0 * config.c0(),
        };
        let scale = 1.0f64.max(a.iter().map(|x| x.norm()).sum());
        if (sum - target).norm() > 1e-12 * scale {
            return Err(Error::ParameterOutOfRange(format!("coefficients sum to {sum}, expected {target}")));
        }
        Ok(BuilderInput { config, t, a })
    }

    pub fn config(&self) -> &PeriodicConfiguration {
        &self.config
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn a(&self) -> &[C] {
        &self.a
    }

    pub fn with_t(&self, t: f64) -> Result<Self> {
        BuilderInput::new(self.config.clone(), t, Some(self.a.clone()))
    }

    /// `f(z)` without pole checks.
    pub(crate) fn f_raw(&self, z: C) -> C {
        self.config.c0() + self.a.iter().zip(self.config.points()).map(|(a, p)| a * z / (z - p)).sum::<C>()
    }

    /// `f'(z)`.
    pub(crate) fn f_prime(&self, z: C) -> C {
        self.a.iter().zip(self.config.points()).map(|(a, p)| -a * p / ((z - p) * (z - p))).sum()
    }

    /// Gauss map `g_t = −i/(t f)`.
    pub fn gauss(&self, z: C) -> C {
        -C::i() / (self.t * self.f_raw(z))
    }

    /// Velocity `t·conj(f(z))` at the image point `φ_t(z)`.
    pub fn velocity(&self, z: C) -> C {
        self.t * self.f_raw(z).conj()
    }
}

fn near(z: C, p: C) -> bool {
    (z - p).norm() <= 1e-14 * (1.0 + p.norm())
}

/// `f(z) = c0 + Σ a_i z/(z − p_i)`.
pub fn f_eval(input: &BuilderInput, z: C) -> Result<C> {
    if let Some(p) = input.config.points().iter().find(|p| near(z, **p)) {
        return Err(Error::PoleEvaluation { re: p.re, im: p.im });
    }
    Ok(input.f_raw(z))
}

/// Coefficient of `ω0 = c0 dz/z + Σ c_i dz/(z − p_i)`.
pub fn omega0_eval(config: &PeriodicConfiguration, z: C) -> Result<C> {
    if near(z, C::new(0.0, 0.0)) {
        return Err(Error::PoleEvaluation { re: z.re, im: z.im });
    }
    if let Some(p) = config.points().iter().find(|p| near(z, **p)) {
        return Err(Error::PoleEvaluation { re: p.re, im: p.im });
    }
    Ok(config.c0() / z + config.weights().iter().zip(config.points()).map(|(c, p)| *c / (z - p)).sum::<C>())
}

fn contour_quadrature() -> QuadratureSettings {
    QuadratureSettings { abs_tol: 1e-13, rel_tol: 1e-13, max_depth: 40 }
}

/// `ω0/dz` without pole checks.
fn omega0_raw(config: &PeriodicConfiguration, z: C) -> C {
    config.c0() / z + config.weights().iter().zip(config.points()).map(|(c, p)| *c / (z - p)).sum::<C>()
}

/// `(Res_0, Res_∞)` of `g_t ω0`, by contour integration on circles about 0 and ∞.
pub fn residues_g_omega(input: &BuilderInput) -> Result<(C, C)> {
    let moduli: Vec<f64> = input.config.points().iter().map(|p| p.norm()).collect();
    let small = 0.5 * moduli.iter().copied().fold(f64::INFINITY, f64::min);
    let large = 2.0 * moduli.iter().copied().fold(0.0, f64::max);
    let q = contour_quadrature();
    let integrand = |z: C| input.gauss(z) * omega0_raw(&input.config, z);
    let at_zero = integrate_contour(integrand, &ContourPath::circle(C::new(0.0, 0.0), small, true)?, &q)?;
    let at_inf = integrate_contour(integrand, &ContourPath::circle(C::new(0.0, 0.0), large, false)?, &q)?;
    let two_pi_i = C::new(0.0, 2.0 * PI);
    Ok((at_zero / two_pi_i, at_inf / two_pi_i))
}

/// `∮ f ω0` on a small counterclockwise circle about `p_i`; equals `2πi F_i`.
pub fn period_integral(input: &BuilderInput, i: usize) -> Result<C> {
    let pts = input.config.points();
    let p = *pts.get(i).ok_or_else(|| Error::InvalidInput(format!("no point {i}")))?;
    let others = pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| (q - p).norm());
    let rho = 0.5 * others.fold(p.norm(), f64::min);
    let path = ContourPath::circle(p, rho, true)?;
    integrate_contour(|z| input.f_raw(z) * omega0_raw(&input.config, z), &path, &contour_quadrature())
}

/// `φ_t(z) = i log z0 − ∫ g_t t ω0` along the polyline `path` starting at `z0 = path[0]`.
pub fn phi_along(input: &BuilderInput, path: &[C]) -> Result<C> {
    let z0 = *path.first().ok_or_else(|| Error::InvalidInput("empty path".into()))?;
    if path.len() == 1 {
        return Ok(C::i() * z0.ln());
    }
    let t = input.t;
    let integral = integrate_contour(
        |z| input.gauss(z) * t * omega0_raw(&input.config, z),
        &ContourPath::polyline(path.to_vec(), false)?,
        &contour_quadrature(),
    )?;
    Ok(C::i() * z0.ln() - integral)
}
