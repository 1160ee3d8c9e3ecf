//! Boundary components `{|t f| = 1}` around each `p_i`, traced radially.

use std::f64::consts::PI;

use num_complex::Complex64 as C;

use super::BuilderInput;
use crate::error::{Error, Result};
use crate::numeric::ContourPath;

/// Default number of angles per boundary component.
pub const DEFAULT_TRACE_SAMPLES: usize = 1024;

const SCAN_SAMPLES: usize = 96;

/// A boundary component `γ_i` sampled at equally spaced angles about `p_i`, clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryTrace {
    pub index: usize,
    pub center: C,
    /// Angles `θ_k`, decreasing by `2π/N`.
    pub theta: Vec<f64>,
    pub radius: Vec<f64>,
    /// `dr/dθ` at each sample.
    pub radius_derivative: Vec<f64>,
}

impl BoundaryTrace {
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    pub fn points(&self) -> Vec<C> {
        self.theta.iter().zip(&self.radius).map(|(th, r)| self.center + C::from_polar(*r, *th)).collect()
    }

    /// `dz` weights of the periodic trapezoid rule along the clockwise curve.
    pub fn dz(&self) -> Vec<C> {
        let h = 2.0 * PI / self.len() as f64;
        self.theta
            .iter()
            .zip(self.radius.iter().zip(&self.radius_derivative))
            .map(|(th, (r, dr))| -h * C::new(*dr, *r) * C::from_polar(1.0, *th))
            .collect()
    }

    /// Trapezoid approximation of `∮_γ h(z) dz`, spectrally accurate for analytic `h`.
    pub fn integrate(&self, mut h: impl FnMut(C) -> C) -> C {
        self.points().into_iter().zip(self.dz()).map(|(z, dz)| h(z) * dz).sum()
    }

    /// Closed polyline (first point repeated at the end).
    pub fn to_path(&self) -> Result<ContourPath> {
        let mut v = self.points();
        v.push(v[0]);
        ContourPath::polyline(v, true)
    }

    /// Largest and smallest radius.
    pub fn radius_range(&self) -> (f64, f64) {
        let max = self.radius.iter().copied().fold(0.0, f64::max);
        let min = self.radius.iter().copied().fold(f64::INFINITY, f64::min);
        (min, max)
    }
}

fn level(input: &BuilderInput, z: C) -> f64 {
    (input.t() * input.f_raw(z)).norm_sqr() - 1.0
}

/// Largest radius searched around `p_i`: half the distance to the nearest other pole or to 0.
fn scan_radius(input: &BuilderInput, i: usize) -> f64 {
    let pts = input.config().points();
    let p = pts[i];
    0.5 * pts.iter().enumerate().filter(|(j, _)| *j != i).map(|(_, q)| (q - p).norm()).fold(p.norm(), f64::min)
}

/// Solves `|t f(p_i + r e^{iθ})| = 1` for `r` at `n` angles; fails unless each ray crosses exactly once.
pub fn trace_boundary(input: &BuilderInput, i: usize, n: usize) -> Result<BoundaryTrace> {
    let pts = input.config().points();
    let p = *pts.get(i).ok_or_else(|| Error::InvalidInput(format!("no point {i}")))?;
    if n < 8 {
        return Err(Error::InvalidInput("at least 8 boundary samples required".into()));
    }
    let r_max = scan_radius(input, i);
    let scale = (input.t() * (input.a()[i] * p).norm()).min(r_max);
    let r_min = 1e-3 * scale;
    let t2 = input.t() * input.t();
    let start = PI / 7.0;
    let mut theta = Vec::with_capacity(n);
    let mut radius = Vec::with_capacity(n);
    let mut dr = Vec::with_capacity(n);
    for k in 0..n {
        let th = start - 2.0 * PI * k as f64 / n as f64;
        let e = C::from_polar(1.0, th);
        let g = |r: f64| level(input, p + e * r);
        let ratio = (r_max / r_min).ln();
        let mut crossings = Vec::new();
        let mut prev = (r_min, g(r_min));
        if !(prev.1 > 0.0) {
            return Err(Error::ComponentsMerged(format!("|t f| < 1 next to p_{i} at angle {th:.3}")));
        }
        for s in 1..=SCAN_SAMPLES {
            let r = r_min * (ratio * s as f64 / SCAN_SAMPLES as f64).exp();
            let v = g(r);
            if (v > 0.0) != (prev.1 > 0.0) {
                crossings.push((prev.0, r));
            }
            prev = (r, v);
        }
        if crossings.len() != 1 || prev.1 > 0.0 {
            return Err(Error::ComponentsMerged(format!(
                "ray from p_{i} at angle {th:.3} crosses |t f| = 1 {} times within radius {r_max:.3e}",
                crossings.len()
            )));
        }
        let (mut lo, mut hi) = crossings[0];
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let r = if g(lo).abs() < g(hi).abs() { lo } else { hi };
        let z = p + e * r;
        let fz = input.f_raw(z);
        let fp = input.f_prime(z);
        let g_r = 2.0 * t2 * (fz.conj() * fp * e).re;
        let g_th = 2.0 * t2 * (fz.conj() * fp * C::i() * e * r).re;
        theta.push(th);
        radius.push(r);
        dr.push(-g_th / g_r);
    }
    Ok(BoundaryTrace { index: i, center: p, theta, radius, radius_derivative: dr })
}

/// Largest `t` (within relative `1e-6`) at which every component traces with single crossings, by bisection.
pub fn t_max(input: &BuilderInput) -> Result<f64> {
    let ok = |t: f64| -> Result<bool> {
        let trial = input.with_t(t)?;
        Ok((0..trial.config().len()).all(|i| trace_boundary(&trial, i, 64).is_ok()))
    };
    let mut lo = 0.0;
    let mut hi = 1e-3;
    while ok(hi)? {
        lo = hi;
        hi *= 2.0;
        if hi > 1e6 {
            return Ok(f64::INFINITY);
        }
    }
    while hi - lo > 1e-6 * hi {
        let mid = 0.5 * (lo + hi);
        if ok(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo)
}
