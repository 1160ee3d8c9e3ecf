//! Adaptive Gauss–Kronrod quadrature along contours.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64 as C;

use crate::error::{Error, Result};

/// Tolerances for the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureSettings {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_depth: usize,
}

impl Default for QuadratureSettings {
    fn default() -> Self {
        QuadratureSettings { abs_tol: 1e-10, rel_tol: 1e-12, max_depth: 40 }
    }
}

impl QuadratureSettings {
    pub fn new(abs_tol: f64, rel_tol: f64, max_depth: usize) -> Result<Self> {
        if !(abs_tol > 0.0 && rel_tol > 0.0) || max_depth < 1 {
            return Err(Error::InvalidInput(format!(
                "quadrature settings need positive tolerances and depth >= 1, got {abs_tol}, {rel_tol}, {max_depth}"
            )));
        }
        Ok(QuadratureSettings { abs_tol, rel_tol, max_depth })
    }

    pub fn with_abs_tol(mut self, abs_tol: f64) -> Self {
        self.abs_tol = abs_tol;
        self
    }
}

/// Values that can be accumulated by the integrator.
pub trait QuadValue: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
    fn norm(&self) -> f64;
    fn is_finite(&self) -> bool;
}

impl QuadValue for f64 {
    fn zero() -> Self {
        0.0
    }
    fn norm(&self) -> f64 {
        self.abs()
    }
    fn is_finite(&self) -> bool {
        f64::is_finite(*self)
    }
}

impl QuadValue for C {
    fn zero() -> Self {
        C::new(0.0, 0.0)
    }
    fn norm(&self) -> f64 {
        C::norm(*self)
    }
    fn is_finite(&self) -> bool {
        C::is_finite(*self)
    }
}

// 15-point Kronrod extension of the 7-point Gauss rule (abscissae on [0, 1] half).
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One Gauss–Kronrod panel: returns (Kronrod estimate, |Kronrod − Gauss|).
fn gk15<T: QuadValue, F>(f: &mut F, a: f64, b: f64) -> Result<(T, f64)>
where
    F: FnMut(f64) -> Result<T>,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut eval = |x: f64| -> Result<T> {
        let v = f(x)?;
        if !v.is_finite() {
            return Err(Error::NonFiniteSample { at: x });
        }
        Ok(v)
    };
    let fc = eval(c)?;
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = eval(c - dx)? + eval(c + dx)?;
        k = k + s * WGK[j];
        if j % 2 == 1 {
            g = g + s * WG[j / 2];
        }
    }
    let k = k * h;
    let g = g * h;
    Ok((k, (k - g).norm()))
}

struct Panel<T> {
    a: f64,
    b: f64,
    depth: usize,
    value: T,
    error: f64,
}

/// Integrates `f` over the union of the given breakpoint intervals with global adaptive bisection.
///
/// `breaks` must be increasing; each consecutive pair seeds one initial panel.
pub fn integrate_breaks<T: QuadValue, F>(mut f: F, breaks: &[f64], q: &QuadratureSettings) -> Result<T>
where
    F: FnMut(f64) -> Result<T>,
{
    if breaks.len() < 2 {
        return Ok(T::zero());
    }
    let mut panels = Vec::with_capacity(breaks.len() * 2);
    for w in breaks.windows(2) {
        let (value, error) = gk15(&mut f, w[0], w[1])?;
        panels.push(Panel { a: w[0], b: w[1], depth: 0, value, error });
    }
    loop {
        let total = panels.iter().fold(T::zero(), |acc, p| acc + p.value);
        let err: f64 = panels.iter().map(|p| p.error).sum();
        let target = q.abs_tol.max(q.rel_tol * total.norm());
        if err <= target {
            return Ok(total);
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |best, (i, p)| if p.error > best.1 { (i, p.error) } else { best });
        let p = panels.swap_remove(worst);
        if p.depth + 1 > q.max_depth {
            return Err(Error::MaxDepthExceeded { depth: q.max_depth, a: p.a, b: p.b, estimate: err });
        }
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(&mut f, p.a, m)?;
        let (v2, e2) = gk15(&mut f, m, p.b)?;
        panels.push(Panel { a: p.a, b: m, depth: p.depth + 1, value: v1, error: e1 });
        panels.push(Panel { a: m, b: p.b, depth: p.depth + 1, value: v2, error: e2 });
    }
}

/// Integrates a real-parameter function over `[a, b]`.
pub fn integrate_interval<T: QuadValue, F>(f: F, a: f64, b: f64, q: &QuadratureSettings) -> Result<T>
where
    F: FnMut(f64) -> Result<T>,
{
    integrate_breaks(f, &[a, b], q)
}

/// Shape of an integration contour.
#[derive(Debug, Clone, PartialEq)]
pub enum PathKind {
    Polyline { vertices: Vec<C>, closed: bool },
    Circle { center: C, radius: f64, counterclockwise: bool },
}

/// An oriented integration contour.
#[derive(Debug, Clone, PartialEq)]
pub struct ContourPath {
    pub kind: PathKind,
}

impl ContourPath {
    pub fn polyline(vertices: Vec<C>, closed: bool) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::InvalidInput("polyline needs at least 2 vertices".into()));
        }
        Ok(ContourPath { kind: PathKind::Polyline { vertices, closed } })
    }

    pub fn segment(a: C, b: C) -> Self {
        ContourPath { kind: PathKind::Polyline { vertices: vec![a, b], closed: false } }
    }

    pub fn circle(center: C, radius: f64, counterclockwise: bool) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidInput(format!("circle radius must be positive, got {radius}")));
        }
        Ok(ContourPath { kind: PathKind::Circle { center, radius, counterclockwise } })
    }

    pub fn is_closed(&self) -> bool {
        match &self.kind {
            PathKind::Polyline { closed, vertices } => *closed || vertices.first() == vertices.last(),
            PathKind::Circle { .. } => true,
        }
    }

    pub fn reversed(&self) -> Self {
        match &self.kind {
            PathKind::Polyline { vertices, closed } => {
                let mut v = vertices.clone();
                v.reverse();
                ContourPath { kind: PathKind::Polyline { vertices: v, closed: *closed } }
            }
            PathKind::Circle { center, radius, counterclockwise } => ContourPath {
                kind: PathKind::Circle { center: *center, radius: *radius, counterclockwise: !counterclockwise },
            },
        }
    }

    /// Number of unit parameter panels.
    pub fn panels(&self) -> usize {
        match &self.kind {
            PathKind::Polyline { vertices, closed } => {
                let n = vertices.len() - 1;
                if *closed && vertices.first() != vertices.last() {
                    n + 1
                } else {
                    n
                }
            }
            PathKind::Circle { .. } => 4,
        }
    }

    /// Point and derivative dz/ds at parameter `s ∈ [0, panels]`.
    pub fn point(&self, s: f64) -> (C, C) {
        match &self.kind {
            PathKind::Polyline { vertices, .. } => {
                let n = self.panels();
                let k = (s.floor() as usize).min(n - 1);
                let a = vertices[k];
                let b = vertices[(k + 1) % vertices.len()];
                let d = b - a;
                (a + d * (s - k as f64), d)
            }
            PathKind::Circle { center, radius, counterclockwise } => {
                let sign = if *counterclockwise { 1.0 } else { -1.0 };
                let th = sign * s * std::f64::consts::FRAC_PI_2;
                let e = C::from_polar(*radius, th);
                (center + e, C::i() * e * (sign * std::f64::consts::FRAC_PI_2))
            }
        }
    }
}

/// Computes `∫_path f(z) dz`.
pub fn integrate_contour<F>(mut f: F, path: &ContourPath, q: &QuadratureSettings) -> Result<C>
where
    F: FnMut(C) -> C,
{
    let n = path.panels();
    let breaks: Vec<f64> = (0..=n).map(|k| k as f64).collect();
    integrate_breaks(
        |s| {
            let (z, dz) = path.point(s);
            Ok(f(z) * dz)
        },
        &breaks,
        q,
    )
}

/// Like [`integrate_contour`] for fallible integrands.
pub fn try_integrate_contour<F>(mut f: F, path: &ContourPath, q: &QuadratureSettings) -> Result<C>
where
    F: FnMut(C) -> Result<C>,
{
    let n = path.panels();
    let breaks: Vec<f64> = (0..=n).map(|k| k as f64).collect();
    integrate_breaks(
        |s| {
            let (z, dz) = path.point(s);
            Ok(f(z)? * dz)
        },
        &breaks,
        q,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn q() -> QuadratureSettings {
        QuadratureSettings::default()
    }

    #[test]
    fn constant_on_closed_circle_vanishes() {
        let path = ContourPath::circle(C::new(0.0, 0.0), 1.0, true).unwrap();
        let v = integrate_contour(|_| C::new(1.0, 0.0), &path, &q()).unwrap();
        assert!(v.norm() < 1e-12);
    }

    #[test]
    fn residue_of_inverse() {
        let path = ContourPath::circle(C::new(0.0, 0.0), 1.0, true).unwrap();
        let v = integrate_contour(|z| 1.0 / z, &path, &q()).unwrap();
        assert!((v - C::new(0.0, 2.0 * PI)).norm() < 1e-10);
        let v = integrate_contour(|z| 1.0 / z, &path.reversed(), &q()).unwrap();
        assert!((v + C::new(0.0, 2.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn scherk_puncture_residue() {
        // Oracle: z/(z^4+6z^2+1) = z/((z^2+a)(z^2+b)), a = 3-2√2, b = 3+2√2.
        // At z0 = i√a the residue is z0/(2 z0 (b - a)) = 1/(2(b-a)) = 1/(8√2).
        let a: f64 = 3.0 - 2.0 * 2f64.sqrt();
        let b: f64 = 3.0 + 2.0 * 2f64.sqrt();
        let oracle = 1.0 / (2.0 * (b - a));
        assert!((oracle - 1.0 / (8.0 * 2f64.sqrt())).abs() < 1e-15);
        let center = C::new(0.0, 2f64.sqrt() - 1.0);
        let path = ContourPath::circle(center, 0.1, true).unwrap();
        let v = integrate_contour(|z| z / (z.powi(4) + 6.0 * z * z + 1.0), &path, &q()).unwrap();
        assert!((v - C::new(0.0, 2.0 * PI * oracle)).norm() < 1e-10);
    }

    #[test]
    fn polyline_matches_primitive() {
        let path = ContourPath::polyline(vec![C::new(0.0, 0.0), C::new(1.0, 0.0), C::new(1.0, 2.0)], false).unwrap();
        let v = integrate_contour(|z| z * z, &path, &q()).unwrap();
        let end = C::new(1.0, 2.0);
        assert!((v - end * end * end / 3.0).norm() < 1e-12);
    }

    #[test]
    fn nonfinite_sample_is_reported() {
        let path = ContourPath::segment(C::new(-1.0, 0.0), C::new(1.0, 0.0));
        let err = integrate_contour(|z| C::new(f64::NAN, 0.0) * z, &path, &q()).unwrap_err();
        assert!(matches!(err, Error::NonFiniteSample { .. }));
    }

    #[test]
    fn depth_limit_is_reported() {
        let q = QuadratureSettings::new(1e-14, 1e-14, 3).unwrap();
        let r = integrate_interval(|x: f64| Ok((1.0 / (x.abs() + 1e-9)).sqrt()), -1.0, 1.0, &q);
        assert!(matches!(r, Err(Error::MaxDepthExceeded { .. })));
    }

    #[test]
    fn settings_are_validated() {
        assert!(QuadratureSettings::new(0.0, 1e-10, 5).is_err());
        assert!(QuadratureSettings::new(1e-10, 1e-10, 0).is_err());
    }
}
