//! The three Weierstrass 1-forms and a branch-tracking path walker.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::numeric::{integrate_interval, QuadValue, QuadratureSettings};

/// Values of `(ω, gω, g⁻¹ω)`, either per `dz` or integrated along a path.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct FormTriple {
    pub omega: C,
    pub g_omega: C,
    pub ginv_omega: C,
}

impl FormTriple {
    pub fn new(omega: C, g_omega: C, ginv_omega: C) -> Self {
        FormTriple { omega, g_omega, ginv_omega }
    }

    /// Horizontal projection `x1 + i x2 = ½(conj ∫g⁻¹ω − ∫gω)`.
    pub fn psi(&self) -> C {
        0.5 * (self.ginv_omega.conj() - self.g_omega)
    }

    /// Vortex-plane coordinate `−∫gω`.
    pub fn phi(&self) -> C {
        -self.g_omega
    }

    /// Height `Re ∫ω`.
    pub fn x3(&self) -> f64 {
        self.omega.re
    }

    /// `Re ∫ (½(g⁻¹ − g)ω, (i/2)(g⁻¹ + g)ω, ω)`.
    pub fn position(&self) -> [f64; 3] {
        let h = self.ginv_omega;
        let g = self.g_omega;
        [(0.5 * (h - g)).re, (C::i() * 0.5 * (h + g)).re, self.omega.re]
    }

    pub fn max_norm(&self) -> f64 {
        self.omega.norm().max(self.g_omega.norm()).max(self.ginv_omega.norm())
    }

    pub fn scale(&self, s: C) -> Self {
        FormTriple::new(self.omega * s, self.g_omega * s, self.ginv_omega * s)
    }
}

impl Add for FormTriple {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        FormTriple::new(self.omega + o.omega, self.g_omega + o.g_omega, self.ginv_omega + o.ginv_omega)
    }
}

impl Sub for FormTriple {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        FormTriple::new(self.omega - o.omega, self.g_omega - o.g_omega, self.ginv_omega - o.ginv_omega)
    }
}

impl Neg for FormTriple {
    type Output = Self;
    fn neg(self) -> Self {
        FormTriple::new(-self.omega, -self.g_omega, -self.ginv_omega)
    }
}

impl Mul<f64> for FormTriple {
    type Output = Self;
    fn mul(self, s: f64) -> Self {
        FormTriple::new(self.omega * s, self.g_omega * s, self.ginv_omega * s)
    }
}

impl QuadValue for FormTriple {
    fn zero() -> Self {
        FormTriple::default()
    }
    fn norm(&self) -> f64 {
        self.omega.norm() + self.g_omega.norm() + self.ginv_omega.norm()
    }
    fn is_finite(&self) -> bool {
        self.omega.is_finite() && self.g_omega.is_finite() && self.ginv_omega.is_finite()
    }
}

/// Kind of an isolated singular point of the integrands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularKind {
    Branch,
    Pole,
}

/// Source of Weierstrass integrands `(ω, gω, g⁻¹ω)/dz`, possibly involving one square root.
pub trait Forms: Send + Sync {
    /// Whether the integrands involve `sqrt(Q)`.
    fn is_multivalued(&self) -> bool {
        false
    }

    /// `Q(z)`; only consulted when multivalued.
    fn radicand(&self, _z: C) -> C {
        C::new(1.0, 0.0)
    }

    /// Gauss map `g(z)`.
    fn gauss(&self, z: C) -> C;

    /// Integrands at `z`, where `root` is the current determination of `sqrt(Q(z))`.
    fn integrands(&self, z: C, root: C) -> FormTriple;

    /// Isolated points the walker must not cross.
    fn singularities(&self) -> Vec<(C, SingularKind)> {
        Vec::new()
    }
}

/// Root of `q` closest to `prev`.
pub fn nearest_root(q: C, prev: C) -> C {
    let r = q.sqrt();
    if (r - prev).norm() <= (r + prev).norm() {
        r
    } else {
        -r
    }
}

/// Largest angle change allowed between successive square-root samples.
pub const MAX_ROOT_TURN: f64 = 0.2;

fn angle_between(a: C, b: C) -> f64 {
    (b / a).arg().abs()
}

fn distance_to_segment(p: C, a: C, b: C) -> f64 {
    let d = b - a;
    let len2 = d.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let s = (((p - a) * d.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + d * s)).norm()
}

/// Square-root determination carried along a path, with an optional log of `(z, root)` samples.
#[derive(Debug, Clone, PartialEq)]
pub struct BranchState {
    pub value: C,
    pub log: Vec<(C, C)>,
}

/// Integrates the forms along polylines while continuing the square root.
#[derive(Clone)]
pub struct Walker<'a> {
    forms: &'a dyn Forms,
    z: C,
    root: C,
    acc: FormTriple,
    quad: QuadratureSettings,
    singular: Vec<(C, SingularKind)>,
    log: Option<Vec<(C, C)>>,
}

/// Quadrature settings used by walkers unless overridden.
pub fn walker_quadrature() -> QuadratureSettings {
    QuadratureSettings { abs_tol: 1e-13, rel_tol: 1e-13, max_depth: 40 }
}

impl<'a> Walker<'a> {
    /// Starts at `z0`; `root0` defaults to the principal square root of `Q(z0)`.
    pub fn new(forms: &'a dyn Forms, z0: C, root0: Option<C>) -> Result<Self> {
        let singular = forms.singularities();
        for &(s, kind) in &singular {
            if (s - z0).norm() < 1e-12 * (1.0 + s.norm()) {
                return Err(match kind {
                    SingularKind::Branch => Error::branch_at(z0),
                    SingularKind::Pole => Error::pole_at(z0),
                });
            }
        }
        let root = if forms.is_multivalued() {
            let q = forms.radicand(z0);
            match root0 {
                Some(r) => nearest_root(q, r),
                None => q.sqrt(),
            }
        } else {
            C::new(1.0, 0.0)
        };
        Ok(Walker { forms, z: z0, root, acc: FormTriple::default(), quad: walker_quadrature(), singular, log: None })
    }

    /// Resumes from a known state.
    pub fn resume(forms: &'a dyn Forms, z: C, root: C, acc: FormTriple) -> Self {
        Walker { forms, z, root, acc, quad: walker_quadrature(), singular: forms.singularities(), log: None }
    }

    pub fn with_quadrature(mut self, quad: QuadratureSettings) -> Self {
        self.quad = quad;
        self
    }

    pub fn with_log(mut self) -> Self {
        self.log = Some(vec![(self.z, self.root)]);
        self
    }

    pub fn z(&self) -> C {
        self.z
    }

    pub fn root(&self) -> C {
        self.root
    }

    pub fn integrals(&self) -> FormTriple {
        self.acc
    }

    pub fn forms(&self) -> &'a dyn Forms {
        self.forms
    }

    pub fn branch_state(&self) -> BranchState {
        BranchState { value: self.root, log: self.log.clone().unwrap_or_default() }
    }

    /// Integrands at the current point.
    pub fn integrands_here(&self) -> FormTriple {
        self.forms.integrands(self.z, self.root)
    }

    /// Moves along the straight segment to `z1`.
    pub fn advance(&mut self, z1: C) -> Result<()> {
        if z1 == self.z {
            return Ok(());
        }
        let len = (z1 - self.z).norm();
        for &(s, kind) in &self.singular {
            if distance_to_segment(s, self.z, z1) < 1e-12 * (1.0 + s.norm()).max(len) {
                return Err(match kind {
                    SingularKind::Branch => Error::branch_at(s),
                    SingularKind::Pole => Error::pole_at(s),
                });
            }
        }
        if !self.forms.is_multivalued() {
            let a = self.z;
            let d = z1 - a;
            let forms = self.forms;
            let part: FormTriple = integrate_interval(
                |s| Ok(forms.integrands(a + d * s, C::new(1.0, 0.0)).scale(d)),
                0.0,
                1.0,
                &self.quad,
            )
            .map_err(|e| self.locate(e, a, d))?;
            self.acc = self.acc + part;
            self.z = z1;
            self.push_log();
            return Ok(());
        }
        let a0 = self.z;
        let d = z1 - a0;
        let mut s = 0.0;
        while s < 1.0 {
            let mut ds = 1.0 - s;
            let (root_b, ds) = loop {
                let zb = a0 + d * (s + ds);
                let zm = a0 + d * (s + 0.5 * ds);
                let qb = self.forms.radicand(zb);
                let qm = self.forms.radicand(zm);
                let rm = nearest_root(qm, self.root);
                let rb = nearest_root(qb, rm);
                let ok = qb.norm() > 0.0
                    && qm.norm() > 0.0
                    && angle_between(self.root, rm) < MAX_ROOT_TURN
                    && angle_between(rm, rb) < MAX_ROOT_TURN;
                if ok {
                    break (rb, ds);
                }
                ds *= 0.5;
                if ds < 1e-14 {
                    return Err(Error::branch_at(zb));
                }
            };
            let za = a0 + d * s;
            let seg = d * ds;
            let ra = self.root;
            let forms = self.forms;
            let part: FormTriple = integrate_interval(
                |u| {
                    let z = za + seg * u;
                    let r = nearest_root(forms.radicand(z), ra);
                    Ok(forms.integrands(z, r).scale(seg))
                },
                0.0,
                1.0,
                &self.quad,
            )
            .map_err(|e| self.locate(e, za, seg))?;
            self.acc = self.acc + part;
            self.root = root_b;
            s += ds;
            self.z = if s >= 1.0 { z1 } else { a0 + d * s };
            self.push_log();
        }
        Ok(())
    }

    /// Follows the vertices in order.
    pub fn follow(&mut self, vertices: &[C]) -> Result<()> {
        for &v in vertices {
            self.advance(v)?;
        }
        Ok(())
    }

    fn push_log(&mut self) {
        if let Some(log) = self.log.as_mut() {
            log.push((self.z, self.root));
        }
    }

    fn locate(&self, e: Error, a: C, d: C) -> Error {
        match e {
            Error::NonFiniteSample { at } => Error::pole_at(a + d * at),
            other => other,
        }
    }
}

/// Continues the square root along a polyline without integrating.
pub fn continue_root(forms: &dyn Forms, vertices: &[C], root0: Option<C>) -> Result<BranchState> {
    let first = *vertices.first().ok_or_else(|| Error::InvalidInput("empty path".into()))?;
    let mut w = Walker::new(forms, first, root0)?.with_log();
    if forms.is_multivalued() {
        for &v in &vertices[1..] {
            let a0 = w.z;
            let d = v - a0;
            let mut s = 0.0;
            while s < 1.0 {
                let mut ds = 1.0 - s;
                loop {
                    let zb = a0 + d * (s + ds);
                    let zm = a0 + d * (s + 0.5 * ds);
                    let rm = nearest_root(forms.radicand(zm), w.root);
                    let rb = nearest_root(forms.radicand(zb), rm);
                    if angle_between(w.root, rm) < MAX_ROOT_TURN && angle_between(rm, rb) < MAX_ROOT_TURN {
                        w.root = rb;
                        break;
                    }
                    ds *= 0.5;
                    if ds < 1e-14 {
                        return Err(Error::branch_at(zb));
                    }
                }
                s += ds;
                w.z = if s >= 1.0 { v } else { a0 + d * s };
            }
            w.push_log();
        }
    } else {
        for &v in &vertices[1..] {
            w.z = v;
            w.push_log();
        }
    }
    Ok(w.branch_state())
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Sqrt;
    impl Forms for Sqrt {
        fn is_multivalued(&self) -> bool {
            true
        }
        fn radicand(&self, z: C) -> C {
            z
        }
        fn gauss(&self, _z: C) -> C {
            C::new(1.0, 0.0)
        }
        fn integrands(&self, _z: C, root: C) -> FormTriple {
            FormTriple::new(root, root, root)
        }
        fn singularities(&self) -> Vec<(C, SingularKind)> {
            vec![(C::new(0.0, 0.0), SingularKind::Branch)]
        }
    }

    #[test]
    fn sqrt_integral_and_monodromy() {
        let n = 64;
        let circle: Vec<C> = (0..=n).map(|k| C::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect();
        let mut w = Walker::new(&Sqrt, circle[0], None).unwrap();
        w.follow(&circle[1..]).unwrap();
        assert!((w.root() + 1.0).norm() < 1e-12);
        // Along the chords the primitive (2/3) z^{3/2} is continued to -(2/3) at the end.
        let expect = C::new(-2.0 / 3.0 - 2.0 / 3.0, 0.0);
        assert!((w.integrals().omega - expect).norm() < 1e-10);
    }

    #[test]
    fn branch_point_on_path() {
        let mut w = Walker::new(&Sqrt, C::new(-1.0, 0.0), None).unwrap();
        assert!(matches!(w.advance(C::new(1.0, 0.0)), Err(Error::BranchPointOnPath { .. })));
    }

    #[test]
    fn triple_geometry() {
        let t = FormTriple::new(C::new(0.0, 1.0), C::new(1.0, 2.0), C::new(3.0, -1.0));
        let p = t.position();
        let psi = t.psi();
        assert!((psi.re - p[0]).abs() < 1e-15 && (psi.im - p[1]).abs() < 1e-15);
    }
}
