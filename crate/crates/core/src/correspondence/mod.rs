//! Maps between vortex domains `(Ω, u)` and minimal graphs bounded by horizontal symmetry curves.
//!
//! On the vortex side `ψ` has `dψ = ½(dw − conj(2u_w)² dw̄)`; the graph is `v = u∘ψ⁻¹` with Weierstrass data
//! `g = −1/(2u_w)`, `ω = 2u_w dw`. In the other direction `F` with `F∘ψ = −∫ gω` recovers the domain.

mod graph;
mod planner;
mod vortex;

pub use graph::{
    df_closedness, df_coefficients, graph_df, graph_gradient, roundtrip_check, vortex_to_minimal, DfReport, MinimalGraph,
    RoundtripReport,
};
pub use planner::{segment_inside, PathPlanner};
pub use vortex::{minimal_to_vortex, MinimalVortex, VortexPoint};

use std::sync::Arc;

use num_complex::Complex64 as C;
use rand::Rng;

use crate::builder::BuiltDomain;
use crate::error::{Error, Result};
use crate::numeric::{integrate_contour, ContourPath, QuadratureSettings};
use crate::weierstrass::{FormTriple, Forms, Walker};

type ComplexField = Arc<dyn Fn(C) -> C + Send + Sync>;
type RealField = Arc<dyn Fn(C) -> f64 + Send + Sync>;
type Membership = Arc<dyn Fn(C) -> bool + Send + Sync>;

/// A vortex domain: `2u_w` on `Ω`, a membership test, boundary polylines and a base point.
#[derive(Clone)]
pub struct StreamData {
    uz2: ComplexField,
    contains: Membership,
    stream: Option<RealField>,
    boundaries: Vec<Vec<C>>,
    base_point: C,
    base_value: f64,
}

impl std::fmt::Debug for StreamData {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StreamData")
            .field("boundaries", &self.boundaries.len())
            .field("base_point", &self.base_point)
            .field("base_value", &self.base_value)
            .finish()
    }
}

impl StreamData {
    pub fn new(
        uz2: impl Fn(C) -> C + Send + Sync + 'static,
        contains: impl Fn(C) -> bool + Send + Sync + 'static,
        boundaries: Vec<Vec<C>>,
        base_point: C,
        base_value: f64,
    ) -> Result<Self> {
        if !contains(base_point) {
            return Err(Error::InvalidInput(format!("base point {base_point} outside the domain")));
        }
        Ok(StreamData { uz2: Arc::new(uz2), contains: Arc::new(contains), stream: None, boundaries, base_point, base_value })
    }

    /// Attaches an independent evaluator of `u`.
    pub fn with_stream(mut self, u: impl Fn(C) -> f64 + Send + Sync + 'static) -> Self {
        self.stream = Some(Arc::new(u));
        self
    }

    /// The vortex domain of a built street: `2u_w = −i t f(e^{−iw})`.
    pub fn from_built(built: &BuiltDomain) -> Result<Self> {
        let a = built.clone();
        let b = built.clone();
        let c = built.clone();
        let base = C::i() * built.base_point.ln();
        Ok(StreamData::new(move |w| a.uz2(w), move |w| b.contains(w), built.images.clone(), base, 0.0)?
            .with_stream(move |w| c.stream_value(w)))
    }

    /// Same domain with `2u_w` multiplied by `s` and the same `u` evaluator (a deliberately inconsistent pair).
    pub fn scaled(&self, s: f64) -> Self {
        let f = self.uz2.clone();
        StreamData { uz2: Arc::new(move |w| f(w) * s), ..self.clone() }
    }

    pub fn uz2(&self, w: C) -> C {
        (self.uz2)(w)
    }

    pub fn contains(&self, w: C) -> bool {
        (self.contains)(w)
    }

    pub fn stream(&self, w: C) -> Option<f64> {
        self.stream.as_ref().map(|u| u(w))
    }

    pub fn boundaries(&self) -> &[Vec<C>] {
        &self.boundaries
    }

    pub fn base_point(&self) -> C {
        self.base_point
    }

    pub fn base_value(&self) -> f64 {
        self.base_value
    }

    /// Bounding box `(min, max)` of the boundaries and the base point.
    pub fn bbox(&self) -> (C, C) {
        let mut lo = self.base_point;
        let mut hi = self.base_point;
        for p in self.boundaries.iter().flatten() {
            lo = C::new(lo.re.min(p.re), lo.im.min(p.im));
            hi = C::new(hi.re.max(p.re), hi.im.max(p.im));
        }
        (lo, hi)
    }

    /// Uniform random points of the domain inside the bounding box enlarged by `margin`, with `|2u_w| ≤ max_speed`.
    pub fn random_interior(&self, rng: &mut impl Rng, count: usize, margin: f64, max_speed: f64) -> Vec<C> {
        let (lo, hi) = self.bbox();
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count && attempts < 10_000 * count.max(1) {
            attempts += 1;
            let w = C::new(rng.random_range(lo.re - margin..hi.re + margin), rng.random_range(lo.im - margin..hi.im + margin));
            if self.contains(w) && self.uz2(w).norm() <= max_speed {
                out.push(w);
            }
        }
        out
    }

    /// Fails with `NotSubunitGradient` at the first probe where `|2u_w| ≥ 1`.
    pub fn check_subunit(&self, probes: &[C]) -> Result<()> {
        for &w in probes {
            let m = self.uz2(w).norm();
            if !(m < 1.0) {
                return Err(Error::NotSubunitGradient { modulus: m, re: w.re, im: w.im });
            }
        }
        Ok(())
    }
}

/// Weierstrass data `g = −1/(2u_w)`, `ω = 2u_w dw` of the graph over `ψ(Ω)`, in the vortex-plane coordinate.
#[derive(Clone, Copy)]
pub struct StreamForms<'a> {
    sd: &'a StreamData,
}

impl<'a> StreamForms<'a> {
    pub fn new(sd: &'a StreamData) -> Self {
        StreamForms { sd }
    }
}

impl Forms for StreamForms<'_> {
    fn gauss(&self, w: C) -> C {
        -1.0 / self.sd.uz2(w)
    }

    fn integrands(&self, w: C, _root: C) -> FormTriple {
        let a = self.sd.uz2(w);
        FormTriple::new(a, C::new(-1.0, 0.0), -a * a)
    }
}

/// A point, its image and the real Jacobian of the map there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapSample {
    pub source: C,
    pub image: C,
    /// `[[∂x/∂s, ∂x/∂t], [∂y/∂s, ∂y/∂t]]` for the map `(s, t) ↦ (x, y)`.
    pub jacobian: [[f64; 2]; 2],
}

impl MapSample {
    pub fn determinant(&self) -> f64 {
        self.jacobian[0][0] * self.jacobian[1][1] - self.jacobian[0][1] * self.jacobian[1][0]
    }
}

/// Jacobian of `ψ` where `2u_w = a`: `dψ = ½((1 − B) ds + i(1 + B) dt)` with `B = conj(a)²`.
pub fn psi_jacobian(a: C) -> [[f64; 2]; 2] {
    let b = a.conj() * a.conj();
    let ds = 0.5 * (1.0 - b);
    let dt = 0.5 * C::i() * (1.0 + b);
    [[ds.re, dt.re], [ds.im, dt.im]]
}

/// `ψ` at the end of `path`, integrating from `path[0]` where `ψ = 0`.
pub fn psi_map(sd: &StreamData, path: &[C]) -> Result<MapSample> {
    let forms = StreamForms::new(sd);
    let start = *path.first().ok_or_else(|| Error::InvalidInput("empty path".into()))?;
    let mut w = Walker::new(&forms, start, None)?;
    w.follow(&path[1..])?;
    let end = w.z();
    Ok(MapSample { source: end, image: w.integrals().psi(), jacobian: psi_jacobian(sd.uz2(end)) })
}

/// Circulation `C(γ) = i ∮_γ 2u_w dw` along the closed polyline `gamma`.
pub fn circulation(sd: &StreamData, gamma: &[C]) -> Result<f64> {
    let path = ContourPath::polyline(gamma.to_vec(), true)?;
    let q = QuadratureSettings { abs_tol: 1e-13, rel_tol: 1e-13, max_depth: 40 };
    let c = C::i() * integrate_contour(|w| sd.uz2(w), &path, &q)?;
    let scale = 1.0f64.max(c.re.abs());
    if c.im.abs() > 1e-8 * scale {
        return Err(Error::NonRealCirculation { imag: c.im });
    }
    Ok(c.re)
}

/// Length of a polyline, closed if `closed`.
pub fn polyline_length(points: &[C], closed: bool) -> f64 {
    let open: f64 = points.windows(2).map(|s| (s[1] - s[0]).norm()).sum();
    match (closed, points.first(), points.last()) {
        (true, Some(a), Some(b)) => open + (a - b).norm(),
        _ => open,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builder::{build_domain, BuildSettings, BuilderInput};
    use crate::configurations::vonkarman_street;
    use std::f64::consts::PI;

    pub(crate) fn street_data(t: f64) -> (BuiltDomain, StreamData) {
        let input = BuilderInput::new(vonkarman_street(C::new(0.25, 0.0)).unwrap(), t, None).unwrap();
        let b = build_domain(&input, &BuildSettings { grid: 32, ..Default::default() }).unwrap();
        let sd = StreamData::from_built(&b).unwrap();
        (b, sd)
    }

    #[test]
    fn psi_jacobian_positive_inside() {
        for a in [C::new(0.0, 0.0), C::new(0.3, -0.5), C::new(-0.9, 0.1)] {
            let j = psi_jacobian(a);
            let det = j[0][0] * j[1][1] - j[0][1] * j[1][0];
            assert!((det - 0.25 * (1.0 - a.norm_sqr().powi(2))).abs() < 1e-15);
        }
    }

    #[test]
    fn psi_at_base_is_zero_and_flat_flow_is_identity() {
        // u = 0: dψ = ½ dw.
        let sd = StreamData::new(|_| C::new(0.0, 0.0), |_| true, vec![], C::new(0.0, 0.0), 0.0).unwrap();
        let s = psi_map(&sd, &[C::new(0.0, 0.0)]).unwrap();
        assert_eq!(s.image, C::new(0.0, 0.0));
        let s = psi_map(&sd, &[C::new(0.0, 0.0), C::new(2.0, 4.0)]).unwrap();
        assert!((s.image - C::new(1.0, 2.0)).norm() < 1e-14);
    }

    #[test]
    fn street_circulations() {
        let (b, sd) = street_data(0.05);
        for (i, img) in b.images.iter().enumerate() {
            let c = circulation(&sd, img).unwrap();
            let expect = 2.0 * PI * 0.05 * b.input.config().weights()[i];
            assert!((c - expect).abs() < 1e-8, "{c} vs {expect}");
            let mut rev = img.clone();
            rev.reverse();
            assert!((circulation(&sd, &rev).unwrap() + c).abs() < 1e-12);
            let len = polyline_length(img, true);
            assert!((c.abs() - len).abs() < 1e-5 * len, "{c} vs {len}");
        }
    }

    #[test]
    fn boundary_increment_follows_the_boundary() {
        let (b, sd) = street_data(0.02);
        let img = &b.images[0];
        let s = psi_map(&sd, &img[..40]).unwrap();
        let along = img[39] - img[0];
        // dψ − dw is first order in the oscillation of u along γ.
        assert!((s.image - along).norm() < 1e-5, "{}", (s.image - along).norm());
    }
}
