//! Vortex domain to minimal graph: `v = u∘ψ⁻¹`, the differential `dF` of the inverse map, and the round trip.

use num_complex::Complex64 as C;

use super::planner::{segment_inside, PathPlanner, PLANNER_NODES};
use super::{psi_jacobian, MapSample, StreamData, StreamForms};
use crate::error::{Error, Result};
use crate::numeric::{integrate_interval, QuadratureSettings};
use crate::weierstrass::{walker_quadrature, FormTriple, Walker};

/// Margin added around the boundary bounding box for the planner grid.
const PLANNER_MARGIN: f64 = 1.0;
/// Largest `|2u_w|` allowed along integration paths.
const PATH_MAX_SPEED: f64 = 0.98;
/// Newton tolerance for `ψ⁻¹`.
const INVERSE_TOL: f64 = 1e-10;

/// `(P, Q)` with `dF = P dx + Q dy` for the graph gradient `(v_x, v_y)`.
pub fn df_coefficients(vx: f64, vy: f64) -> (C, C) {
    let w = (1.0 + vx * vx + vy * vy).sqrt();
    let p = C::new(1.0 + (1.0 + vx * vx) / w, vx * vy / w);
    let q = C::new(vx * vy / w, 1.0 + (1.0 + vy * vy) / w);
    (p, q)
}

/// `|∂P/∂y − ∂Q/∂x|` at `(x, y)` by central differences of step `h`, for a gradient field `grad`.
pub fn df_closedness(grad: impl Fn(f64, f64) -> Result<(f64, f64)>, x: f64, y: f64, h: f64) -> Result<f64> {
    let coef = |x: f64, y: f64| -> Result<(C, C)> {
        let (vx, vy) = grad(x, y)?;
        if !(vx.is_finite() && vy.is_finite()) {
            return Err(Error::NonFiniteGradient { re: x, im: y });
        }
        Ok(df_coefficients(vx, vy))
    };
    let p_y = (coef(x, y + h)?.0 - coef(x, y - h)?.0) / (2.0 * h);
    let q_x = (coef(x + h, y)?.1 - coef(x - h, y)?.1) / (2.0 * h);
    Ok((p_y - q_x).norm())
}

/// Graph gradient `v_x + i v_y` at `ψ(w)` from `a = 2u_w` and the measured `U = u_x − i u_y` at `w`.
pub fn graph_gradient(a: C, u: C) -> C {
    let ab = a.conj();
    2.0 * (u.conj() + ab * ab * u) / (1.0 - a.norm_sqr().powi(2))
}

/// Coefficients of `dF` and the closedness diagnostic at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DfReport {
    pub p: C,
    pub q: C,
    pub closedness: f64,
}

/// The minimal graph over `ψ(Ω)` with its Weierstrass data, evaluated through cached integrals on a grid.
#[derive(Clone)]
pub struct MinimalGraph {
    sd: StreamData,
    planner: PathPlanner,
    /// Integrals from the base point to each reached node.
    cache: Vec<Option<FormTriple>>,
    /// `(node, ψ(node))` for seeding inversions.
    seeds: Vec<(usize, C)>,
}

impl std::fmt::Debug for MinimalGraph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MinimalGraph").field("planner", &self.planner).finish()
    }
}

/// Checks `|2u_w| < 1` on `probes` and caches `ψ` on a spanning tree of grid nodes.
pub fn vortex_to_minimal(sd: &StreamData, probes: &[C]) -> Result<MinimalGraph> {
    sd.check_subunit(probes)?;
    let (lo, hi) = sd.bbox();
    let pad = C::new(PLANNER_MARGIN, PLANNER_MARGIN);
    let inside = |w: C| inside(sd, w);
    let planner = PathPlanner::new(&inside, sd.base_point(), lo - pad, hi + pad, PLANNER_NODES)?;
    let forms = StreamForms::new(sd);
    let mut cache = vec![None; planner.node_count()];
    for (k, z, parent) in planner.tree() {
        let (start, acc) = match parent {
            Some(p) => (planner.node(p), cache[p].expect("parent visited first")),
            None => (sd.base_point(), FormTriple::default()),
        };
        let mut walker = Walker::resume(&forms, start, C::new(1.0, 0.0), acc);
        walker.advance(z)?;
        cache[k] = Some(walker.integrals());
    }
    let seeds = planner.tree().map(|(k, _, _)| (k, cache[k].unwrap().psi())).collect();
    Ok(MinimalGraph { sd: sd.clone(), planner, cache, seeds })
}

fn inside(sd: &StreamData, w: C) -> bool {
    sd.contains(w) && sd.uz2(w).norm() < PATH_MAX_SPEED
}

impl MinimalGraph {
    pub fn stream_data(&self) -> &StreamData {
        &self.sd
    }

    pub fn planner(&self) -> &PathPlanner {
        &self.planner
    }

    /// Whether `w` is reachable by the path planner.
    pub fn reachable(&self, w: C) -> bool {
        inside(&self.sd, w)
    }

    /// Integrals of `(ω, gω, g⁻¹ω)` from the base point to `w`.
    pub fn integrals(&self, w: C) -> Result<FormTriple> {
        let inside = |z: C| inside(&self.sd, z);
        let forms = StreamForms::new(&self.sd);
        let base = self.sd.base_point();
        let (start, acc) = if segment_inside(&inside, base, w, 1e-2) {
            (base, FormTriple::default())
        } else {
            let k = *self
                .planner
                .visible_nodes(&inside, w, 1)
                .first()
                .ok_or_else(|| Error::InvalidInput(format!("no in-domain path to {w}")))?;
            (self.planner.node(k), self.cache[k].expect("reached node"))
        };
        let mut walker = Walker::resume(&forms, start, C::new(1.0, 0.0), acc);
        walker.advance(w)?;
        Ok(walker.integrals())
    }

    /// `ψ(w)` with its Jacobian.
    pub fn psi(&self, w: C) -> Result<MapSample> {
        Ok(MapSample { source: w, image: self.integrals(w)?.psi(), jacobian: psi_jacobian(self.sd.uz2(w)) })
    }

    /// Height `x3 = u(w0) + Re ∫ω` of the graph point over `ψ(w)`.
    pub fn height(&self, w: C) -> Result<f64> {
        Ok(self.sd.base_value() + self.integrals(w)?.x3())
    }

    /// `w` with `ψ(w) = xi`, by Newton iteration from the cached node with the nearest image.
    pub fn psi_inverse(&self, xi: C) -> Result<C> {
        let inside = |z: C| inside(&self.sd, z);
        let forms = StreamForms::new(&self.sd);
        let mut seeds: Vec<(Option<usize>, C)> = self.seeds.iter().map(|(k, p)| (Some(*k), *p)).collect();
        seeds.push((None, C::new(0.0, 0.0)));
        seeds.sort_by(|a, b| (a.1 - xi).norm().total_cmp(&(b.1 - xi).norm()));
        let mut best = f64::INFINITY;
        for (k, _) in seeds.into_iter().take(4) {
            let (w0, acc) = match k {
                Some(k) => (self.planner.node(k), self.cache[k].unwrap()),
                None => (self.sd.base_point(), FormTriple::default()),
            };
            let mut walker = Walker::resume(&forms, w0, C::new(1.0, 0.0), acc);
            for _ in 0..60 {
                let r = xi - walker.integrals().psi();
                best = best.min(r.norm());
                if r.norm() <= INVERSE_TOL * 1e-2 {
                    return Ok(walker.z());
                }
                let w = walker.z();
                let b = {
                    let a = self.sd.uz2(w).conj();
                    a * a
                };
                let mut delta = 2.0 * (r + b * r.conj()) / (1.0 - b.norm_sqr());
                let mut moved = false;
                for _ in 0..30 {
                    if segment_inside(&inside, w, w + delta, 1e-3f64.max(delta.norm() / 16.0)) {
                        let mut trial = walker.clone();
                        trial.advance(w + delta)?;
                        if (xi - trial.integrals().psi()).norm() < r.norm() {
                            walker = trial;
                            moved = true;
                            break;
                        }
                    }
                    delta *= 0.5;
                }
                if !moved {
                    break;
                }
            }
            let r = (xi - walker.integrals().psi()).norm();
            if r <= INVERSE_TOL {
                return Ok(walker.z());
            }
        }
        Err(Error::NoConvergence { iterations: 60, residual: best })
    }

    /// Graph value `v(xi)`.
    pub fn v(&self, xi: C) -> Result<f64> {
        self.height(self.psi_inverse(xi)?)
    }

    /// `v_x + i v_y` at `ψ(w)`.
    pub fn gradient_at_source(&self, w: C) -> Result<C> {
        let a = self.sd.uz2(w);
        let g = 2.0 * a.conj() / (1.0 - a.norm_sqr());
        if !(g.re.is_finite() && g.im.is_finite()) {
            return Err(Error::NonFiniteGradient { re: w.re, im: w.im });
        }
        Ok(g)
    }

    /// `v_x + i v_y` at `xi`.
    pub fn gradient(&self, xi: C) -> Result<C> {
        self.gradient_at_source(self.psi_inverse(xi)?)
    }

    /// Minimal surface operator `(1+v_y²)v_xx + (1+v_x²)v_yy − 2v_xv_yv_xy` by differences of the gradient.
    pub fn mse_residual(&self, xi: C, h: f64) -> Result<f64> {
        let g = |d: C| self.gradient(xi + d);
        let (gxp, gxm, gyp, gym) = (g(C::new(h, 0.0))?, g(C::new(-h, 0.0))?, g(C::new(0.0, h))?, g(C::new(0.0, -h))?);
        let c = self.gradient(xi)?;
        let vxx = (gxp.re - gxm.re) / (2.0 * h);
        let vyy = (gyp.im - gym.im) / (2.0 * h);
        let vxy = 0.5 * ((gyp.re - gym.re) + (gxp.im - gxm.im)) / (2.0 * h);
        Ok((1.0 + c.im * c.im) * vxx + (1.0 + c.re * c.re) * vyy - 2.0 * c.re * c.im * vxy)
    }

    /// `ψ(γ(s)) − γ(s)` along boundary component `k`, entering from just outside the hole.
    pub fn boundary_offsets(&self, k: usize) -> Result<Vec<C>> {
        let gamma = self
            .sd
            .boundaries()
            .get(k)
            .ok_or_else(|| Error::InvalidInput(format!("no boundary component {k}")))?;
        let center = gamma.iter().sum::<C>() / gamma.len() as f64;
        let g0 = gamma[0];
        let entry = g0 + (g0 - center) * 0.25;
        let forms = StreamForms::new(&self.sd);
        let acc = self.integrals(entry)?;
        let mut walker = Walker::resume(&forms, entry, C::new(1.0, 0.0), acc);
        walker.advance(g0)?;
        let mut out = Vec::with_capacity(gamma.len());
        out.push(walker.integrals().psi() - g0);
        for &z in &gamma[1..] {
            walker.advance(z)?;
            out.push(walker.integrals().psi() - z);
        }
        Ok(out)
    }
}

/// `dF` coefficients at `xi` and the closedness of `dF` there.
pub fn graph_df(graph: &MinimalGraph, xi: C) -> Result<DfReport> {
    let v = graph.gradient(xi)?;
    let (p, q) = df_coefficients(v.re, v.im);
    let closedness = df_closedness(
        |x, y| {
            let g = graph.gradient(C::new(x, y))?;
            Ok((g.re, g.im))
        },
        xi.re,
        xi.im,
        1e-5,
    )?;
    Ok(DfReport { p, q, closedness })
}

/// Outcome of mapping probes to the graph and back.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct RoundtripReport {
    /// `max |(F∘ψ)(w) − w − w*|` over probes.
    pub deviation: f64,
    /// The best-fit translation `w*`, the mean residual.
    pub translation: C,
    /// Largest `|2u_w|` over probes.
    pub max_modulus: f64,
    /// Largest `||2u_w| − 1|` on the boundary polylines.
    pub boundary_modulus_error: f64,
    /// Set when the data break `|2u_w| < 1` inside or `|2u_w| = 1` on the boundary beyond `1e-6`.
    pub gradient_flag: bool,
    pub probes: usize,
}

/// `u_x − i u_y` by central differences of the stream function, or `2u_w` when none is attached.
fn measured_gradient(sd: &StreamData, w: C) -> C {
    let h = 1e-5;
    match (sd.stream(w + h), sd.stream(w - h), sd.stream(w + C::new(0.0, h)), sd.stream(w - C::new(0.0, h))) {
        (Some(xp), Some(xm), Some(yp), Some(ym)) => C::new((xp - xm) / (2.0 * h), -(yp - ym) / (2.0 * h)),
        _ => sd.uz2(w),
    }
}

/// Integrates `dF` over the `ψ`-image of each probe path; `F∘ψ` is the identity up to a translation.
pub fn roundtrip_check(sd: &StreamData, probes: &[C]) -> Result<RoundtripReport> {
    let max_modulus = probes.iter().map(|&w| sd.uz2(w).norm()).fold(0.0, f64::max);
    let boundary_modulus_error =
        sd.boundaries().iter().flatten().map(|&w| (sd.uz2(w).norm() - 1.0).abs()).fold(0.0, f64::max);
    let graph = vortex_to_minimal(sd, probes)?;
    let inside = |z: C| inside(sd, z);
    let q = QuadratureSettings { abs_tol: 1e-12, rel_tol: 1e-12, ..walker_quadrature() };
    let mut residuals = Vec::with_capacity(probes.len());
    for &w in probes {
        let path = graph.planner.path(&inside, w)?;
        let mut f_total = C::new(0.0, 0.0);
        for seg in path.windows(2) {
            let (a0, d) = (seg[0], seg[1] - seg[0]);
            f_total += integrate_interval(
                |s| {
                    let z = a0 + d * s;
                    let a = sd.uz2(z);
                    let dpsi = 0.5 * (d - a.conj() * a.conj() * d.conj());
                    let v = graph_gradient(a, measured_gradient(sd, z));
                    let (p, qq) = df_coefficients(v.re, v.im);
                    Ok(p * dpsi.re + qq * dpsi.im)
                },
                0.0,
                1.0,
                &q,
            )?;
        }
        residuals.push(f_total - (w - sd.base_point()));
    }
    let n = residuals.len().max(1) as f64;
    let translation = residuals.iter().sum::<C>() / n;
    let deviation = residuals.iter().map(|r| (r - translation).norm()).fold(0.0, f64::max);
    Ok(RoundtripReport {
        deviation,
        translation,
        max_modulus,
        boundary_modulus_error,
        gradient_flag: max_modulus >= 1.0 || boundary_modulus_error > 1e-6,
        probes: probes.len(),
    })
}
