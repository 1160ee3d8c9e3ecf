//! Vortex domain `(Ω, u)` of a minimal surface over the unit disk: `Ω = φ(Σ)`, `u = x3`.

use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::contour::contour_cells;
use super::data::WeierstrassData;
use super::forms::{FormTriple, Forms, Walker};
use super::lattice::{reduce_lattice, residual_mod};
use crate::error::{Error, Result};
use crate::io::{Curve, CurveKind, DomainArtifact, StreamSample, VelocitySample};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainSettings {
    /// Rays of the polar grid.
    pub n_theta: usize,
    /// Nodes per ray, the boundary node included.
    pub n_r: usize,
    /// Nodes closer than this to a puncture are discarded.
    pub guard: f64,
    /// Chords used to trace the boundary circle.
    pub boundary_samples: usize,
    /// Number of streamline levels.
    pub levels: usize,
    /// Interior points used for the mean-value test.
    pub harmonic_probes: usize,
    /// Radius of the mean-value circles in the vortex plane.
    pub harmonic_radius: f64,
}

impl Default for DomainSettings {
    fn default() -> Self {
        DomainSettings {
            n_theta: 400,
            n_r: 400,
            guard: 1e-3,
            boundary_samples: 1024,
            levels: 15,
            harmonic_probes: 12,
            harmonic_radius: 1e-2,
        }
    }
}

impl DomainSettings {
    /// Square `n × n` grid, other settings at their defaults.
    pub fn with_grid(n: usize) -> Self {
        DomainSettings { n_theta: n, n_r: n, ..Default::default() }
    }
}

/// Measured properties of a vortex domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainReport {
    /// Reduced basis of the translation lattice.
    pub lattice: Vec<C>,
    /// Vortex-plane increments of the closed loops that generate the lattice.
    pub raw_periods: Vec<C>,
    /// Largest change of `u` along those loops (zero for a single-valued stream function).
    pub height_period_max: f64,
    pub sheets: usize,
    /// Boundary components per fundamental cell of the lattice.
    pub boundary_components: usize,
    pub boundary_values: Vec<f64>,
    /// Largest deviation of `u` from its mean along a boundary component.
    pub boundary_level_spread: f64,
    /// Endpoint gap of the boundary lifts modulo the lattice, relative to their length.
    pub closure_gap: f64,
    /// Largest `||v| − 1|` on boundary samples, from `2u_w = −1/g`.
    pub speed_residual: f64,
    /// Same quantity from one-sided finite differences of `u` and `φ` normal to the boundary.
    pub speed_fd_residual: f64,
    /// Largest mean-value residual of `u` on small vortex-plane circles.
    pub harmonic_residual: f64,
    pub streamlines: usize,
    pub invalid_nodes: usize,
}

/// Artifact for output together with the typed report.
#[derive(Debug, Clone)]
pub struct DomainImage {
    pub artifact: DomainArtifact,
    pub report: DomainReport,
}

#[derive(Debug, Clone, Copy)]
struct Node {
    integrals: FormTriple,
    root: C,
    valid: bool,
}

fn unit(theta: f64) -> C {
    C::from_polar(1.0, theta)
}

fn wrap_angle(a: f64) -> f64 {
    let mut a = a % (2.0 * PI);
    if a > PI {
        a -= 2.0 * PI;
    } else if a <= -PI {
        a += 2.0 * PI;
    }
    a
}

/// Chord vertices along the unit circle from angle `a` to `b` (shorter way), `a` excluded.
fn arc(a: f64, b: f64) -> Vec<C> {
    let d = wrap_angle(b - a);
    let n = ((d.abs() / 0.02).ceil() as usize).max(1);
    (1..=n).map(|k| unit(a + d * k as f64 / n as f64)).collect()
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

struct Loops<'a> {
    forms: &'a dyn Forms,
    theta0: f64,
    obstacles: Vec<C>,
}

impl Loops<'_> {
    fn radius(&self, target: C) -> f64 {
        let near = self
            .obstacles
            .iter()
            .filter(|o| (*o - target).norm() > 1e-9)
            .map(|o| (o - target).norm())
            .fold(1.0 - target.norm(), f64::min);
        (0.3 * near).min(0.1)
    }

    /// Closed path from the base point around `target` (counterclockwise), returning to the base point.
    fn around(&self, target: C) -> Result<Vec<C>> {
        let rho = self.radius(target);
        let base = if target.norm() < 1e-12 { self.theta0 } else { target.arg() };
        let mut chosen = None;
        for k in 0..41 {
            let delta = 0.03 * ((k + 1) / 2) as f64 * if k % 2 == 0 { 1.0 } else { -1.0 };
            let alpha = base + delta;
            let entry = target + rho * unit(alpha);
            let clear = self
                .obstacles
                .iter()
                .filter(|o| (*o - target).norm() > 1e-9)
                .all(|o| distance_to_segment(*o, unit(alpha), entry) > 0.5 * rho);
            if clear {
                chosen = Some((alpha, entry));
                break;
            }
        }
        let (alpha, entry) = chosen.ok_or_else(|| Error::branch_at(target))?;
        let mut out = arc(self.theta0, alpha);
        out.push(entry);
        let m = 64;
        out.extend((1..=m).map(|k| target + rho * unit(alpha + 2.0 * PI * k as f64 / m as f64)));
        out.push(unit(alpha));
        out.extend(arc(alpha, self.theta0));
        Ok(out)
    }

    fn walk(&self, path: &[C]) -> Result<(FormTriple, C)> {
        let mut w = Walker::new(self.forms, unit(self.theta0), None)?;
        w.follow(path)?;
        Ok((w.integrals(), w.root()))
    }
}

fn segment_distance_to_polyline(p: C, poly: &[C], shift: C) -> f64 {
    poly.windows(2)
        .map(|s| distance_to_segment(p, s[0] + shift, s[1] + shift))
        .fold(f64::INFINITY, f64::min)
}

fn lattice_shifts(lattice: &[C], range: i32) -> Vec<C> {
    let mut out = vec![C::new(0.0, 0.0)];
    match lattice.len() {
        0 => {}
        1 => {
            for m in -range..=range {
                if m != 0 {
                    out.push(lattice[0] * m as f64);
                }
            }
        }
        _ => {
            for m in -range..=range {
                for n in -range..=range {
                    if m != 0 || n != 0 {
                        out.push(lattice[0] * m as f64 + lattice[1] * n as f64);
                    }
                }
            }
        }
    }
    out
}

/// Whether `b` lies on some lattice translate of the curve `a`.
fn same_component(a: &[C], b: &[C], lattice: &[C], tol: f64) -> bool {
    let shifts = lattice_shifts(lattice, 3);
    let step = (b.len() / 64).max(1);
    b.iter().step_by(step).all(|p| shifts.iter().any(|s| segment_distance_to_polyline(*p, a, *s) <= tol))
}

/// One-sided fifth-order derivative at 0 from samples at `0, h, …, 4h`.
fn one_sided_derivative<T>(f: [T; 5], h: f64) -> T
where
    T: Copy + std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T>,
{
    (f[0] * -25.0 + f[1] * 48.0 + f[2] * -36.0 + f[3] * 16.0 + f[4] * -3.0) * (1.0 / (12.0 * h))
}

/// Computes the vortex domain of minimal-surface data over the unit disk.
///
/// The disk (or its double cover) is sampled on a polar grid; `u = x3` is contoured with marching squares
/// and the level sets are mapped to the vortex plane by continuing the integrals along them.
pub fn domain_image(data: &WeierstrassData, source: &str, settings: &DomainSettings) -> Result<DomainImage> {
    let nt = settings.n_theta;
    let nr = settings.n_r;
    if nt < 8 || nr < 8 || settings.boundary_samples < 16 {
        return Err(Error::InvalidInput("grid too small".into()));
    }
    if !(settings.guard > 0.0) || !(settings.harmonic_radius > 0.0) {
        return Err(Error::InvalidInput("guard and harmonic radius must be positive".into()));
    }
    let forms: &dyn Forms = data;
    let theta0 = 2.0 * PI * 0.137 / nt as f64;
    let z0 = unit(theta0);
    let obstacles: Vec<C> = forms.singularities().into_iter().map(|(s, _)| s).filter(|s| s.norm() < 1.0).collect();
    if forms.singularities().iter().any(|(s, _)| (s.norm() - 1.0).abs() < 1e-9) {
        return Err(Error::InvalidInput("singular point on the unit circle".into()));
    }
    let punctures: Vec<C> = data.punctures().iter().copied().filter(|p| p.norm() < 1.0).collect();
    let branch: Vec<C> = data.branch_points().into_iter().filter(|b| b.norm() < 1.0).collect();
    let sheets = if forms.is_multivalued() { 2 } else { 1 };
    let loops = Loops { forms, theta0, obstacles: obstacles.clone() };

    // Boundary circle on the principal sheet.
    let m = settings.boundary_samples;
    let mut w = Walker::new(forms, z0, None)?;
    let root0 = w.root();
    let mut boundary: Vec<(C, FormTriple, C)> = vec![(z0, FormTriple::default(), root0)];
    for k in 1..=m {
        let z = unit(theta0 + 2.0 * PI * k as f64 / m as f64);
        w.advance(z)?;
        boundary.push((z, w.integrals(), w.root()));
    }
    let boundary_loop = w.integrals();
    let boundary_flips = (w.root() + root0).norm() < (w.root() - root0).norm();

    // Sheet exchange constant: I₋ = K − I₊.
    let mut sheet_constant = FormTriple::default();
    let mut raw: Vec<FormTriple> = vec![boundary_loop];
    if sheets == 2 {
        if let Some(&b0) = branch.first() {
            let (k0, r) = loops.walk(&loops.around(b0)?)?;
            if (r + root0).norm() > (r - root0).norm() {
                return Err(Error::InvalidInput(format!("no monodromy around branch point {b0}")));
            }
            sheet_constant = k0;
            for &b in &branch[1..] {
                let (kb, _) = loops.walk(&loops.around(b)?)?;
                raw.push(k0 - kb);
            }
        }
    }
    for &p in &punctures {
        let (kp, _) = loops.walk(&loops.around(p)?)?;
        raw.push(kp);
    }
    let raw_periods: Vec<C> = raw.iter().map(|t| t.phi()).collect();
    let height_period_max = raw.iter().map(|t| t.x3().abs()).fold(0.0, f64::max);
    let scale = raw_periods.iter().map(|p| p.norm()).fold(1.0, f64::max);
    let lattice = reduce_lattice(&raw_periods, 1e-7 * scale);

    // Boundary lifts and their levels.
    let lift_plus: Vec<C> = boundary.iter().map(|(_, t, _)| t.phi()).collect();
    let u_plus: Vec<f64> = boundary.iter().map(|(_, t, _)| t.x3()).collect();
    let mut lifts = vec![(lift_plus.clone(), u_plus.clone())];
    if sheets == 2 && !boundary_flips {
        let kphi = sheet_constant.phi();
        let kx3 = sheet_constant.x3();
        lifts.push((lift_plus.iter().map(|p| kphi - p).collect(), u_plus.iter().map(|u| kx3 - u).collect()));
    }
    let mut boundary_level_spread: f64 = 0.0;
    let mut closure_gap: f64 = 0.0;
    for (pts, us) in &lifts {
        let mean = us.iter().sum::<f64>() / us.len() as f64;
        boundary_level_spread = boundary_level_spread.max(us.iter().map(|u| (u - mean).abs()).fold(0.0, f64::max));
        let len: f64 = pts.windows(2).map(|s| (s[1] - s[0]).norm()).sum();
        let gap = residual_mod(&lattice, pts[pts.len() - 1] - pts[0]).norm();
        closure_gap = closure_gap.max(gap / len.max(f64::MIN_POSITIVE));
    }
    let extent = lifts
        .iter()
        .flat_map(|(p, _)| p.iter())
        .fold((f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY), |b, p| {
            (b.0.min(p.re), b.1.max(p.re), b.2.min(p.im), b.3.max(p.im))
        });
    let diameter = ((extent.1 - extent.0).powi(2) + (extent.3 - extent.2).powi(2)).sqrt();
    let mut distinct: Vec<usize> = Vec::new();
    for i in 0..lifts.len() {
        let dup = distinct.iter().any(|&j| {
            (mean_of(&lifts[i].1) - mean_of(&lifts[j].1)).abs() < 1e-6 * (1.0 + diameter)
                && same_component(&lifts[j].0, &lifts[i].0, &lattice, 1e-3 * diameter.max(1e-12))
        });
        if !dup {
            distinct.push(i);
        }
    }

    // Speed on the boundary: the formula, and finite differences along the inward normal.
    let stride = (m / 256).max(1);
    let mut velocity_samples = Vec::new();
    let mut speed_residual: f64 = 0.0;
    for (z, t, _) in boundary.iter().step_by(stride) {
        let uw2 = -1.0 / forms.gauss(*z);
        let v = -C::i() * uw2.conj();
        speed_residual = speed_residual.max((v.norm() - 1.0).abs());
        velocity_samples.push(VelocitySample { point: t.phi(), velocity: v });
    }
    let h = 1e-3;
    let mut speed_fd_residual: f64 = 0.0;
    for (z, t, root) in boundary.iter().take(m).step_by((m / 32).max(1)) {
        let mut wk = Walker::resume(forms, *z, *root, *t);
        let mut u = [0.0; 5];
        let mut p = [C::new(0.0, 0.0); 5];
        u[0] = t.x3();
        p[0] = t.phi();
        for k in 1..5 {
            wk.advance(*z * (1.0 - h * k as f64))?;
            u[k] = wk.integrals().x3();
            p[k] = wk.integrals().phi();
        }
        let du = one_sided_derivative(u, h);
        let dw = one_sided_derivative(p, h);
        speed_fd_residual = speed_fd_residual.max((du.abs() / dw.norm() - 1.0).abs());
    }

    // Polar grid: ring on the boundary, then rays inward.
    let log_radial = punctures.iter().any(|p| p.norm() < 1e-9);
    let r_min = if log_radial { settings.guard } else { 0.5 / nr as f64 };
    let radii: Vec<f64> = (0..nr)
        .map(|k| {
            let s = k as f64 / (nr - 1) as f64;
            if log_radial {
                (r_min.ln() * s).exp()
            } else {
                1.0 - s * (1.0 - r_min)
            }
        })
        .collect();
    let angles: Vec<f64> = (0..nt).map(|j| theta0 + 2.0 * PI * j as f64 / nt as f64).collect();
    let mut ring: Vec<(FormTriple, C)> = vec![(FormTriple::default(), root0)];
    let mut wr = Walker::new(forms, z0, None)?;
    for &a in &angles[1..] {
        wr.advance(unit(a))?;
        ring.push((wr.integrals(), wr.root()));
    }
    let guard = settings.guard;
    let rays: Vec<Vec<Node>> = crate::parallel::install(|| {
        (0..nt)
            .into_par_iter()
            .map(|j| {
                let dir = unit(angles[j]);
                let (i0, r0) = ring[j];
                let mut out = Vec::with_capacity(nr);
                out.push(Node { integrals: i0, root: r0, valid: true });
                let mut w = Walker::resume(forms, dir, r0, i0);
                let mut ok = true;
                for &r in &radii[1..] {
                    let z = dir * r;
                    if ok && w.advance(z).is_err() {
                        ok = false;
                    }
                    let valid = ok && punctures.iter().all(|p| (p - z).norm() >= guard);
                    out.push(Node { integrals: w.integrals(), root: w.root(), valid });
                }
                out
            })
            .collect()
    });
    let n = nt * nr;
    let zpos = |idx: usize| -> C {
        let i = idx % n;
        unit(angles[i % nt]) * radii[i / nt]
    };
    let mut nodes: Vec<Node> = Vec::with_capacity(sheets * n);
    for k in 0..nr {
        for ray in &rays {
            nodes.push(ray[k]);
        }
    }
    if sheets == 2 {
        for i in 0..n {
            let nd = nodes[i];
            nodes.push(Node { integrals: sheet_constant - nd.integrals, root: -nd.root, valid: nd.valid });
        }
    }
    let invalid_nodes = nodes.iter().filter(|n| !n.valid).count();
    let values: Vec<f64> = nodes.iter().map(|n| if n.valid { n.integrals.x3() } else { f64::NAN }).collect();
    let mut cells = Vec::with_capacity(sheets * n);
    for s in 0..sheets {
        for k in 0..nr - 1 {
            for j in 0..nt {
                let j1 = (j + 1) % nt;
                let base = [k * nt + j, k * nt + j1, (k + 1) * nt + j1, (k + 1) * nt + j];
                let reference = nodes[s * n + base[0]].root;
                cells.push(base.map(|b| {
                    let r = nodes[s * n + b].root;
                    if sheets == 2 && (r + reference).norm() < (r - reference).norm() {
                        (1 - s) * n + b
                    } else {
                        s * n + b
                    }
                }));
            }
        }
    }

    // Streamline levels between robust extremes of u.
    let mut finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite()).collect();
    finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (lo, hi) = (finite[finite.len() / 50], finite[finite.len() - 1 - finite.len() / 50]);
    let levels: Vec<f64> =
        (0..settings.levels).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / settings.levels as f64).collect();
    let traced: Vec<(f64, Vec<super::contour::LevelCurve>)> = crate::parallel::install(|| {
        levels.par_iter().map(|&lv| (lv, contour_cells(&values, &cells, lv))).collect()
    });
    let mapped: Vec<(f64, Vec<C>)> = crate::parallel::install(|| {
        traced
            .par_iter()
            .flat_map_iter(|(lv, curves)| curves.iter().map(move |c| (*lv, c)))
            .flat_map_iter(|(lv, c)| map_level_curve(forms, &nodes, &zpos, c).into_iter().map(move |p| (lv, p)))
            .collect()
    });

    let harmonic_residual = harmonic_check(forms, &nodes, &zpos, &radii, &angles, &obstacles, settings)?;

    let mut artifact = DomainArtifact::new(source);
    let mut id = 0;
    for &i in &distinct {
        let (pts, us) = &lifts[i];
        artifact.curves.push(Curve { component_id: id, kind: CurveKind::Boundary, level: mean_of(us), points: pts.clone() });
        artifact.boundary_values.push(mean_of(us));
        id += 1;
    }
    let streamlines = mapped.len();
    for (lv, pts) in mapped {
        artifact.curves.push(Curve { component_id: id, kind: CurveKind::Streamline, level: lv, points: pts });
        id += 1;
    }
    artifact.periods = lattice.clone();
    artifact.velocity_samples = velocity_samples;
    let step = ((sheets * n) / 4000).max(1);
    artifact.stream_samples = nodes
        .iter()
        .step_by(step)
        .filter(|n| n.valid)
        .map(|n| StreamSample { point: n.integrals.phi(), u: n.integrals.x3() })
        .collect();
    let report = DomainReport {
        lattice,
        raw_periods,
        height_period_max,
        sheets,
        boundary_components: distinct.len(),
        boundary_values: artifact.boundary_values.clone(),
        boundary_level_spread,
        closure_gap,
        speed_residual,
        speed_fd_residual,
        harmonic_residual,
        streamlines,
        invalid_nodes,
    };
    artifact.record("domain", &report);
    Ok(DomainImage { artifact, report })
}

fn mean_of(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len().max(1) as f64
}

fn map_level_curve(
    forms: &dyn Forms,
    nodes: &[Node],
    zpos: &(dyn Fn(usize) -> C + Sync),
    curve: &super::contour::LevelCurve,
) -> Vec<Vec<C>> {
    let mut out = Vec::new();
    let mut current: Vec<C> = Vec::new();
    let mut walker: Option<Walker<'_>> = None;
    for c in &curve.crossings {
        let z = zpos(c.a) + (zpos(c.b) - zpos(c.a)) * c.t;
        if walker.is_none() {
            let nd = nodes[c.a];
            walker = Some(Walker::resume(forms, zpos(c.a), nd.root, nd.integrals));
        }
        let w = walker.as_mut().expect("walker initialised");
        match w.advance(z) {
            Ok(()) => current.push(w.integrals().phi()),
            Err(_) => {
                if current.len() >= 2 {
                    out.push(std::mem::take(&mut current));
                }
                current.clear();
                walker = None;
            }
        }
    }
    if current.len() >= 2 {
        out.push(current);
    }
    out
}

/// Mean-value residual of `u` over circles of radius `ρ` in the vortex plane, centered at interior nodes.
fn harmonic_check(
    forms: &dyn Forms,
    nodes: &[Node],
    zpos: &(dyn Fn(usize) -> C + Sync),
    radii: &[f64],
    angles: &[f64],
    obstacles: &[C],
    settings: &DomainSettings,
) -> Result<f64> {
    let nt = angles.len();
    let candidates: Vec<usize> = (0..radii.len() * nt)
        .filter(|&i| {
            let r = radii[i / nt];
            let z = zpos(i);
            (0.3..=0.85).contains(&r) && nodes[i].valid && obstacles.iter().all(|o| (o - z).norm() > 0.15)
        })
        .collect();
    if candidates.is_empty() || settings.harmonic_probes == 0 {
        return Ok(0.0);
    }
    let stride = (candidates.len() / settings.harmonic_probes).max(1);
    let rho = settings.harmonic_radius;
    let probes: Vec<usize> = candidates.into_iter().step_by(stride).take(settings.harmonic_probes).collect();
    let residuals: Vec<Result<f64>> = crate::parallel::install(|| {
        probes
            .par_iter()
            .map(|&i| {
                let nd = nodes[i];
                let zc = zpos(i);
                let center = Walker::resume(forms, zc, nd.root, nd.integrals);
                let wc = nd.integrals.phi();
                let dphi_c = -center.integrands_here().g_omega;
                let m = 32;
                let mut sum = 0.0;
                for k in 0..m {
                    let target = wc + rho * unit(2.0 * PI * k as f64 / m as f64);
                    let mut z = zc + (target - wc) / dphi_c;
                    let mut converged = None;
                    for _ in 0..30 {
                        let mut w = center.clone();
                        w.advance(z)?;
                        let err = w.integrals().phi() - target;
                        if err.norm() < 1e-14 * (1.0 + target.norm()) {
                            converged = Some(w.integrals().x3());
                            break;
                        }
                        z -= err / -w.integrands_here().g_omega;
                    }
                    sum += converged.ok_or(Error::NoConvergence { iterations: 30, residual: f64::NAN })?;
                }
                Ok((sum / m as f64 - nd.integrals.x3()).abs())
            })
            .collect()
    });
    let mut worst: f64 = 0.0;
    for r in residuals {
        worst = worst.max(r?);
    }
    Ok(worst)
}
