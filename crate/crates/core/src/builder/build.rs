use std::f64::consts::PI;

use num_complex::Complex64 as C;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::trace::{t_max, trace_boundary, BoundaryTrace, DEFAULT_TRACE_SAMPLES};
use super::{omega0_raw, period_integral, residues_g_omega, BuilderInput};
use crate::configurations::{periodic_forces, Case};
use crate::error::{Error, Result};
use crate::io::{Curve, CurveKind, DomainArtifact, StreamSample, VelocitySample};
use crate::weierstrass::{contour_cells, grid_cells};

/// Builds reject `t` above this fraction of the measured threshold.
pub const T_MAX_FRACTION: f64 = 0.8;

/// Radii at which the velocity limits are read off; the truncation error is `O(NEAR)`.
const FAR: f64 = 1e9;
const NEAR: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BuildSettings {
    /// Angles per boundary component.
    pub samples: usize,
    /// Nodes per side of the stream-function grid.
    pub grid: usize,
    /// Number of streamline levels.
    pub levels: usize,
    /// Whether to measure `t_max` and enforce `t ≤ 0.8 t_max`.
    pub check_threshold: bool,
}

impl Default for BuildSettings {
    fn default() -> Self {
        BuildSettings { samples: DEFAULT_TRACE_SAMPLES, grid: 256, levels: 15, check_threshold: true }
    }
}

/// Failure of the period problem on one boundary component when `ω0` stands in for the exact form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClosureDefect {
    /// `∮_γ g_t t ω0`; zero because `g_t t ω0 = −i dz/z`.
    pub direct_period: C,
    /// `conj ∮_γ g_t⁻¹ t ω0`, equal to `2π t² conj(F_i)` by residues.
    pub symmetric_period: C,
    /// `max u − min u` along `γ`.
    pub boundary_oscillation: f64,
    /// `π` times the oscillation: `≈ 2π t² |F_i|` for unbalanced input, higher order in `t` when balanced.
    pub magnitude: f64,
}

/// Residuals of the two circulation identities and the resulting classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropAbReport {
    /// `|ΣC − T(conj v⁺ − conj v⁻)|`.
    pub cauchy1: f64,
    /// `|T(conj v⁺² − conj v⁻²)|`.
    pub cauchy2: f64,
    /// `|v⁺ − v⁻| + |ΣC|`.
    pub case_a_residual: f64,
    /// `|v⁺ + v⁻| + |v⁺ − ΣC/(2T)|`.
    pub case_b_residual: f64,
    pub case: Case,
}

/// Classifies the flow from measured circulations and velocity limits, with period `period`.
pub fn prop_ab_check(circulations: &[f64], v_plus: C, v_minus: C, period: f64, tol: f64) -> Result<PropAbReport> {
    let total: f64 = circulations.iter().sum();
    let cauchy1 = (C::new(total, 0.0) - period * (v_plus.conj() - v_minus.conj())).norm();
    let cauchy2 = (period * (v_plus.conj() * v_plus.conj() - v_minus.conj() * v_minus.conj())).norm();
    let case_a_residual = (v_plus - v_minus).norm() + total.abs();
    let case_b_residual = (v_plus + v_minus).norm() + (v_plus - total / (2.0 * period)).norm();
    let case = if case_a_residual <= tol && case_a_residual <= case_b_residual {
        Case::A
    } else if case_b_residual <= tol {
        Case::B
    } else {
        return Err(Error::Unclassifiable { case_a: case_a_residual, case_b: case_b_residual });
    };
    Ok(PropAbReport { cauchy1, cauchy2, case_a_residual, case_b_residual, case })
}

/// The approximate domain `Ω_t` with its stream function and measured quantities.
#[derive(Debug, Clone)]
pub struct BuiltDomain {
    pub input: BuilderInput,
    pub t_max: Option<f64>,
    /// Base point on the unit circle where `u = 0`.
    pub base_point: C,
    pub traces: Vec<BoundaryTrace>,
    /// Boundary images `φ_t(γ_i)` in the vortex plane (closed polylines).
    pub images: Vec<Vec<C>>,
    pub boundary_values: Vec<f64>,
    /// `i ∮_γ t ω0`; the imaginary parts are quadrature residue.
    pub circulations: Vec<C>,
    pub defects: Vec<ClosureDefect>,
    pub period_integrals: Vec<C>,
    pub velocity_plus: C,
    pub velocity_minus: C,
    pub residues: (C, C),
    /// Vortex-plane window `[x0, x0 + 2π) × [y0, y1]` of the grid.
    pub window: [f64; 3],
    pub grid_x: Vec<f64>,
    pub grid_y: Vec<f64>,
    /// Row-major `u` values (`NaN` outside the domain).
    pub grid_u: Vec<f64>,
    pub streamlines: Vec<(f64, Vec<C>)>,
}

impl BuiltDomain {
    pub fn period(&self) -> f64 {
        2.0 * PI
    }

    /// `u_t` at the vortex-plane point `w`, from the closed-form primitive of `t ω0`.
    pub fn stream_value(&self, w: C) -> f64 {
        stream_raw(&self.input, w) - stream_raw(&self.input, C::i() * self.base_point.ln())
    }

    /// `2u_w` at `w`.
    pub fn uz2(&self, w: C) -> C {
        -C::i() * self.input.t() * self.input.f_raw((-C::i() * w).exp())
    }

    /// Whether `w` lies in `Ω_t`.
    pub fn contains(&self, w: C) -> bool {
        (self.input.t() * self.input.f_raw((-C::i() * w).exp())).norm() < 1.0
    }

    pub fn circulation_values(&self) -> Vec<f64> {
        self.circulations.iter().map(|c| c.re).collect()
    }

    pub fn classify(&self, tol: f64) -> Result<PropAbReport> {
        prop_ab_check(&self.circulation_values(), self.velocity_plus, self.velocity_minus, self.period(), tol)
    }

    pub fn to_artifact(&self, source: &str) -> DomainArtifact {
        let mut a = DomainArtifact::new(source);
        let mut id = 0;
        for (img, level) in self.images.iter().zip(&self.boundary_values) {
            a.curves.push(Curve { component_id: id, kind: CurveKind::Boundary, level: *level, points: img.clone() });
            id += 1;
        }
        for (level, pts) in &self.streamlines {
            a.curves.push(Curve { component_id: id, kind: CurveKind::Streamline, level: *level, points: pts.clone() });
            id += 1;
        }
        a.periods = vec![C::new(self.period(), 0.0)];
        a.circulations = self.circulation_values();
        a.boundary_values = self.boundary_values.clone();
        a.velocity_plus = Some(self.velocity_plus);
        a.velocity_minus = Some(self.velocity_minus);
        for (tr, img) in self.traces.iter().zip(&self.images) {
            let step = (tr.len() / 128).max(1);
            for (k, z) in tr.points().into_iter().enumerate().step_by(step) {
                a.velocity_samples.push(VelocitySample { point: img[k], velocity: self.input.velocity(z) });
            }
        }
        let nx = self.grid_x.len();
        let step = (self.grid_u.len() / 4000).max(1);
        for (k, u) in self.grid_u.iter().enumerate().step_by(step) {
            if u.is_finite() {
                a.stream_samples.push(StreamSample { point: C::new(self.grid_x[k % nx], self.grid_y[k / nx]), u: *u });
            }
        }
        a.record("t", self.input.t());
        a.record("t_max", self.t_max);
        a.record("residues", self.residues);
        a.record("circulation_imag", self.circulations.iter().map(|c| c.im).collect::<Vec<_>>());
        a.record("defects", &self.defects);
        a.record("period_integrals", &self.period_integrals);
        a.record("forces", periodic_forces(self.input.config()));
        a.record("case", self.input.config().case());
        if let Ok(r) = self.classify(1e-6) {
            a.record("classification", r);
        }
        a
    }
}

fn stream_raw(input: &BuilderInput, w: C) -> f64 {
    let cfg = input.config();
    let z = (-C::i() * w).exp();
    let s: f64 = cfg.weights().iter().zip(cfg.points()).map(|(c, p)| c * (z - p).norm().ln()).sum();
    input.t() * (cfg.c0().re * w.im + cfg.c0().im * w.re + s)
}

/// Closure defect of the traced component `trace`.
pub fn closure_defect(input: &BuilderInput, trace: &BoundaryTrace, base_point: C) -> ClosureDefect {
    let t = input.t();
    let cfg = input.config();
    let direct_period = trace.integrate(|z| input.gauss(z) * t * omega0_raw(cfg, z));
    let symmetric_period = trace.integrate(|z| t * omega0_raw(cfg, z) / input.gauss(z)).conj();
    let base = stream_raw(input, C::i() * base_point.ln());
    let us: Vec<f64> = trace.points().iter().map(|z| stream_raw(input, C::i() * z.ln()) - base).collect();
    let max = us.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = us.iter().copied().fold(f64::INFINITY, f64::min);
    ClosureDefect { direct_period, symmetric_period, boundary_oscillation: max - min, magnitude: PI * (max - min) }
}

fn choose_base_point(input: &BuilderInput) -> C {
    let mut best = (f64::NEG_INFINITY, C::new(1.0, 0.0));
    for k in 0..32 {
        let z = C::from_polar(1.0, 2.0 * PI * k as f64 / 32.0);
        let clearance = input.config().points().iter().map(|p| (p - z).norm()).fold(f64::INFINITY, f64::min);
        let inside = (input.t() * input.f_raw(z)).norm() < 0.5;
        if k == 0 && inside && clearance > 0.25 {
            return z;
        }
        if inside && clearance > best.0 {
            best = (clearance, z);
        }
    }
    best.1
}

/// Unwrapped `i log z` along a closed curve, shifted so its mean real part lies in `[x0, x0 + 2π)`.
fn image_curve(points: &[C], x0: f64) -> Vec<C> {
    let mut out: Vec<C> = Vec::with_capacity(points.len() + 1);
    let mut shift = 0.0;
    for z in points {
        let mut w = C::i() * z.ln();
        w.re += shift;
        if let Some(prev) = out.last() {
            let jump = ((prev.re - w.re) / (2.0 * PI)).round();
            shift += 2.0 * PI * jump;
            w.re += 2.0 * PI * jump;
        }
        out.push(w);
    }
    let mean = out.iter().map(|w| w.re).sum::<f64>() / out.len() as f64;
    let k = ((mean - x0) / (2.0 * PI)).floor();
    for w in &mut out {
        w.re -= 2.0 * PI * k;
    }
    out.push(out[0]);
    out
}

/// Traces the boundary components, measures the construction identities and samples `u_t` on a grid.
pub fn build_domain(input: &BuilderInput, settings: &BuildSettings) -> Result<BuiltDomain> {
    let n = input.config().len();
    let t_max = if settings.check_threshold {
        let tm = t_max(input)?;
        if input.t() > T_MAX_FRACTION * tm {
            return Err(Error::ComponentsMerged(format!(
                "t = {} exceeds {T_MAX_FRACTION}·t_max with measured t_max = {tm:.6}",
                input.t()
            )));
        }
        Some(tm)
    } else {
        None
    };
    let traces: Vec<BoundaryTrace> = crate::parallel::install(|| {
        (0..n).into_par_iter().map(|i| trace_boundary(input, i, settings.samples)).collect::<Result<Vec<_>>>()
    })?;
    let base_point = choose_base_point(input);
    let q = input.config().q_points();
    let x_mean = q.iter().map(|q| q.re).sum::<f64>() / n as f64;
    let x0 = x_mean - PI;
    let y0 = q.iter().map(|q| q.im).fold(f64::INFINITY, f64::min) - 2.5;
    let y1 = q.iter().map(|q| q.im).fold(f64::NEG_INFINITY, f64::max) + 2.5;
    let images: Vec<Vec<C>> = traces.iter().map(|tr| image_curve(&tr.points(), x0)).collect();
    let t = input.t();
    let cfg = input.config();
    let circulations: Vec<C> = traces.iter().map(|tr| C::i() * t * tr.integrate(|z| omega0_raw(cfg, z))).collect();
    let defects: Vec<ClosureDefect> = traces.iter().map(|tr| closure_defect(input, tr, base_point)).collect();
    let period_integrals = (0..n).map(|i| period_integral(input, i)).collect::<Result<Vec<_>>>()?;
    let residues = residues_g_omega(input)?;
    let velocity_plus = input.velocity(C::new(FAR, 0.0));
    let velocity_minus = input.velocity(C::new(NEAR, 0.0));

    let mut built = BuiltDomain {
        input: input.clone(),
        t_max,
        base_point,
        traces,
        images,
        boundary_values: Vec::new(),
        circulations,
        defects,
        period_integrals,
        velocity_plus,
        velocity_minus,
        residues,
        window: [x0, y0, y1],
        grid_x: Vec::new(),
        grid_y: Vec::new(),
        grid_u: Vec::new(),
        streamlines: Vec::new(),
    };
    built.boundary_values = built
        .images
        .iter()
        .map(|img| img[..img.len() - 1].iter().map(|w| built.stream_value(*w)).sum::<f64>() / (img.len() - 1) as f64)
        .collect();

    let m = settings.grid.max(8);
    built.grid_x = (0..m).map(|i| x0 + 2.0 * PI * i as f64 / m as f64).collect();
    built.grid_y = (0..m).map(|j| y0 + (y1 - y0) * j as f64 / (m - 1) as f64).collect();
    let b = &built;
    let grid_u: Vec<f64> = crate::parallel::install(|| {
        (0..m * m)
            .into_par_iter()
            .map(|k| {
                let w = C::new(b.grid_x[k % m], b.grid_y[k / m]);
                if b.contains(w) {
                    b.stream_value(w)
                } else {
                    f64::NAN
                }
            })
            .collect()
    });
    built.grid_u = grid_u;
    let periodic_u = cfg.c0().im.abs() < 1e-14;
    let cells = grid_cells(m, m, periodic_u);
    let mut finite: Vec<f64> = built.grid_u.iter().copied().filter(|u| u.is_finite()).collect();
    finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if !finite.is_empty() {
        let lo = finite[finite.len() / 50];
        let hi = finite[finite.len() - 1 - finite.len() / 50];
        let node = |k: usize| C::new(built.grid_x[k % m], built.grid_y[k / m]);
        for l in 0..settings.levels {
            let level = lo + (hi - lo) * (l as f64 + 0.5) / settings.levels as f64;
            for curve in contour_cells(&built.grid_u, &cells, level) {
                let mut pts: Vec<C> = curve
                    .crossings
                    .iter()
                    .map(|c| {
                        let (a, mut bpos) = (node(c.a), node(c.b));
                        if bpos.re - a.re > PI {
                            bpos.re -= 2.0 * PI;
                        } else if a.re - bpos.re > PI {
                            bpos.re += 2.0 * PI;
                        }
                        a + (bpos - a) * c.t
                    })
                    .collect();
                // Keep consecutive points on the same sheet so curves crossing the seam stay continuous.
                for k in 1..pts.len() {
                    pts[k].re -= 2.0 * PI * ((pts[k].re - pts[k - 1].re) / (2.0 * PI)).round();
                }
                if pts.len() >= 2 {
                    built.streamlines.push((level, pts));
                }
            }
        }
    }
    Ok(built)
}
