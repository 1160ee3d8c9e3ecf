//! Invariant suites run by `hvlab check` and the acceptance tests.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64 as C;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use serde::Serialize;

use crate::builder::{prop_ab_check, BuilderSurface, BuiltDomain};
use crate::configurations::{
    finite_identities, periodic_identity, Case, FiniteConfiguration, PeriodicConfiguration,
};
use crate::correspondence::{
    circulation, minimal_to_vortex, polyline_length, roundtrip_check, vortex_to_minimal, StreamData,
};
use crate::error::Result;
use crate::io::{self_intersections, DomainArtifact};
use crate::weierstrass::{ClassicalName, DomainReport, Forms};

/// One measured invariant: passes when `value ≤ tolerance` (or `≥` for lower bounds).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl CheckResult {
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        CheckResult { name: name.to_string(), value, tolerance, passed: value <= tolerance }
    }

    pub fn at_least(name: &str, value: f64, tolerance: f64) -> Self {
        CheckResult { name: name.to_string(), value, tolerance, passed: value >= tolerance }
    }

    pub fn flag(name: &str, ok: bool) -> Self {
        CheckResult { name: name.to_string(), value: if ok { 0.0 } else { 1.0 }, tolerance: 0.0, passed: ok }
    }
}

/// A list of results.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CheckTable {
    pub results: Vec<CheckResult>,
}

impl CheckTable {
    pub fn push(&mut self, r: CheckResult) {
        self.results.push(r);
    }

    pub fn extend(&mut self, other: CheckTable) {
        self.results.extend(other.results);
    }

    pub fn all_passed(&self) -> bool {
        self.results.iter().all(|r| r.passed)
    }

    pub fn get(&self, name: &str) -> Option<&CheckResult> {
        self.results.iter().find(|r| r.name == name)
    }

    /// Fixed-width text table.
    pub fn render(&self) -> String {
        let width = self.results.iter().map(|r| r.name.len()).max().unwrap_or(4).max(4);
        let mut s = format!("{:<width$}  {:>12}  {:>10}  result\n", "name", "value", "tolerance");
        for r in &self.results {
            s.push_str(&format!(
                "{:<width$}  {:>12.3e}  {:>10.1e}  {}\n",
                r.name,
                r.value,
                r.tolerance,
                if r.passed { "pass" } else { "FAIL" }
            ));
        }
        s
    }
}

/// Sizes and seed of the randomized suites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SuiteSettings {
    pub probes: usize,
    pub pairs: usize,
    pub seed: u64,
}

impl Default for SuiteSettings {
    fn default() -> Self {
        SuiteSettings { probes: 100, pairs: 200, seed: 1 }
    }
}

/// Random finite configuration with `2 ≤ n ≤ max_n` points in the unit square and weights in `±[0.2, 2]`.
pub fn random_finite(rng: &mut impl Rng, max_n: usize) -> Result<FiniteConfiguration> {
    let n = rng.random_range(2..=max_n.max(2));
    let points = (0..n).map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
    let weights = (0..n).map(|_| rng.random_range(0.2..2.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 }).collect();
    FiniteConfiguration::new(points, weights)
}

/// Random periodic configuration of either case with `1 ≤ n ≤ max_n` points in the annulus `0.3 < |p| < 3`.
pub fn random_periodic(rng: &mut impl Rng, max_n: usize, case: Case) -> Result<PeriodicConfiguration> {
    let n = rng.random_range(if case == Case::A { 2 } else { 1 }..=max_n.max(2));
    let points = (0..n).map(|_| C::from_polar(rng.random_range(0.3..3.0), rng.random_range(-PI..PI))).collect();
    let mut weights: Vec<f64> = (0..n).map(|_| rng.random_range(0.2..2.0)).collect();
    let c0 = match case {
        Case::A => {
            let rest: f64 = weights[..n - 1].iter().sum();
            weights[n - 1] = -rest;
            C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        }
        Case::B => C::new(-weights.iter().sum::<f64>() / 2.0, 0.0),
    };
    PeriodicConfiguration::new(points, weights, c0, case)
}

/// Identity residuals of one finite configuration.
pub fn finite_suite(cfg: &FiniteConfiguration, tol: f64) -> CheckTable {
    let (s, sp) = finite_identities(cfg);
    let mut t = CheckTable::default();
    t.push(CheckResult::at_most("finite.sum_forces", s.norm(), tol));
    t.push(CheckResult::at_most("finite.sum_p_forces", sp.norm(), tol));
    t
}

/// Identity residual of one periodic configuration.
pub fn periodic_suite(cfg: &PeriodicConfiguration, tol: f64) -> CheckTable {
    let mut t = CheckTable::default();
    t.push(CheckResult::at_most("periodic.sum_forces", periodic_identity(cfg).norm(), tol));
    t
}

/// Worst identity residuals over `count` random finite and `count` random periodic configurations per case.
pub fn random_identity_suite(count: usize, seed: u64, tol: f64) -> Result<CheckTable> {
    let mut rng = StdRng::seed_from_u64(seed);
    let (mut s, mut sp, mut ps) = (0.0f64, 0.0f64, 0.0f64);
    for _ in 0..count {
        let (a, b) = finite_identities(&random_finite(&mut rng, 8)?);
        s = s.max(a.norm());
        sp = sp.max(b.norm());
    }
    for case in [Case::A, Case::B] {
        for _ in 0..count {
            ps = ps.max(periodic_identity(&random_periodic(&mut rng, 8, case)?).norm());
        }
    }
    let mut t = CheckTable::default();
    t.push(CheckResult::at_most("random.finite.sum_forces", s, tol));
    t.push(CheckResult::at_most("random.finite.sum_p_forces", sp, tol));
    t.push(CheckResult::at_most("random.periodic.sum_forces", ps, tol));
    Ok(t)
}

/// Construction identities of a built domain.
pub fn builder_suite(b: &BuiltDomain) -> CheckTable {
    let t = b.input.t();
    let cfg = b.input.config();
    let mut out = CheckTable::default();
    let circ = b
        .circulations
        .iter()
        .zip(cfg.weights())
        .map(|(c, w)| (c - C::new(2.0 * PI * t * w, 0.0)).norm())
        .fold(0.0, f64::max);
    out.push(CheckResult::at_most("builder.circulations", circ, 1e-8));
    let res = (b.residues.0 + C::new(0.0, 1.0 / t)).norm().max((b.residues.1 - C::new(0.0, 1.0 / t)).norm());
    out.push(CheckResult::at_most("builder.residues", res, 1e-8));
    let c0 = cfg.c0();
    let (vp, vm) = match cfg.case() {
        Case::A => (t * c0.conj(), t * c0.conj()),
        Case::B => (-t * c0, t * c0),
    };
    let vel = (b.velocity_plus - vp).norm().max((b.velocity_minus - vm).norm());
    out.push(CheckResult::at_most("builder.velocity_limits", vel, 1e-6));
    match b.classify(1e-6) {
        Ok(r) => {
            out.push(CheckResult::flag("builder.classification", r.case == cfg.case()));
            out.push(CheckResult::at_most("builder.cauchy", r.cauchy1.max(r.cauchy2), 1e-6));
        }
        Err(_) => out.push(CheckResult::flag("builder.classification", false)),
    }
    let speed = b
        .traces
        .iter()
        .flat_map(|tr| tr.points())
        .map(|z| (b.input.velocity(z).norm() - 1.0).abs())
        .fold(0.0, f64::max);
    out.push(CheckResult::at_most("builder.boundary_speed", speed, 1e-8));
    out
}

/// Sixth-order central-difference gradient `u_x + i u_y`.
fn gradient_fd(u: impl Fn(C) -> f64, w: C, h: f64) -> C {
    let d = |e: C| {
        let c = |k: f64| u(w + e * (k * h)) - u(w - e * (k * h));
        (45.0 * c(1.0) - 9.0 * c(2.0) + c(3.0)) / (60.0 * h)
    };
    C::new(d(C::new(1.0, 0.0)), d(C::new(0.0, 1.0)))
}

/// Properties of the maps between the built domain and its minimal graph.
pub fn correspondence_suite(b: &BuiltDomain, s: &SuiteSettings) -> Result<CheckTable> {
    let mut out = CheckTable::default();
    let mut rng = StdRng::seed_from_u64(s.seed);
    let sd = StreamData::from_built(b)?;
    let probes = sd.random_interior(&mut rng, s.probes, 0.5, 0.9);
    let graph = vortex_to_minimal(&sd, &probes)?;

    // Contraction of ψ.
    let pts = sd.random_interior(&mut rng, 2 * s.pairs, 0.5, 0.9);
    let (mut worst, mut least) = (0.0f64, f64::INFINITY);
    for pair in pts.chunks_exact(2) {
        let dpsi = (graph.psi(pair[1])?.image - graph.psi(pair[0])?.image).norm();
        let dw = (pair[1] - pair[0]).norm();
        worst = worst.max(dpsi / dw);
        least = least.min(dpsi);
    }
    out.push(CheckResult { name: "correspond.contraction".into(), value: worst, tolerance: 1.0, passed: worst < 1.0 && least > 0.0 });

    // Expansion of F on the parameter domain of the built surface.
    let surface = BuilderSurface::new(b.input.clone());
    let member = surface.clone();
    let scale = b.input.config().points().iter().map(|p| p.norm()).fold(0.0, f64::max);
    let mut zs = Vec::new();
    while zs.len() < 2 * s.pairs + s.probes {
        let z = C::from_polar(rng.random_range(0.1..2.0 * scale), rng.random_range(-PI..PI));
        if surface.contains(z) && surface.gauss(z).norm() > 1.0 / 0.9 {
            zs.push(z);
        }
    }
    let mv = minimal_to_vortex(Arc::new(surface), b.base_point, move |z| member.contains(z), &zs)?
        .with_base_values(C::i() * b.base_point.ln(), 0.0);
    let (mut ratio, mut counted, mut tries) = (f64::INFINITY, 0, 0);
    while counted < s.pairs && tries < 50 * s.pairs {
        let (z0, z1) = (zs[tries % zs.len()], zs[(7 * tries + 3) % zs.len()]);
        tries += 1;
        if z0 == z1 {
            continue;
        }
        if let Ok((df, dpsi)) = mv.increment(z0, z1) {
            ratio = ratio.min(df.norm() / dpsi.norm());
            counted += 1;
        }
    }
    out.push(CheckResult {
        name: "correspond.expansion".into(),
        value: ratio,
        tolerance: 1.0,
        passed: ratio > 1.0 && counted == s.pairs,
    });

    // Each boundary component of ψ(Ω) is a translate of its counterpart.
    let mut spread = 0.0f64;
    for k in 0..sd.boundaries().len() {
        let d = graph.boundary_offsets(k)?;
        let mean = d.iter().sum::<C>() / d.len() as f64;
        spread = spread.max(d.iter().map(|x| (x - mean).norm()).fold(0.0, f64::max));
    }
    out.push(CheckResult::at_most("correspond.boundary_translation", spread, 1e-6));

    let rt = roundtrip_check(&sd, &probes)?;
    out.push(CheckResult::at_most("correspond.roundtrip", rt.deviation, 1e-6));
    let bad = roundtrip_check(&sd.scaled(1.01), &probes)?;
    out.push(CheckResult { name: "correspond.roundtrip_negative_control".into(), value: bad.deviation, tolerance: 1e-6, passed: bad.deviation > 1e-6 && bad.gradient_flag });

    // Derivative link and x3 = u on the parameter side.
    let (mut link, mut height) = (0.0f64, 0.0f64);
    for &z in &zs[..s.probes] {
        let p = mv.image(z)?;
        link = link.max((b.uz2(p.vortex) * mv.forms().gauss(z) + 1.0).norm());
        height = height.max((p.height - b.stream_value(p.vortex)).abs());
    }
    out.push(CheckResult::at_most("correspond.derivative_link", link, 1e-8));
    out.push(CheckResult::at_most("correspond.x3_equals_u", height, 1e-8));
    let graph_height = probes.iter().map(|&w| Ok((graph.height(w)? - b.stream_value(w)).abs())).collect::<Result<Vec<f64>>>()?;
    out.push(CheckResult::at_most("correspond.graph_height", graph_height.into_iter().fold(0.0, f64::max), 1e-8));

    // Velocity v = −i conj(2u_w) against differences of u.
    let vel = probes
        .iter()
        .map(|&w| {
            let z = (-C::i() * w).exp();
            let d = b.input.config().points().iter().map(|p| (z - p).norm() / z.norm()).fold(1.0, f64::min);
            let grad = gradient_fd(|x| b.stream_value(x), w, 1e-2 * d);
            let v = C::new(grad.im, -grad.re);
            (v + C::i() * b.uz2(w).conj()).norm()
        })
        .fold(0.0, f64::max);
    out.push(CheckResult::at_most("correspond.velocity_identity", vel, 1e-10));

    // Gauss map horizontal on the boundary.
    let horiz = b
        .traces
        .iter()
        .flat_map(|tr| tr.points())
        .map(|z| (mv.forms().gauss(z).norm() - 1.0).abs())
        .fold(0.0, f64::max);
    out.push(CheckResult::at_most("correspond.gauss_horizontal", horiz, 1e-6));

    // Circulations and curve lengths.
    let (mut circ, mut length) = (0.0f64, 0.0f64);
    for (img, w) in sd.boundaries().iter().zip(b.input.config().weights()) {
        let c = circulation(&sd, img)?;
        circ = circ.max((c - 2.0 * PI * b.input.t() * w).abs());
        let len = polyline_length(img, true);
        length = length.max((c.abs() - len).abs() / len);
    }
    out.push(CheckResult::at_most("correspond.circulation", circ, 1e-8));
    out.push(CheckResult::at_most("correspond.circulation_length", length, 1e-5));
    Ok(out)
}

/// Polyline, circulation and classification invariants of an artifact.
pub fn artifact_suite(a: &DomainArtifact) -> CheckTable {
    let mut out = CheckTable::default();
    let finite = a.curves.iter().all(|c| c.points.iter().all(|p| p.is_finite()));
    out.push(CheckResult::flag("artifact.finite", finite));
    let crossings: usize = a.curves.iter().map(|c| self_intersections(&c.points)).sum();
    out.push(CheckResult::at_most("artifact.self_intersections", crossings as f64, 0.0));
    let gap = a.boundaries().map(|c| c.relative_gap()).fold(0.0, f64::max);
    out.push(CheckResult::at_most("artifact.boundary_closure", gap, 1e-6));
    if !a.circulations.is_empty() {
        let lengths: Vec<f64> = a.boundaries().map(|c| c.length()).collect();
        let dev = a
            .circulations
            .iter()
            .zip(&lengths)
            .map(|(c, l)| (c.abs() - l).abs() / l.max(f64::MIN_POSITIVE))
            .fold(0.0, f64::max);
        out.push(CheckResult::at_most("artifact.circulation_length", dev, 1e-5));
    }
    if let (Some(vp), Some(vm), Some(p)) = (a.velocity_plus, a.velocity_minus, a.periods.first()) {
        let ok = prop_ab_check(&a.circulations, vp, vm, p.norm(), 1e-6).is_ok();
        out.push(CheckResult::flag("artifact.classification", ok));
    }
    out
}

/// Boundary, speed, harmonicity and periodicity checks of a classical domain report.
pub fn classical_suite(name: ClassicalName, r: &DomainReport) -> CheckTable {
    let mut out = CheckTable::default();
    out.push(CheckResult::at_most("classical.closure_gap", r.closure_gap, 1e-6));
    out.push(CheckResult::at_most("classical.speed", r.speed_residual, 1e-6));
    out.push(CheckResult::at_most("classical.harmonic", r.harmonic_residual, 1e-6));
    out.push(CheckResult::flag("classical.lattice_rank", r.lattice.len() == name.expected_lattice_rank()));
    if name.expected_lattice_rank() == 1 {
        out.push(CheckResult {
            name: "classical.components_per_period".into(),
            value: r.boundary_components as f64,
            tolerance: 2.0,
            passed: r.boundary_components == 2,
        });
    }
    out
}
