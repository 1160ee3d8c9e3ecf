//! Property tests of the force maps, numeric kernel, builder and artifact I/O.

use std::f64::consts::PI;

use hvlab::builder::{build_domain, phi_along, BuildSettings, BuilderInput};
use hvlab::configurations::{
    balance_solve, dihedral, finite_forces, periodic_forces, periodic_forces_q, vonkarman_street, Case, Configuration,
    FiniteConfiguration, PeriodicConfiguration,
};
use hvlab::io::{render_svg, Curve, CurveKind, DomainArtifact};
use hvlab::numeric::{
    complex_rank, integrate_contour, newton_solve, ComplexMatrix, ContourPath, NewtonOptions, QuadratureSettings, RANK_TOL,
};
use hvlab::Complex64 as C;
use proptest::prelude::*;

fn complex(r: std::ops::Range<f64>) -> impl Strategy<Value = C> {
    (r.clone(), r).prop_map(|(a, b)| C::new(a, b))
}

fn weight() -> impl Strategy<Value = f64> {
    (0.2..2.0f64, any::<bool>()).prop_map(|(w, s)| if s { w } else { -w })
}

fn separated(p: &[C], d: f64) -> bool {
    (0..p.len()).all(|i| (0..i).all(|j| (p[i] - p[j]).norm() > d))
}

fn finite_config() -> impl Strategy<Value = FiniteConfiguration> {
    (2..=8usize)
        .prop_flat_map(|n| (prop::collection::vec(complex(-1.0..1.0), n), prop::collection::vec(weight(), n)))
        .prop_filter("separated points", |(p, _)| separated(p, 1e-2))
        .prop_map(|(p, w)| FiniteConfiguration::new(p, w).unwrap())
}

fn periodic_config() -> impl Strategy<Value = PeriodicConfiguration> {
    let points = (2..=8usize).prop_flat_map(|n| {
        (prop::collection::vec((0.3..3.0f64, -PI..PI), n), prop::collection::vec(0.2..2.0f64, n), any::<bool>(), complex(-1.0..1.0))
    });
    points
        .prop_map(|(polar, mut w, case_a, c0)| {
            let p: Vec<C> = polar.iter().map(|&(r, a)| C::from_polar(r, a)).collect();
            let n = p.len();
            if case_a {
                w[n - 1] = -w[..n - 1].iter().sum::<f64>();
                (p, w, c0, Case::A)
            } else {
                let c0 = C::new(-w.iter().sum::<f64>() / 2.0, 0.0);
                (p, w, c0, Case::B)
            }
        })
        .prop_filter("separated points", |(p, ..)| separated(p, 1e-2))
        .prop_map(|(p, w, c0, case)| PeriodicConfiguration::new(p, w, c0, case).unwrap())
}

fn max_diff(a: &[C], b: &[C]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn scale(f: &[C]) -> f64 {
    f.iter().map(|x| x.norm()).fold(1.0, f64::max)
}

proptest! {
    #[test]
    fn finite_sum_identities(cfg in finite_config()) {
        let f = finite_forces(&cfg);
        let (p, c) = (cfg.points(), cfg.weights());
        let pairs: f64 = (0..c.len()).flat_map(|i| (0..i).map(move |j| c[i] * c[j])).sum();
        let tol = 1e-12 * scale(&f);
        prop_assert!(f.iter().sum::<C>().norm() <= tol);
        prop_assert!((f.iter().zip(p).map(|(f, p)| f * p).sum::<C>() - pairs).norm() <= tol);
    }

    #[test]
    fn periodic_sum_identity(cfg in periodic_config()) {
        let f = periodic_forces(&cfg);
        prop_assert!(f.iter().sum::<C>().norm() <= 1e-12 * scale(&f));
    }

    #[test]
    fn periodic_forms_agree(cfg in periodic_config()) {
        let q = cfg.q_points();
        let fq = periodic_forces_q(&q, cfg.weights(), cfg.c0(), cfg.case()).unwrap();
        let f = periodic_forces(&cfg);
        prop_assert!(max_diff(&f, &fq) <= 1e-10 * scale(&f));
    }

    #[test]
    fn finite_forces_scale_and_translate(cfg in finite_config(), lambda in complex(-3.0..3.0), w in complex(-5.0..5.0)) {
        prop_assume!(lambda.norm() > 0.1);
        let f = finite_forces(&cfg);
        let scaled: Vec<C> = cfg.points().iter().map(|p| p * lambda).collect();
        let fs = finite_forces(&cfg.with_points(scaled).unwrap());
        let expect: Vec<C> = f.iter().map(|x| x / lambda).collect();
        prop_assert!(max_diff(&fs, &expect) <= 1e-10 * scale(&expect));
        let moved: Vec<C> = cfg.points().iter().map(|p| p + w).collect();
        let ft = finite_forces(&cfg.with_points(moved).unwrap());
        prop_assert!(max_diff(&ft, &f) <= 1e-9 * scale(&f));
    }

    #[test]
    fn periodic_forces_rotation_invariant(cfg in periodic_config(), theta in -PI..PI) {
        let f = periodic_forces(&cfg);
        let rotated: Vec<C> = cfg.points().iter().map(|p| p * C::from_polar(1.0, theta)).collect();
        let fr = periodic_forces(&cfg.with_points(rotated).unwrap());
        prop_assert!(max_diff(&fr, &f) <= 1e-10 * scale(&f));
    }

    #[test]
    fn holomorphic_contour_integral_vanishes(coeffs in prop::collection::vec(complex(-2.0..2.0), 1..8), center in complex(-1.0..1.0), r in 0.1..2.0f64) {
        let q = QuadratureSettings::default();
        let poly = |z: C| coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, c| acc * z + c);
        let circle = integrate_contour(poly, &ContourPath::circle(center, r, true).unwrap(), &q).unwrap();
        let square = [center - r, center + C::new(r, -r), center + C::new(r, r), center + C::new(-r, r)].to_vec();
        let poly_path = integrate_contour(poly, &ContourPath::polyline(square, true).unwrap(), &q).unwrap();
        let size = coeffs.iter().map(|c| c.norm()).sum::<f64>() * (center.norm() + 2.0 * r + 1.0).powi(coeffs.len() as i32);
        prop_assert!(circle.norm() <= 10.0 * q.abs_tol * size.max(1.0));
        prop_assert!(poly_path.norm() <= 10.0 * q.abs_tol * size.max(1.0));
    }

    #[test]
    fn cauchy_kernel_is_radius_independent(a in complex(-1.0..1.0), r1 in 0.05..0.5f64, r2 in 1.0..3.0f64) {
        let q = QuadratureSettings::default();
        for r in [r1, r2] {
            let v = integrate_contour(|z| 1.0 / (z - a), &ContourPath::circle(a, r, true).unwrap(), &q).unwrap();
            prop_assert!((v - C::new(0.0, 2.0 * PI)).norm() <= 1e-9);
        }
        // The outer circle about the origin encloses `a` as well.
        let outer = integrate_contour(|z| 1.0 / (z - a), &ContourPath::circle(C::new(0.0, 0.0), 1.5 + r2, true).unwrap(), &q).unwrap();
        prop_assert!((outer - C::new(0.0, 2.0 * PI)).norm() <= 1e-9);
    }

    #[test]
    fn newton_invariant_under_residual_scaling(targets in prop::collection::vec(complex(0.5..2.0), 1..5), k in complex(-5.0..5.0)) {
        prop_assume!(k.norm() > 0.1);
        let residual = |x: &[C]| x.iter().zip(&targets).map(|(x, a)| x * x * x - a).collect::<Vec<C>>();
        let x0: Vec<C> = targets.iter().map(|a| a * 0.9 + C::new(0.05, 0.05)).collect();
        let opts = NewtonOptions::default();
        let plain = newton_solve(residual, &x0, &opts).unwrap();
        let scaled = newton_solve(|x: &[C]| residual(x).into_iter().map(|r| r * k).collect(), &x0, &opts).unwrap();
        prop_assert!(max_diff(&plain.x, &scaled.x) <= 1e-8);
    }

    #[test]
    fn rank_of_adjoint(rows in 1..6usize, cols in 1..6usize, rank in 0..6usize, entries in prop::collection::vec(complex(-1.0..1.0), 72)) {
        let rank = rank.min(rows).min(cols);
        // Product of random `rows × rank` and `rank × cols` factors.
        let a = |i: usize, k: usize| entries[i * 6 + k];
        let b = |k: usize, j: usize| entries[36 + k * 6 + j];
        let m = ComplexMatrix::from_fn(rows, cols, |i, j| (0..rank).map(|k| a(i, k) * b(k, j)).sum());
        let r = complex_rank(&m, RANK_TOL).unwrap();
        prop_assert_eq!(r, complex_rank(&m.adjoint(), RANK_TOL).unwrap());
        prop_assert!(r <= rank);
    }

    #[test]
    fn csv_round_trip_is_exact(curves in prop::collection::vec((any::<bool>(), -1e3..1e3f64, prop::collection::vec(complex(-1e6..1e6), 2..20)), 1..5)) {
        let mut a = DomainArtifact::new("random");
        for (k, (boundary, level, points)) in curves.into_iter().enumerate() {
            let kind = if boundary { CurveKind::Boundary } else { CurveKind::Streamline };
            a.curves.push(Curve { component_id: k, kind, level, points });
        }
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        let back = DomainArtifact::read_csv_curves(buf.as_slice()).unwrap();
        prop_assert_eq!(&back, &a.curves);
        let svg = render_svg(&a, 1);
        let doc = roxmltree::Document::parse(&svg).unwrap();
        prop_assert_eq!(doc.descendants().filter(|n| n.has_tag_name("path")).count(), a.curves.len());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn balanced_seed_is_a_fixed_point(n in 3..8usize, lambda in complex(-2.0..2.0), w in complex(-2.0..2.0)) {
        prop_assume!(lambda.norm() > 0.2);
        let base = dihedral(n).unwrap();
        let moved: Vec<C> = base.points().iter().map(|p| p * lambda + w).collect();
        let seed = base.with_points(moved).unwrap();
        let (solved, report) = balance_solve(&seed, None, &NewtonOptions::default()).unwrap();
        prop_assert!(report.max_abs_force <= 1e-10);
        prop_assert!(max_diff(solved.points(), seed.points()) <= 1e-10);
        prop_assert!(finite_forces(&solved).iter().sum::<C>().norm() <= 1e-12);
    }

    #[test]
    fn phi_winds_by_two_pi(t in 0.01..0.3f64, r in 1.2..2.5f64, theta in 0.2..1.0f64) {
        let input = BuilderInput::new(vonkarman_street(C::new(0.25, 0.0)).unwrap(), t, None).unwrap();
        let z0 = C::from_polar(r, -theta);
        let z1 = C::from_polar(r, theta);
        let short = phi_along(&input, &[z0, C::new(r, 0.0), z1]).unwrap();
        let around: Vec<C> = (0..=16).map(|k| C::from_polar(r, -theta - (2.0 * PI - 2.0 * theta) * k as f64 / 16.0)).collect();
        let long = phi_along(&input, &around).unwrap();
        prop_assert!(((short - long).norm() - 2.0 * PI).abs() <= 1e-8);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn circulations_are_exact_for_every_t(t in 0.01..0.3f64) {
        let input = BuilderInput::new(vonkarman_street(C::new(0.25, 0.0)).unwrap(), t, None).unwrap();
        let settings = BuildSettings { grid: 16, check_threshold: false, ..Default::default() };
        let b = build_domain(&input, &settings).unwrap();
        for (circ, c) in b.circulations.iter().zip(input.config().weights()) {
            prop_assert!((circ - 2.0 * PI * t * c).norm() <= 1e-8);
        }
        prop_assert!((b.residues.0 + b.residues.1).norm() <= 1e-8);
    }
}
