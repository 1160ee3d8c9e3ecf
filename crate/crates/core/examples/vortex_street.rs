//! Leading-order hollow vortex street at small `t`: circulations, residues, far-field velocities,
//! classification, and the scaling of the closure defect with `t`.
//!
//! Usage: `cargo run --release --example vortex_street [c0]`

use std::f64::consts::PI;

use hvlab::builder::{build_domain, BuildSettings, BuilderInput};
use hvlab::configurations::{periodic_forces, vonkarman_street, Configuration};
use hvlab::Complex64;

fn main() -> hvlab::Result<()> {
    let c0 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(0.25);
    let cfg = vonkarman_street(Complex64::new(c0, 0.0))?;
    let settings = BuildSettings { grid: 64, ..Default::default() };

    let b = build_domain(&BuilderInput::new(cfg.clone(), 0.05, None)?, &settings)?;
    println!("t = 0.05, t_max = {:.4}", b.t_max.unwrap_or(f64::NAN));
    println!("  circulations {:.10?}", b.circulation_values());
    println!("  residues of g t w0 at 0 and infinity {:.6} {:.6}", b.residues.0, b.residues.1);
    println!("  velocity at +i inf {:.8}, at -i inf {:.8}", b.velocity_plus, b.velocity_minus);
    let r = b.classify(1e-6)?;
    println!("  case {:?}, residuals a {:.1e} b {:.1e}", r.case, r.case_a_residual, r.case_b_residual);

    let shifted = vec![cfg.points()[0], cfg.points()[1] * Complex64::from_polar(1.0, 0.1)];
    let unbalanced = cfg.with_points(shifted)?;
    let forces = periodic_forces(&unbalanced);
    println!("closure defect / t^2 (balanced | perturbed, target 2π|F| = {:.4})", 2.0 * PI * forces[0].norm());
    let settings = BuildSettings { check_threshold: false, ..settings };
    for t in [0.04, 0.02, 0.01] {
        let balanced = build_domain(&BuilderInput::new(cfg.clone(), t, None)?, &settings)?;
        let perturbed = build_domain(&BuilderInput::new(unbalanced.clone(), t, None)?, &settings)?;
        println!(
            "  t = {t:<5} {:.3e} | {:.4}  (symmetric period / t^2 {:.4})",
            balanced.defects[0].magnitude / (t * t),
            perturbed.defects[0].magnitude / (t * t),
            perturbed.defects[0].symmetric_period.norm() / (t * t)
        );
    }
    Ok(())
}
