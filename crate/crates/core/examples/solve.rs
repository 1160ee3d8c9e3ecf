//! Newton balancing from perturbed seeds: the three-lane street and the uneven street.
//!
//! Usage: `cargo run --release --example solve [seed]`

use std::f64::consts::PI;

use hvlab::configurations::{balance_solve, three_lane, uneven_street, Configuration, Gauge};
use hvlab::numeric::NewtonOptions;
use hvlab::Complex64;
use rand::{Rng, SeedableRng};

fn main() -> hvlab::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(7);
    let mut rng = rand::rngs::StdRng::seed_from_u64(seed);
    let opts = NewtonOptions::default();

    let exact = three_lane(-1.5)?;
    let seed_cfg = exact.with_points(vec![Complex64::new(-5.5, 0.1), Complex64::new(-0.2, -0.05), Complex64::new(1.0, 0.0)])?;
    let (solved, report) = balance_solve(&seed_cfg, Some(&Gauge { frozen: vec![2] }), &opts)?;
    println!("three_lane: max|F| {:.1e}, rank {}", report.max_abs_force, report.jacobian_rank);
    for p in solved.points() {
        println!("  p = {p:.10}  (roots of z^2 + 6z + 1 are -3 ± 2√2)");
    }

    let exact = uneven_street();
    let q0 = exact.q_points();
    let perturbed: Vec<Complex64> = q0
        .iter()
        .enumerate()
        .map(|(k, q)| if k == 0 { *q } else { q + Complex64::new(rng.random_range(-0.02..0.02), rng.random_range(-0.02..0.02)) })
        .map(|q| (-Complex64::i() * q).exp())
        .collect();
    let start = std::time::Instant::now();
    let (solved, report) = balance_solve(&exact.with_points(perturbed)?, Some(&Gauge { frozen: vec![0] }), &opts)?;
    println!("uneven street: max|F| {:.1e} in {:.2?}", report.max_abs_force, start.elapsed());
    for (q, q_exact) in solved.q_points().iter().zip(&q0) {
        println!("  q/π = {:.10}  error {:.1e}", q / PI, ((q - q_exact) / PI).norm());
    }
    Ok(())
}
