//! Forces, identities and Jacobian ranks of the closed-form balanced configurations.
//!
//! Usage: `cargo run --example forces`

use hvlab::configurations::{
    dihedral, finite_forces, finite_identities, force_rank, periodic_forces, periodic_identity, regular_lane, three_lane,
    uneven_street, vonkarman_street, Configuration,
};
use hvlab::Complex64;

fn max_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|f| f.norm()).fold(0.0, f64::max)
}

fn main() -> hvlab::Result<()> {
    for n in 3..=7 {
        let cfg = dihedral(n)?;
        let (s, sp) = finite_identities(&cfg);
        let (rank, ok) = force_rank(&cfg)?;
        println!(
            "dihedral({n}): max|F| {:.1e}  |sum F| {:.1e}  |sum pF - expected| {:.1e}  rank {rank}/{} {}",
            max_norm(&finite_forces(&cfg)),
            s.norm(),
            sp.norm(),
            cfg.expected_rank(),
            if ok { "non-degenerate" } else { "degenerate" }
        );
    }
    let streets = [
        ("street c0=0.25", vonkarman_street(Complex64::new(0.25, 0.0))?),
        ("street c0=1", vonkarman_street(Complex64::new(1.0, 0.0))?),
        ("regular_lane(3)", regular_lane(3)?),
        ("three_lane(-1.5)", three_lane(-1.5)?),
        ("uneven street", uneven_street()),
    ];
    for (name, cfg) in streets {
        let (rank, _) = force_rank(&cfg)?;
        println!(
            "{name}: max|F| {:.1e}  |sum F| {:.1e}  rank {rank}/{}",
            max_norm(&periodic_forces(&cfg)),
            periodic_identity(&cfg).norm(),
            cfg.expected_rank()
        );
    }
    Ok(())
}
