//! Vortex domains of the four catalogued minimal surfaces.
//!
//! Usage: `cargo run --release --example classical_domains [grid]`

use hvlab::weierstrass::{classical_data, domain_image, ClassicalName, DomainSettings};

fn main() -> hvlab::Result<()> {
    let grid = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(400);
    for name in ClassicalName::ALL {
        let data = classical_data(name, None)?;
        let t = std::time::Instant::now();
        let img = domain_image(&data, &name.to_string(), &DomainSettings::with_grid(grid))?;
        let r = &img.report;
        println!("{name}: {:.2?}", t.elapsed());
        println!("  lattice {:?}", r.lattice);
        println!("  components {} values {:?}", r.boundary_components, r.boundary_values);
        println!(
            "  spread {:.2e} gap {:.2e} speed {:.2e} speed_fd {:.2e} harmonic {:.2e} height {:.2e}",
            r.boundary_level_spread, r.closure_gap, r.speed_residual, r.speed_fd_residual, r.harmonic_residual,
            r.height_period_max
        );
        println!("  streamlines {} invalid nodes {}", r.streamlines, r.invalid_nodes);
    }
    Ok(())
}
