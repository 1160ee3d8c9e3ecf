//! Writes the c0 = 0.25 street as JSON, CSV and tiled SVG, then re-reads and checks the artifact.
//!
//! Usage: `cargo run --release --example export_svg [out_dir] [tiles]`

use std::path::PathBuf;

use hvlab::builder::{build_domain, BuildSettings, BuilderInput};
use hvlab::checks::artifact_suite;
use hvlab::configurations::vonkarman_street;
use hvlab::io::{render_svg, DomainArtifact, DEFAULT_TILES};
use hvlab::Complex64;

fn main() -> hvlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let dir = PathBuf::from(args.next().unwrap_or_else(|| "street_out".into()));
    let tiles = args.next().and_then(|s| s.parse().ok()).unwrap_or(DEFAULT_TILES);
    std::fs::create_dir_all(&dir)?;

    let input = BuilderInput::new(vonkarman_street(Complex64::new(0.25, 0.0))?, 0.1, None)?;
    let artifact = build_domain(&input, &BuildSettings::default())?.to_artifact("street c0=0.25 t=0.1");
    std::fs::write(dir.join("street.json"), artifact.to_json()?)?;
    artifact.write_csv(std::fs::File::create(dir.join("street.csv"))?)?;
    std::fs::write(dir.join("street.svg"), render_svg(&artifact, tiles))?;

    let back = DomainArtifact::from_json(&std::fs::read_to_string(dir.join("street.json"))?)?;
    let curves = DomainArtifact::read_csv_curves(std::fs::File::open(dir.join("street.csv"))?)?;
    println!("{} curves ({} in csv) written to {}", back.curves.len(), curves.len(), dir.display());
    print!("{}", artifact_suite(&back).render());
    Ok(())
}
