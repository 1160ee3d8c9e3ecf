//! Minimal graph of the c0 = 0.25 street at t = 0.05 and the property suite of the two maps.
//!
//! Usage: `cargo run --release --example correspondence [t] [seed]`

use hvlab::builder::{build_domain, BuildSettings, BuilderInput};
use hvlab::checks::{correspondence_suite, SuiteSettings};
use hvlab::configurations::vonkarman_street;
use hvlab::correspondence::{vortex_to_minimal, StreamData};
use hvlab::Complex64;

fn main() -> hvlab::Result<()> {
    let mut args = std::env::args().skip(1);
    let t = args.next().and_then(|s| s.parse().ok()).unwrap_or(0.05);
    let seed = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let input = BuilderInput::new(vonkarman_street(Complex64::new(0.25, 0.0))?, t, None)?;
    let built = build_domain(&input, &BuildSettings { grid: 64, ..Default::default() })?;

    let sd = StreamData::from_built(&built)?;
    let w = Complex64::new(1.0, 0.8);
    let graph = vortex_to_minimal(&sd, &[w])?;
    let xi = graph.psi(w)?.image;
    println!("w = {w:.6}  psi(w) = {xi:.6}  v = {:.8}  grad v = {:.6}", graph.v(xi)?, graph.gradient(xi)?);

    let start = std::time::Instant::now();
    let table = correspondence_suite(&built, &SuiteSettings { seed, ..Default::default() })?;
    print!("{}", table.render());
    println!("suite time {:.2?}", start.elapsed());
    Ok(())
}
