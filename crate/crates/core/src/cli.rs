//! The `hvlab` command line.
//!
//! Exit codes: 0 success, 1 failed check, 2 input error, 3 solver failure, 4 geometry failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use num_complex::Complex64 as C;
use serde_json::json;

use crate::builder::{build_domain, BuilderInput, BuiltDomain};
use crate::checks::{
    artifact_suite, builder_suite, classical_suite, correspondence_suite, finite_suite, periodic_suite,
    random_identity_suite, CheckTable, SuiteSettings,
};
use crate::configurations::{
    balance_solve, finite_forces, finite_identities, force_rank, periodic_forces, periodic_identity, Configuration,
    Gauge,
};
use crate::error::{Error, Result};
use crate::io::{render_svg, ConfigFile, DomainArtifact, LoadedConfig, DEFAULT_TILES};
use crate::weierstrass::{classical_data, domain_image, ClassicalName, DomainSettings};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "hvlab", version, about = "Hollow vortex domains and minimal graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Solver tolerance override.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Grid resolution override.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Fundamental domains drawn along each period in SVG output.
    #[arg(long, global = true, default_value_t = DEFAULT_TILES)]
    pub tiles: usize,
    /// Output directory for JSON, CSV and SVG files.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for random probes.
    #[arg(long, global = true, default_value_t = 1)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Forces, identity residuals and Jacobian rank of a configuration.
    Forces { config: PathBuf },
    /// Balances a configuration by Newton iteration.
    Solve {
        config: PathBuf,
        /// Point indices held fixed (comma separated).
        #[arg(long, value_delimiter = ',')]
        freeze: Option<Vec<usize>>,
    },
    /// Builds the vortex domain of a balanced periodic configuration.
    Build {
        config: PathBuf,
        /// Overrides the size parameter of the build section.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Vortex domain of a catalogued minimal surface.
    Classical {
        /// scherk, karcher, schwarzP or schwarzH.
        name: String,
        /// Shape parameter `0 < a < 1` of the Karcher and Schwarz H data (default 0.5).
        #[arg(long)]
        a: Option<f64>,
    },
    /// Builds a domain and runs the correspondence property suite.
    Correspond {
        config: PathBuf,
        /// Overrides the size parameter of the build section.
        #[arg(long)]
        t: Option<f64>,
        /// Number of interior probe points.
        #[arg(long)]
        probes: Option<usize>,
        /// Number of random point pairs for the contraction and expansion checks.
        #[arg(long)]
        pairs: Option<usize>,
    },
    /// Runs the invariant suites on a configuration file or a domain artifact.
    Check {
        /// Configuration file or domain artifact (JSON).
        input: Option<PathBuf>,
        /// Also run the identity suite on this many random configurations.
        #[arg(long)]
        random: Option<usize>,
        /// Include the correspondence suite for periodic configurations with a build section.
        #[arg(long)]
        correspondence: bool,
        /// Print results as JSON instead of a table.
        #[arg(long)]
        json: bool,
    },
}

fn pairs(v: &[C]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

fn write_file(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}

fn write_artifact(dir: &Path, stem: &str, a: &DomainArtifact, tiles: usize) -> Result<()> {
    write_file(dir, &format!("{stem}.json"), &a.to_json()?)?;
    let mut csv = Vec::new();
    a.write_csv(&mut csv)?;
    write_file(dir, &format!("{stem}.csv"), &String::from_utf8_lossy(&csv))?;
    write_file(dir, &format!("{stem}.svg"), &render_svg(a, tiles))
}

fn load(path: &Path) -> Result<(ConfigFile, LoadedConfig)> {
    let file = ConfigFile::read(path)?;
    let loaded = file.load()?;
    Ok((file, loaded))
}

fn build_from(file: &ConfigFile, loaded: LoadedConfig, t: Option<f64>, grid: Option<usize>) -> Result<BuiltDomain> {
    let LoadedConfig::Periodic(cfg) = loaded else {
        return Err(Error::InvalidInput("building needs a periodic configuration".into()));
    };
    let (t_file, a) = file.build_parameters().unwrap_or((0.05, None));
    let input = BuilderInput::new(cfg, t.unwrap_or(t_file), a)?;
    build_domain(&input, &file.build_settings(grid))
}

fn forces(cli: &Cli, path: &Path, out: &mut dyn Write) -> Result<i32> {
    let (_, loaded) = load(path)?;
    let report = match &loaded {
        LoadedConfig::Finite(cfg) => {
            let f = finite_forces(cfg);
            let (s, sp) = finite_identities(cfg);
            let (rank, _) = force_rank(cfg)?;
            json!({
                "kind": "finite",
                "forces": pairs(&f),
                "max_abs_force": f.iter().map(|x| x.norm()).fold(0.0, f64::max),
                "sum_forces": [s.re, s.im],
                "sum_p_forces_residual": [sp.re, sp.im],
                "jacobian_rank": rank,
                "expected_rank": cfg.expected_rank(),
            })
        }
        LoadedConfig::Periodic(cfg) => {
            let f = periodic_forces(cfg);
            let s = periodic_identity(cfg);
            let (rank, _) = force_rank(cfg)?;
            json!({
                "kind": "periodic",
                "forces": pairs(&f),
                "max_abs_force": f.iter().map(|x| x.norm()).fold(0.0, f64::max),
                "sum_forces": [s.re, s.im],
                "jacobian_rank": rank,
                "expected_rank": cfg.expected_rank(),
            })
        }
    };
    let text = serde_json::to_string_pretty(&report)?;
    writeln!(out, "{text}")?;
    if let Some(dir) = &cli.out {
        write_file(dir, "forces.json", &text)?;
    }
    Ok(EXIT_OK)
}

fn solve(cli: &Cli, path: &Path, freeze: Option<&[usize]>, out: &mut dyn Write) -> Result<i32> {
    let (file, loaded) = load(path)?;
    let opts = file.newton_options(cli.tol);
    let gauge = freeze.map(|f| Gauge { frozen: f.to_vec() }).or_else(|| file.gauge());
    let points = match &loaded {
        LoadedConfig::Finite(cfg) => balance_solve(cfg, gauge.as_ref(), &opts)?.0.points().to_vec(),
        LoadedConfig::Periodic(cfg) => balance_solve(cfg, gauge.as_ref(), &opts)?.0.points().to_vec(),
    };
    let text = file.with_points(&points).to_json()?;
    writeln!(out, "{text}")?;
    if let Some(dir) = &cli.out {
        write_file(dir, "solved.json", &text)?;
    }
    Ok(EXIT_OK)
}

fn build(cli: &Cli, path: &Path, t: Option<f64>, out: &mut dyn Write) -> Result<i32> {
    let (file, loaded) = load(path)?;
    let built = build_from(&file, loaded, t, cli.grid)?;
    let artifact = built.to_artifact(&path.display().to_string());
    writeln!(out, "{}", serde_json::to_string_pretty(&artifact.report)?)?;
    if let Some(dir) = &cli.out {
        let stem = path.file_stem().and_then(|s| s.to_str()).unwrap_or("domain");
        write_artifact(dir, stem, &artifact, cli.tiles)?;
    }
    Ok(EXIT_OK)
}

fn classical(cli: &Cli, name: &str, a: Option<f64>, out: &mut dyn Write) -> Result<i32> {
    let name: ClassicalName = name.parse()?;
    let data = classical_data(name, a)?;
    let settings = cli.grid.map(DomainSettings::with_grid).unwrap_or_default();
    let mut image = domain_image(&data, &name.to_string(), &settings)?;
    let table = classical_suite(name, &image.report);
    image.artifact.record("checks", &table);
    writeln!(out, "{}", serde_json::to_string_pretty(&image.report)?)?;
    write!(out, "{}", table.render())?;
    if let Some(dir) = &cli.out {
        write_artifact(dir, &name.to_string(), &image.artifact, cli.tiles)?;
    }
    Ok(EXIT_OK)
}

fn correspond(cli: &Cli, path: &Path, t: Option<f64>, probes: Option<usize>, pairs: Option<usize>, out: &mut dyn Write) -> Result<i32> {
    let (file, loaded) = load(path)?;
    let checks = file.checks();
    let built = build_from(&file, loaded, t, cli.grid)?;
    let settings = SuiteSettings { probes: probes.unwrap_or(checks.probes), pairs: pairs.unwrap_or(checks.pairs), seed: cli.seed };
    let table = correspondence_suite(&built, &settings)?;
    write!(out, "{}", table.render())?;
    if let Some(dir) = &cli.out {
        write_file(dir, "correspond.json", &serde_json::to_string_pretty(&table)?)?;
    }
    Ok(EXIT_OK)
}

fn check(cli: &Cli, input: Option<&Path>, random: Option<usize>, with_correspondence: bool, as_json: bool, out: &mut dyn Write) -> Result<i32> {
    let mut table = CheckTable::default();
    if let Some(n) = random {
        table.extend(random_identity_suite(n, cli.seed, cli.tol.unwrap_or(1e-12))?);
    }
    if let Some(path) = input {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        let value: serde_json::Value = serde_json::from_str(&text)?;
        if value.get("schema").is_some() {
            table.extend(artifact_suite(&DomainArtifact::from_json(&text)?));
        } else {
            let file = ConfigFile::from_json(&text)?;
            match file.load()? {
                LoadedConfig::Finite(cfg) => table.extend(finite_suite(&cfg, cli.tol.unwrap_or(1e-12))),
                LoadedConfig::Periodic(cfg) => {
                    table.extend(periodic_suite(&cfg, cli.tol.unwrap_or(1e-12)));
                    if file.build.is_some() {
                        let built = build_from(&file, LoadedConfig::Periodic(cfg), None, cli.grid)?;
                        table.extend(builder_suite(&built));
                        table.extend(artifact_suite(&built.to_artifact(&path.display().to_string())));
                        if with_correspondence {
                            let c = file.checks();
                            let s = SuiteSettings { probes: c.probes, pairs: c.pairs, seed: cli.seed };
                            table.extend(correspondence_suite(&built, &s)?);
                        }
                    }
                }
            }
        }
    }
    if input.is_none() && random.is_none() {
        return Err(Error::InvalidInput("check needs an input file or --random".into()));
    }
    let text = serde_json::to_string_pretty(&table)?;
    if as_json {
        writeln!(out, "{text}")?;
    } else {
        write!(out, "{}", table.render())?;
    }
    if let Some(dir) = &cli.out {
        write_file(dir, "check.json", &text)?;
    }
    Ok(if table.all_passed() { EXIT_OK } else { EXIT_CHECK_FAILED })
}

fn dispatch(cli: &Cli, out: &mut dyn Write) -> Result<i32> {
    match &cli.command {
        Command::Forces { config } => forces(cli, config, out),
        Command::Solve { config, freeze } => solve(cli, config, freeze.as_deref(), out),
        Command::Build { config, t } => build(cli, config, *t, out),
        Command::Classical { name, a } => classical(cli, name, *a, out),
        Command::Correspond { config, t, probes, pairs } => correspond(cli, config, *t, *probes, *pairs, out),
        Command::Check { input, random, correspondence, json } => {
            check(cli, input.as_deref(), *random, *correspondence, *json, out)
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = if e.use_stderr() { write!(err, "{e}") } else { write!(out, "{e}") };
            return code;
        }
    };
    match dispatch(&cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
