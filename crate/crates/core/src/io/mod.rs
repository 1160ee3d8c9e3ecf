//! Configuration files, domain artifacts and SVG output.

mod artifact;
mod config;
mod svg;

pub use artifact::{Curve, CurveKind, DomainArtifact, StreamSample, VelocitySample, SCHEMA_VERSION};
pub use config::{BuildSection, ChecksSection, ConfigFile, ConfigKind, LoadedConfig, SolverSection};
pub use svg::{render_svg, self_intersections, DEFAULT_TILES};
