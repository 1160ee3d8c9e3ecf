//! JSON configuration files.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::builder::BuildSettings;
use crate::configurations::{Case, FiniteConfiguration, Gauge, PeriodicConfiguration};
use crate::error::{Error, Result};
use crate::numeric::NewtonOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConfigKind {
    Finite,
    Periodic,
}

/// Newton overrides and the gauge.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_iter: Option<usize>,
    /// Indices of points held fixed.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frozen: Option<Vec<usize>>,
}

/// Builder parameters.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BuildSection {
    pub t: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
}

/// Probe counts and tolerances of the check suites.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChecksSection {
    pub probes: usize,
    pub pairs: usize,
    pub tol: f64,
}

impl Default for ChecksSection {
    fn default() -> Self {
        ChecksSection { probes: 100, pairs: 200, tol: 1e-6 }
    }
}

/// A configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub kind: ConfigKind,
    pub points: Vec<[f64; 2]>,
    pub weights: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c0: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<Case>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<SolverSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub build: Option<BuildSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<ChecksSection>,
}

/// A validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum LoadedConfig {
    Finite(FiniteConfiguration),
    Periodic(PeriodicConfiguration),
}

fn complex(v: &[f64; 2]) -> C {
    C::new(v[0], v[1])
}

fn pair(z: C) -> [f64; 2] {
    [z.re, z.im]
}

impl ConfigFile {
    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::InvalidInput(format!("schema: {e}")))
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))?;
        ConfigFile::from_json(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Validates the configuration against the type invariants.
    pub fn load(&self) -> Result<LoadedConfig> {
        let points: Vec<C> = self.points.iter().map(complex).collect();
        match self.kind {
            ConfigKind::Finite => {
                if self.c0.is_some() || self.case.is_some() {
                    return Err(Error::InvalidInput("schema: c0 and case apply to periodic configurations only".into()));
                }
                Ok(LoadedConfig::Finite(FiniteConfiguration::new(points, self.weights.clone())?))
            }
            ConfigKind::Periodic => {
                let c0 = self.c0.as_ref().ok_or_else(|| Error::InvalidInput("schema: periodic needs c0".into()))?;
                let case = self.case.ok_or_else(|| Error::InvalidInput("schema: periodic needs case".into()))?;
                Ok(LoadedConfig::Periodic(PeriodicConfiguration::new(points, self.weights.clone(), complex(c0), case)?))
            }
        }
    }

    pub fn from_finite(cfg: &FiniteConfiguration) -> Self {
        ConfigFile {
            kind: ConfigKind::Finite,
            points: cfg.points().iter().copied().map(pair).collect(),
            weights: cfg.weights().to_vec(),
            c0: None,
            case: None,
            solver: None,
            build: None,
            checks: None,
        }
    }

    pub fn from_periodic(cfg: &PeriodicConfiguration) -> Self {
        ConfigFile {
            kind: ConfigKind::Periodic,
            points: cfg.points().iter().copied().map(pair).collect(),
            weights: cfg.weights().to_vec(),
            c0: Some(pair(cfg.c0())),
            case: Some(cfg.case()),
            solver: None,
            build: None,
            checks: None,
        }
    }

    /// Copy with new points and the other sections kept.
    pub fn with_points(&self, points: &[C]) -> Self {
        ConfigFile { points: points.iter().copied().map(pair).collect(), ..self.clone() }
    }

    pub fn newton_options(&self, tol: Option<f64>) -> NewtonOptions {
        let mut o = NewtonOptions::default();
        if let Some(s) = &self.solver {
            o.tol = s.tol.unwrap_or(o.tol);
            o.max_iter = s.max_iter.unwrap_or(o.max_iter);
        }
        if let Some(t) = tol {
            o.tol = t;
        }
        o
    }

    pub fn gauge(&self) -> Option<Gauge> {
        self.solver.as_ref().and_then(|s| s.frozen.clone()).map(|frozen| Gauge { frozen })
    }

    /// `t` and the coefficients `a_i`, if a build section is present.
    pub fn build_parameters(&self) -> Option<(f64, Option<Vec<C>>)> {
        self.build.as_ref().map(|b| (b.t, b.a.as_ref().map(|a| a.iter().map(complex).collect())))
    }

    pub fn build_settings(&self, grid: Option<usize>) -> BuildSettings {
        let mut s = BuildSettings::default();
        if let Some(b) = &self.build {
            s.samples = b.samples.unwrap_or(s.samples);
            s.grid = b.grid.unwrap_or(s.grid);
        }
        if let Some(g) = grid {
            s.grid = g;
        }
        s
    }

    pub fn checks(&self) -> ChecksSection {
        self.checks.clone().unwrap_or_default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const STREET: &str = r#"{
        "kind": "periodic",
        "points": [[1.0, 0.0], [-0.3333333333333333, 0.0]],
        "weights": [1.0, -1.0],
        "c0": [0.25, 0.0],
        "case": "a",
        "build": {"t": 0.05}
    }"#;

    #[test]
    fn parses_and_validates() {
        let f = ConfigFile::from_json(STREET).unwrap();
        assert!(matches!(f.load().unwrap(), LoadedConfig::Periodic(_)));
        assert_eq!(f.build_parameters().unwrap().0, 0.05);
        let back = ConfigFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn schema_errors_are_input_errors() {
        let zero = r#"{"kind": "finite", "points": [[0, 0], [1, 0]], "weights": [1.0, 0.0]}"#;
        let e = ConfigFile::from_json(zero).unwrap().load().unwrap_err();
        assert_eq!(e.exit_code(), 2);
        let unknown = r#"{"kind": "finite", "points": [], "weights": [], "colour": 1}"#;
        assert_eq!(ConfigFile::from_json(unknown).unwrap_err().exit_code(), 2);
        let missing = r#"{"kind": "periodic", "points": [[1, 0]], "weights": [1.0]}"#;
        assert_eq!(ConfigFile::from_json(missing).unwrap().load().unwrap_err().exit_code(), 2);
    }
}
