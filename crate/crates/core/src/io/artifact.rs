use std::collections::BTreeMap;
use std::io::{Read, Write};

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Current JSON schema version.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    Boundary,
    Streamline,
}

impl CurveKind {
    pub fn as_str(self) -> &'static str {
        match self {
            CurveKind::Boundary => "boundary",
            CurveKind::Streamline => "streamline",
        }
    }
}

/// A sampled curve in the vortex plane; `level` is the value of `u` along it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub component_id: usize,
    pub kind: CurveKind,
    pub level: f64,
    pub points: Vec<C>,
}

impl Curve {
    pub fn length(&self) -> f64 {
        self.points.windows(2).map(|w| (w[1] - w[0]).norm()).sum()
    }

    /// Distance between the endpoints relative to the length.
    pub fn relative_gap(&self) -> f64 {
        match (self.points.first(), self.points.last()) {
            (Some(a), Some(b)) => (a - b).norm() / self.length().max(f64::MIN_POSITIVE),
            _ => 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocitySample {
    pub point: C,
    /// `v_x + i v_y` with `v = (u_y, −u_x)`, i.e. `−i·conj(2u_z)`.
    pub velocity: C,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StreamSample {
    pub point: C,
    pub u: f64,
}

/// Boundary curves, streamlines and measured quantities of a vortex domain `(Ω, u)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainArtifact {
    pub schema: u32,
    pub source: String,
    pub curves: Vec<Curve>,
    /// Translation periods of the domain (0, 1 or 2 vectors).
    pub periods: Vec<C>,
    /// Circulation of each boundary component, in component order.
    pub circulations: Vec<f64>,
    /// Value of `u` on each boundary component.
    pub boundary_values: Vec<f64>,
    pub velocity_plus: Option<C>,
    pub velocity_minus: Option<C>,
    pub velocity_samples: Vec<VelocitySample>,
    pub stream_samples: Vec<StreamSample>,
    pub report: BTreeMap<String, serde_json::Value>,
}

impl DomainArtifact {
    pub fn new(source: &str) -> Self {
        DomainArtifact {
            schema: SCHEMA_VERSION,
            source: source.to_string(),
            curves: Vec::new(),
            periods: Vec::new(),
            circulations: Vec::new(),
            boundary_values: Vec::new(),
            velocity_plus: None,
            velocity_minus: None,
            velocity_samples: Vec::new(),
            stream_samples: Vec::new(),
            report: BTreeMap::new(),
        }
    }

    pub fn boundaries(&self) -> impl Iterator<Item = &Curve> {
        self.curves.iter().filter(|c| c.kind == CurveKind::Boundary)
    }

    pub fn streamlines(&self) -> impl Iterator<Item = &Curve> {
        self.curves.iter().filter(|c| c.kind == CurveKind::Streamline)
    }

    pub fn record<T: Serialize>(&mut self, key: &str, value: T) {
        self.report.insert(key.to_string(), serde_json::to_value(value).expect("serializable report entry"));
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let a: DomainArtifact = serde_json::from_str(s)?;
        if a.schema != SCHEMA_VERSION {
            return Err(Error::InvalidInput(format!("unsupported artifact schema {}", a.schema)));
        }
        Ok(a)
    }

    /// Writes `component_id,kind,level,x,y` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(["component_id", "kind", "level", "x", "y"])?;
        for c in &self.curves {
            for p in &c.points {
                wr.write_record([
                    c.component_id.to_string(),
                    c.kind.as_str().to_string(),
                    format!("{:.16e}", c.level),
                    format!("{:.16e}", p.re),
                    format!("{:.16e}", p.im),
                ])?;
            }
        }
        wr.flush()?;
        Ok(())
    }

    /// Reads curves written by [`DomainArtifact::write_csv`]; rows of one component must be contiguous.
    pub fn read_csv_curves<R: Read>(r: R) -> Result<Vec<Curve>> {
        #[derive(Deserialize)]
        struct Row {
            component_id: usize,
            kind: CurveKind,
            level: f64,
            x: f64,
            y: f64,
        }
        let mut rd = csv::Reader::from_reader(r);
        let mut curves: Vec<Curve> = Vec::new();
        for row in rd.deserialize() {
            let row: Row = row?;
            match curves.last_mut() {
                Some(c) if c.component_id == row.component_id && c.kind == row.kind => c.points.push(C::new(row.x, row.y)),
                _ => curves.push(Curve {
                    component_id: row.component_id,
                    kind: row.kind,
                    level: row.level,
                    points: vec![C::new(row.x, row.y)],
                }),
            }
        }
        Ok(curves)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> DomainArtifact {
        let mut a = DomainArtifact::new("test");
        a.curves.push(Curve {
            component_id: 0,
            kind: CurveKind::Boundary,
            level: 0.1,
            points: vec![C::new(0.1, 0.2), C::new(1.0 / 3.0, -2.0f64.sqrt()), C::new(0.1, 0.2)],
        });
        a.curves.push(Curve { component_id: 1, kind: CurveKind::Streamline, level: -1e-300, points: vec![C::new(5e-324, 1e300)] });
        a.periods.push(C::new(2.0 * std::f64::consts::PI, 0.0));
        a.record("check", true);
        a
    }

    #[test]
    fn csv_round_trip_is_exact() {
        let a = sample();
        let mut buf = Vec::new();
        a.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("component_id,kind,level,x,y"));
        let curves = DomainArtifact::read_csv_curves(&buf[..]).unwrap();
        assert_eq!(curves, a.curves);
    }

    #[test]
    fn json_round_trip() {
        let a = sample();
        let s = a.to_json().unwrap();
        assert!(s.contains("\"schema\": 1"));
        assert_eq!(DomainArtifact::from_json(&s).unwrap(), a);
        let bad = s.replace("\"schema\": 1", "\"schema\": 2");
        assert!(DomainArtifact::from_json(&bad).is_err());
    }
}
