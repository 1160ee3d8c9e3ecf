use std::fmt;
use std::str::FromStr;

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use super::forms::{FormTriple, Forms, SingularKind};
use super::rational::RationalFunction;
use crate::error::{Error, Result};
use crate::numeric::Polynomial;

/// Gauss map `g` and `ω = R(z) dz / sqrt(Q(z))` on a domain of the plane minus punctures.
#[derive(Debug, Clone)]
pub struct WeierstrassData {
    g: RationalFunction,
    r: RationalFunction,
    q: Polynomial,
    punctures: Vec<C>,
    domain_hint: String,
    g_r: RationalFunction,
    r_over_g: RationalFunction,
    singular: Vec<(C, SingularKind)>,
}

impl WeierstrassData {
    pub fn new(g: RationalFunction, r: RationalFunction, q: Polynomial, punctures: Vec<C>, domain_hint: &str) -> Result<Self> {
        if q.is_zero() {
            return Err(Error::InvalidInput("radicand is identically zero".into()));
        }
        let g_r = g.mul(&r);
        let r_over_g = r.div(&g)?;
        let mut singular: Vec<(C, SingularKind)> = Vec::new();
        if q.degree() > 0 {
            singular.extend(q.roots().into_iter().map(|z| (z, SingularKind::Branch)));
        }
        for f in [&r, &g_r, &r_over_g] {
            for p in f.poles() {
                if !singular.iter().any(|(s, _)| (s - p).norm() < 1e-9) {
                    singular.push((p, SingularKind::Pole));
                }
            }
        }
        Ok(WeierstrassData { g, r, q, punctures, domain_hint: domain_hint.to_string(), g_r, r_over_g, singular })
    }

    pub fn g(&self) -> &RationalFunction {
        &self.g
    }

    pub fn r(&self) -> &RationalFunction {
        &self.r
    }

    pub fn q(&self) -> &Polynomial {
        &self.q
    }

    pub fn punctures(&self) -> &[C] {
        &self.punctures
    }

    pub fn domain_hint(&self) -> &str {
        &self.domain_hint
    }

    /// Roots of `Q`.
    pub fn branch_points(&self) -> Vec<C> {
        if self.q.degree() == 0 {
            Vec::new()
        } else {
            self.q.roots()
        }
    }

    /// Poles of `ω/dz`.
    pub fn omega_poles(&self) -> Vec<C> {
        self.r.poles()
    }

    /// Orders `(ord ω, ord g)` in a local uniformizer at each zero or pole of `g` inside `|z| < radius`,
    /// punctures excluded. Matching data has `ord ω = |ord g|` at every entry.
    pub fn zero_pole_orders(&self, radius: f64) -> Vec<(C, i32, i32)> {
        let mut pts: Vec<(C, i32)> = Vec::new();
        for z in self.g.zeros() {
            pts.push((z, self.g.numerator().root_multiplicity(z, 1e-9) as i32));
        }
        for z in self.g.poles() {
            pts.push((z, -(self.g.denominator().root_multiplicity(z, 1e-9) as i32)));
        }
        let mut out = Vec::new();
        for (z, ord_g) in pts {
            if z.norm() >= radius || self.punctures.iter().any(|p| (p - z).norm() < 1e-9) {
                continue;
            }
            let ord_r = self.r.numerator().root_multiplicity(z, 1e-9) as i32
                - self.r.denominator().root_multiplicity(z, 1e-9) as i32;
            let ord_q = if self.q.degree() > 0 { self.q.root_multiplicity(z, 1e-9) as i32 } else { 0 };
            let e = if ord_q % 2 == 1 { 2 } else { 1 };
            // ω/dz ~ (z−a)^{ord_r − ord_q/2}; with ζ^e = z − a, dz = e ζ^{e−1} dζ.
            let ord_omega = e * ord_r - (e * ord_q) / 2 + (e - 1);
            out.push((z, ord_omega, e * ord_g));
        }
        out
    }

    /// Fails unless ω vanishes to the matching order at every zero and pole of `g` inside `|z| < radius`.
    pub fn check_zero_pole_matching(&self, radius: f64) -> Result<()> {
        for (z, ow, og) in self.zero_pole_orders(radius) {
            if ow != og.abs() {
                return Err(Error::InvalidInput(format!(
                    "ω has order {ow} at {z} where g has order {og}"
                )));
            }
        }
        Ok(())
    }
}

impl Forms for WeierstrassData {
    fn is_multivalued(&self) -> bool {
        self.q.degree() > 0
    }

    fn radicand(&self, z: C) -> C {
        self.q.eval(z)
    }

    fn gauss(&self, z: C) -> C {
        self.g.eval(z)
    }

    fn integrands(&self, z: C, root: C) -> FormTriple {
        FormTriple::new(self.r.eval(z) / root, self.g_r.eval(z) / root, self.r_over_g.eval(z) / root)
    }

    fn singularities(&self) -> Vec<(C, SingularKind)> {
        self.singular.clone()
    }
}

/// Names of the catalogued surfaces.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ClassicalName {
    #[serde(rename = "scherk")]
    Scherk,
    #[serde(rename = "karcher")]
    Karcher,
    #[serde(rename = "schwarzP")]
    SchwarzP,
    #[serde(rename = "schwarzH")]
    SchwarzH,
}

impl ClassicalName {
    pub const ALL: [ClassicalName; 4] =
        [ClassicalName::Scherk, ClassicalName::Karcher, ClassicalName::SchwarzP, ClassicalName::SchwarzH];

    pub fn default_parameter(self) -> Option<f64> {
        match self {
            ClassicalName::Karcher | ClassicalName::SchwarzH => Some(0.5),
            _ => None,
        }
    }

    /// Rank of the period lattice of the vortex domain.
    pub fn expected_lattice_rank(self) -> usize {
        match self {
            ClassicalName::Scherk | ClassicalName::Karcher => 1,
            ClassicalName::SchwarzP | ClassicalName::SchwarzH => 2,
        }
    }
}

impl fmt::Display for ClassicalName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassicalName::Scherk => "scherk",
            ClassicalName::Karcher => "karcher",
            ClassicalName::SchwarzP => "schwarzP",
            ClassicalName::SchwarzH => "schwarzH",
        })
    }
}

impl FromStr for ClassicalName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "scherk" => Ok(ClassicalName::Scherk),
            "karcher" => Ok(ClassicalName::Karcher),
            "schwarzp" | "schwarz_p" | "p" => Ok(ClassicalName::SchwarzP),
            "schwarzh" | "schwarz_h" | "h" => Ok(ClassicalName::SchwarzH),
            _ => Err(Error::InvalidInput(format!("unknown surface {s:?}"))),
        }
    }
}

/// Weierstrass data of the catalogued surfaces over the unit disk, all with `g = 1/z`.
///
/// The Schwarz P form carries an extra factor `i`, so that `ω` is imaginary on the unit circle and the circle
/// is a level curve of `x3`, like for the other three entries.
pub fn classical_data(name: ClassicalName, a: Option<f64>) -> Result<WeierstrassData> {
    let g = RationalFunction::new(Polynomial::one(), Polynomial::real(&[0.0, 1.0]))?;
    let z = Polynomial::real(&[0.0, 1.0]);
    let need_a = |a: Option<f64>| -> Result<f64> {
        let a = a.unwrap_or(0.5);
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::ParameterOutOfRange(format!("{name} needs 0 < a < 1, got {a}")));
        }
        Ok(a)
    };
    match name {
        ClassicalName::Scherk => {
            let r = RationalFunction::new(z, Polynomial::real(&[1.0, 0.0, 6.0, 0.0, 1.0]))?;
            let s = 2f64.sqrt() - 1.0;
            WeierstrassData::new(
                g,
                r,
                Polynomial::one(),
                vec![C::new(0.0, s), C::new(0.0, -s)],
                "unit disk minus ±i(√2−1)",
            )
        }
        ClassicalName::Karcher => {
            let a = need_a(a)?;
            let q = &Polynomial::real(&[a * a, 0.0, 1.0]) * &Polynomial::real(&[1.0 / (a * a), 0.0, 1.0]);
            WeierstrassData::new(g, RationalFunction::constant(C::new(1.0, 0.0)), q, vec![C::new(0.0, 0.0)], "double cover of the unit disk minus 0")
        }
        ClassicalName::SchwarzP => {
            let q = Polynomial::real(&[1.0, 0.0, 0.0, 0.0, -14.0, 0.0, 0.0, 0.0, 1.0]);
            WeierstrassData::new(g, RationalFunction::polynomial(z.scale(C::i())), q, vec![], "double cover of the unit disk")
        }
        ClassicalName::SchwarzH => {
            let a = need_a(a)?;
            let a3 = a.powi(3);
            let q = &(&z * &Polynomial::real(&[a3, 0.0, 0.0, 1.0])) * &Polynomial::real(&[1.0 / a3, 0.0, 0.0, 1.0]);
            WeierstrassData::new(g, RationalFunction::polynomial(z), q, vec![], "double cover of the unit disk")
        }
    }
}

/// Unit normal from the stereographic Gauss map value.
pub fn gauss_map(g: C) -> [f64; 3] {
    if !g.is_finite() {
        return [0.0, 0.0, 1.0];
    }
    let m = g.norm_sqr();
    let d = m + 1.0;
    [2.0 * g.re / d, 2.0 * g.im / d, (m - 1.0) / d]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sorted(mut v: Vec<C>) -> Vec<C> {
        v.sort_by(|a, b| (a.im, a.re).partial_cmp(&(b.im, b.re)).unwrap());
        v
    }

    #[test]
    fn gauss_map_values() {
        assert_eq!(gauss_map(C::new(1.0, 0.0)), [1.0, 0.0, 0.0]);
        assert_eq!(gauss_map(C::new(f64::INFINITY, 0.0)), [0.0, 0.0, 1.0]);
        let n = gauss_map(C::new(2.0, 0.0));
        assert!((n[0] - 0.8).abs() < 1e-15 && n[1] == 0.0 && (n[2] - 0.6).abs() < 1e-15);
    }

    #[test]
    fn scherk_poles() {
        let d = classical_data(ClassicalName::Scherk, None).unwrap();
        let s = 2f64.sqrt();
        let expect = sorted(vec![C::new(0.0, -(s + 1.0)), C::new(0.0, -(s - 1.0)), C::new(0.0, s - 1.0), C::new(0.0, s + 1.0)]);
        let poles = sorted(d.omega_poles());
        for (a, b) in poles.iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }
        assert_eq!(poles.iter().filter(|p| p.norm() < 1.0).count(), 2);
    }

    #[test]
    fn karcher_branch_points() {
        let d = classical_data(ClassicalName::Karcher, Some(0.5)).unwrap();
        let expect = sorted(vec![C::new(0.0, -2.0), C::new(0.0, -0.5), C::new(0.0, 0.5), C::new(0.0, 2.0)]);
        for (a, b) in sorted(d.branch_points()).iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }
        assert!(classical_data(ClassicalName::Karcher, Some(1.0)).is_err());
    }

    #[test]
    fn schwarz_h_branch_points() {
        let a: f64 = 0.5;
        let d = classical_data(ClassicalName::SchwarzH, Some(a)).unwrap();
        let b = d.branch_points();
        assert_eq!(b.len(), 7);
        for z in &b {
            let ok = z.norm() < 1e-12 || (z.powi(3) + a.powi(3)).norm() < 1e-10 || (z.powi(3) + a.powi(-3)).norm() < 1e-9;
            assert!(ok, "{z}");
        }
    }

    #[test]
    fn zero_pole_matching_for_catalog() {
        for name in ClassicalName::ALL {
            let d = classical_data(name, None).unwrap();
            d.check_zero_pole_matching(1.0).unwrap();
        }
        let h = classical_data(ClassicalName::SchwarzH, None).unwrap();
        assert_eq!(h.zero_pole_orders(1.0), vec![(C::new(0.0, 0.0), 2, -2)]);
    }

    #[test]
    fn unmatched_data_detected() {
        let g = RationalFunction::new(Polynomial::one(), Polynomial::real(&[0.0, 1.0])).unwrap();
        let d = WeierstrassData::new(g, RationalFunction::constant(C::new(1.0, 0.0)), Polynomial::one(), vec![], "disk").unwrap();
        assert!(d.check_zero_pole_matching(1.0).is_err());
    }
}
