//! Finite and periodic vortex configurations and their forces.

mod generators;
mod solve;

pub use generators::{
    dihedral, regular_lane, staggered_street, three_lane, uneven_street, vonkarman_street, UNEVEN_STREET_C0,
};
pub use solve::{balance_solve, force_rank, non_degenerate, Gauge, WeightContinuation, CONTINUATION_STEP};

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Balance tolerance on `max |F_i|`.
pub const BALANCE_TOL: f64 = 1e-10;

const COINCIDENCE_TOL: f64 = 1e-12;

fn check_points(points: &[C]) -> Result<()> {
    for i in 0..points.len() {
        if !points[i].is_finite() {
            return Err(Error::InvalidInput(format!("point {i} is not finite")));
        }
        for j in 0..i {
            let scale = 1.0f64.max(points[i].norm()).max(points[j].norm());
            if (points[i] - points[j]).norm() <= COINCIDENCE_TOL * scale {
                return Err(Error::CoincidentPoints { i: j, j: i });
            }
        }
    }
    Ok(())
}

fn check_weights(weights: &[f64], n: usize) -> Result<()> {
    if weights.len() != n {
        return Err(Error::InvalidInput(format!("{} weights for {n} points", weights.len())));
    }
    if let Some(i) = weights.iter().position(|w| *w == 0.0 || !w.is_finite()) {
        return Err(Error::InvalidInput(format!("weight {i} must be finite and nonzero")));
    }
    Ok(())
}

/// Vortices at distinct points `p_i` with nonzero real weights `c_i`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteConfiguration {
    points: Vec<C>,
    weights: Vec<f64>,
}

impl FiniteConfiguration {
    pub fn new(points: Vec<C>, weights: Vec<f64>) -> Result<Self> {
        if points.len() < 2 {
            return Err(Error::InvalidInput("a finite configuration needs at least 2 points".into()));
        }
        check_weights(&weights, points.len())?;
        check_points(&points)?;
        Ok(FiniteConfiguration { points, weights })
    }

    pub fn points(&self) -> &[C] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `Σ_{i<j} c_i c_j`.
    pub fn pair_sum(&self) -> f64 {
        let w = &self.weights;
        let mut s = 0.0;
        for i in 0..w.len() {
            for j in i + 1..w.len() {
                s += w[i] * w[j];
            }
        }
        s
    }
}

/// Which asymptotic regime a periodic configuration belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    /// `Σ c_i = 0`; equal velocities at both ends.
    A,
    /// `Σ c_i + 2 c_0 = 0`; opposite velocities at both ends.
    B,
}

/// Nonzero points `p_i` with weights `c_i`, a constant `c_0` and a case tag.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicConfiguration {
    points: Vec<C>,
    weights: Vec<f64>,
    c0: C,
    case: Case,
}

impl PeriodicConfiguration {
    pub fn new(points: Vec<C>, weights: Vec<f64>, c0: C, case: Case) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("a periodic configuration needs at least 1 point".into()));
        }
        check_weights(&weights, points.len())?;
        if let Some(i) = points.iter().position(|p| p.norm() == 0.0) {
            return Err(Error::InvalidInput(format!("point {i} is zero")));
        }
        check_points(&points)?;
        if c0.norm() == 0.0 || !c0.is_finite() {
            return Err(Error::ParameterOutOfRange("c0 must be finite and nonzero".into()));
        }
        let sum: f64 = weights.iter().sum();
        let scale = 1.0f64.max(weights.iter().map(|w| w.abs()).sum());
        match case {
            Case::A => {
                if sum.abs() > 1e-12 * scale {
                    return Err(Error::ParameterOutOfRange(format!("case a needs sum of weights 0, got {sum}")));
                }
            }
            Case::B => {
                if c0.im.abs() > 1e-12 {
                    return Err(Error::ParameterOutOfRange(format!("case b needs real c0, got Im c0 = {}", c0.im)));
                }
                if (sum + 2.0 * c0.re).abs() > 1e-12 * scale {
                    return Err(Error::ParameterOutOfRange(format!(
                        "case b needs sum of weights + 2 c0 = 0, got {}",
                        sum + 2.0 * c0.re
                    )));
                }
            }
        }
        Ok(PeriodicConfiguration { points, weights, c0, case })
    }

    pub fn points(&self) -> &[C] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn c0(&self) -> C {
        self.c0
    }

    pub fn case(&self) -> Case {
        self.case
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Limit positions `q_j = i log p_j` in the periodic plane.
    pub fn q_points(&self) -> Vec<C> {
        self.points.iter().map(|p| C::i() * p.ln()).collect()
    }

    /// Builds the configuration from positions `q_j`, using `p_j = exp(-i q_j)`.
    pub fn from_q(q: &[C], weights: Vec<f64>, c0: C, case: Case) -> Result<Self> {
        PeriodicConfiguration::new(q.iter().map(|q| (-C::i() * q).exp()).collect(), weights, c0, case)
    }
}

/// Forces, their size and the measured rank of the force Jacobian.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ForceReport {
    pub forces: Vec<C>,
    pub max_abs_force: f64,
    pub jacobian_rank: usize,
    pub expected_rank: usize,
}

impl ForceReport {
    pub fn new(forces: Vec<C>, jacobian_rank: usize, expected_rank: usize) -> Self {
        let max_abs_force = forces.iter().map(|f| f.norm()).fold(0.0, f64::max);
        ForceReport { forces, max_abs_force, jacobian_rank, expected_rank }
    }

    pub fn non_degenerate(&self) -> bool {
        self.jacobian_rank == self.expected_rank
    }
}

/// `F_i = Σ_{j≠i} c_i c_j / (p_i − p_j)`.
pub fn finite_forces(cfg: &FiniteConfiguration) -> Vec<C> {
    finite_forces_raw(&cfg.points, &cfg.weights)
}

fn finite_forces_raw(p: &[C], c: &[f64]) -> Vec<C> {
    (0..p.len())
        .map(|i| (0..p.len()).filter(|&j| j != i).map(|j| c[i] * c[j] / (p[i] - p[j])).sum())
        .collect()
}

/// Residuals `(Σ F_i, Σ p_i F_i − Σ_{i<j} c_i c_j)`.
pub fn finite_identities(cfg: &FiniteConfiguration) -> (C, C) {
    let f = finite_forces(cfg);
    let sum: C = f.iter().sum();
    let moment: C = f.iter().zip(&cfg.points).map(|(f, p)| f * p).sum();
    (sum, moment - cfg.pair_sum())
}

/// `F_i = Σ_{j≠i} c_i c_j (p_i + p_j)/(p_i − p_j) + 2 c_i c_0` (the last term in case a only).
pub fn periodic_forces(cfg: &PeriodicConfiguration) -> Vec<C> {
    periodic_forces_raw(&cfg.points, &cfg.weights, cfg.c0, cfg.case)
}

fn periodic_forces_raw(p: &[C], c: &[f64], c0: C, case: Case) -> Vec<C> {
    (0..p.len())
        .map(|i| {
            let s: C = (0..p.len())
                .filter(|&j| j != i)
                .map(|j| c[i] * c[j] * (p[i] + p[j]) / (p[i] - p[j]))
                .sum();
            match case {
                Case::A => s + 2.0 * c[i] * c0,
                Case::B => s,
            }
        })
        .collect()
}

/// `Σ F_i` for a periodic configuration.
pub fn periodic_identity(cfg: &PeriodicConfiguration) -> C {
    periodic_forces(cfg).iter().sum()
}

/// Periodic forces written through `q_j`, with `p_j = exp(−i q_j)`:
/// `F_i = i Σ_{j≠i} c_i c_j cot((q_i − q_j)/2) + 2 c_i c_0` (case a).
pub fn periodic_forces_q(q: &[C], weights: &[f64], c0: C, case: Case) -> Result<Vec<C>> {
    check_weights(weights, q.len())?;
    let n = q.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut s = C::new(0.0, 0.0);
        for j in 0..n {
            if j == i {
                continue;
            }
            let half = 0.5 * (q[i] - q[j]);
            let sin = half.sin();
            if sin.norm() < COINCIDENCE_TOL {
                return Err(Error::CoincidentPoints { i: i.min(j), j: i.max(j) });
            }
            s += C::i() * weights[i] * weights[j] * half.cos() / sin;
        }
        out.push(match case {
            Case::A => s + 2.0 * weights[i] * c0,
            Case::B => s,
        });
    }
    Ok(out)
}

/// Common interface used by the balance solver.
pub trait Configuration: Clone {
    fn points(&self) -> &[C];
    fn with_points(&self, points: Vec<C>) -> Result<Self>;
    fn forces_at(&self, points: &[C]) -> Vec<C>;
    /// Rank of the force Jacobian at a non-degenerate balanced configuration.
    fn expected_rank(&self) -> usize;
    fn default_gauge(&self) -> Gauge;

    fn forces(&self) -> Vec<C> {
        self.forces_at(self.points())
    }
}

impl Configuration for FiniteConfiguration {
    fn points(&self) -> &[C] {
        &self.points
    }
    fn with_points(&self, points: Vec<C>) -> Result<Self> {
        FiniteConfiguration::new(points, self.weights.clone())
    }
    fn forces_at(&self, points: &[C]) -> Vec<C> {
        finite_forces_raw(points, &self.weights)
    }
    fn expected_rank(&self) -> usize {
        self.points.len().saturating_sub(2)
    }
    fn default_gauge(&self) -> Gauge {
        let n = self.points.len();
        Gauge { frozen: vec![n - 2, n - 1] }
    }
}

impl Configuration for PeriodicConfiguration {
    fn points(&self) -> &[C] {
        &self.points
    }
    fn with_points(&self, points: Vec<C>) -> Result<Self> {
        PeriodicConfiguration::new(points, self.weights.clone(), self.c0, self.case)
    }
    fn forces_at(&self, points: &[C]) -> Vec<C> {
        periodic_forces_raw(points, &self.weights, self.c0, self.case)
    }
    fn expected_rank(&self) -> usize {
        self.points.len() - 1
    }
    fn default_gauge(&self) -> Gauge {
        Gauge { frozen: vec![self.points.len() - 1] }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C {
        C::new(re, im)
    }

    #[test]
    fn two_point_forces_by_hand() {
        let cfg = FiniteConfiguration::new(vec![c(0.0, 0.0), c(1.0, 0.0)], vec![1.0, 1.0]).unwrap();
        let f = finite_forces(&cfg);
        assert_eq!(f, vec![c(-1.0, 0.0), c(1.0, 0.0)]);
        let (s, m) = finite_identities(&cfg);
        assert_eq!((s, m), (c(0.0, 0.0), c(0.0, 0.0)));
    }

    #[test]
    fn constructor_checks() {
        assert!(matches!(
            FiniteConfiguration::new(vec![c(1.0, 0.0), c(1.0, 0.0)], vec![1.0, 1.0]),
            Err(Error::CoincidentPoints { .. })
        ));
        assert!(FiniteConfiguration::new(vec![c(1.0, 0.0), c(2.0, 0.0)], vec![1.0, 0.0]).is_err());
        assert!(PeriodicConfiguration::new(vec![c(0.0, 0.0)], vec![1.0], c(-0.5, 0.0), Case::B).is_err());
        assert!(PeriodicConfiguration::new(vec![c(1.0, 0.0), c(2.0, 0.0)], vec![1.0, 1.0], c(0.5, 0.0), Case::A).is_err());
        assert!(matches!(
            PeriodicConfiguration::new(vec![c(1.0, 0.0), c(2.0, 0.0)], vec![1.0, 1.0], c(-1.0, 0.1), Case::B),
            Err(Error::ParameterOutOfRange(_))
        ));
        assert!(PeriodicConfiguration::new(vec![c(1.0, 0.0), c(2.0, 0.0)], vec![1.0, 1.0], c(-1.0, 0.0), Case::B).is_ok());
    }

    #[test]
    fn closed_form_street_is_balanced() {
        let c0 = 0.25;
        let r = (2.0 * c0 - 1.0) / (2.0 * c0 + 1.0);
        let cfg = PeriodicConfiguration::new(vec![c(1.0, 0.0), c(r, 0.0)], vec![1.0, -1.0], c(c0, 0.0), Case::A).unwrap();
        for f in periodic_forces(&cfg) {
            assert!(f.norm() < 1e-15);
        }
    }

    #[test]
    fn roots_of_unity_lane_is_balanced() {
        for n in 1..7 {
            let p: Vec<C> = (0..n).map(|j| C::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)).collect();
            let cfg = PeriodicConfiguration::new(p, vec![1.0; n], c(-(n as f64) / 2.0, 0.0), Case::B).unwrap();
            for f in periodic_forces(&cfg) {
                assert!(f.norm() < 1e-13);
            }
        }
    }

    #[test]
    fn cotangent_form_balances_staggered_street() {
        let q = [c(0.0, 0.0), c(-PI, -(3f64).ln())];
        let f = periodic_forces_q(&q, &[1.0, -1.0], c(0.25, 0.0), Case::A).unwrap();
        assert!(f.iter().all(|f| f.norm() < 1e-14));
    }

    #[test]
    fn cotangent_form_sign_oracle() {
        // Two unit vortices with p = (1, -1) and c0 = 1 in case a:
        // F_1 = c1 c2 (1 - 1)/(1 + 1) + 2 c0 = 2. With q = (0, -π), cot(π/2) = 0, so the cotangent term vanishes too.
        let q = [c(0.0, 0.0), c(-PI, 0.0)];
        let f = periodic_forces_q(&q, &[1.0, 1.0], c(1.0, 0.0), Case::A).unwrap();
        assert!((f[0] - 2.0).norm() < 1e-14);
        // A generic pair separates the sign: p2 = exp(-i q2) with q2 = -1 - 0.3i.
        let q = [c(0.0, 0.0), c(-1.0, -0.3)];
        let cfg = PeriodicConfiguration::from_q(&q, vec![1.0, 1.0], c(-1.0, 0.0), Case::B).unwrap();
        let direct = periodic_forces(&cfg);
        let viaq = periodic_forces_q(&q, &[1.0, 1.0], c(-1.0, 0.0), Case::B).unwrap();
        assert!((direct[0] - viaq[0]).norm() < 1e-12);
    }

    #[test]
    fn coincident_q_rejected() {
        let q = [c(0.0, 0.0), c(2.0 * PI, 0.0)];
        assert!(matches!(periodic_forces_q(&q, &[1.0, 1.0], c(1.0, 0.0), Case::A), Err(Error::CoincidentPoints { .. })));
    }
}
