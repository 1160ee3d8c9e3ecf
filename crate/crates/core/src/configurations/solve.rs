//! Balance solving, non-degeneracy and weight continuation.

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

use super::{Case, Configuration, FiniteConfiguration, ForceReport, PeriodicConfiguration, BALANCE_TOL};
use crate::error::{Error, Result};
use crate::numeric::{complex_rank, jacobian_fd, newton_solve, JacobianMethod, NewtonOptions, DEFAULT_FD_STEP, RANK_TOL};

/// Point indices held fixed while solving.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gauge {
    pub frozen: Vec<usize>,
}

impl Gauge {
    fn free(&self, n: usize) -> Result<Vec<usize>> {
        for &k in &self.frozen {
            if k >= n {
                return Err(Error::InvalidInput(format!("frozen index {k} out of range for {n} points")));
            }
        }
        Ok((0..n).filter(|k| !self.frozen.contains(k)).collect())
    }
}

/// Solves `F_i = 0` by Gauss–Newton over the points not frozen by the gauge.
///
/// All `n` force equations are kept; the redundancy coming from the force identities is absorbed by the
/// least-squares step. Without a gauge the default one is used.
pub fn balance_solve<T: Configuration>(seed: &T, gauge: Option<&Gauge>, opts: &NewtonOptions) -> Result<(T, ForceReport)> {
    let gauge = gauge.cloned().unwrap_or_else(|| seed.default_gauge());
    let n = seed.points().len();
    let free = gauge.free(n)?;
    let base = seed.points().to_vec();
    let opts = NewtonOptions { method: JacobianMethod::Holomorphic, ..*opts };
    let assemble = |x: &[C]| {
        let mut p = base.clone();
        for (k, &i) in free.iter().enumerate() {
            p[i] = x[k];
        }
        p
    };
    let x0: Vec<C> = free.iter().map(|&i| base[i]).collect();
    let report = newton_solve(|x| seed.forces_at(&assemble(x)), &x0, &opts)?;
    let solved = seed.with_points(assemble(&report.x))?;
    let forces = solved.forces();
    let (rank, _) = force_rank(&solved)?;
    Ok((solved.clone(), ForceReport::new(forces, rank, solved.expected_rank())))
}

/// Measured rank of the force Jacobian and whether it equals the non-degenerate value; no balance required.
pub fn force_rank<T: Configuration>(cfg: &T) -> Result<(usize, bool)> {
    let jac = jacobian_fd(|p| cfg.forces_at(p), cfg.points(), DEFAULT_FD_STEP, JacobianMethod::Holomorphic)?;
    let rank = complex_rank(&jac.dz, RANK_TOL)?;
    Ok((rank, rank == cfg.expected_rank()))
}

/// Rank of the full force Jacobian and whether it equals the non-degenerate value.
///
/// The configuration must be balanced to `max |F_i| ≤ 1e-8`.
pub fn non_degenerate<T: Configuration>(cfg: &T) -> Result<(usize, bool)> {
    let max = cfg.forces().iter().map(|f| f.norm()).fold(0.0, f64::max);
    if !(max <= 1e-8) {
        return Err(Error::InvalidInput(format!("configuration is not balanced: max |F| = {max:e}")));
    }
    force_rank(cfg)
}

/// Default weight step for [`WeightContinuation`].
pub const CONTINUATION_STEP: f64 = 0.05;

/// Re-solves a balanced configuration while its weights move towards a target.
///
/// The last weight (or `c0` in case b) is re-derived at each step so that a balanced configuration can exist.
#[derive(Debug, Clone)]
pub struct WeightContinuation<T> {
    pub current: T,
    pub target: Vec<f64>,
    pub step: f64,
    pub options: NewtonOptions,
}

/// Configurations whose weights can be changed while keeping the admissibility constraint.
pub trait Reweight: Configuration {
    fn weights(&self) -> &[f64];
    fn reweighted(&self, weights: &[f64]) -> Result<Self>;
}

impl Reweight for FiniteConfiguration {
    fn weights(&self) -> &[f64] {
        FiniteConfiguration::weights(self)
    }

    /// Keeps `Σ_{i<j} c_i c_j = 0` by solving for the last weight.
    fn reweighted(&self, weights: &[f64]) -> Result<Self> {
        let n = weights.len();
        let head = &weights[..n - 1];
        let s: f64 = head.iter().sum();
        let p: f64 = {
            let mut acc = 0.0;
            for i in 0..head.len() {
                for j in i + 1..head.len() {
                    acc += head[i] * head[j];
                }
            }
            acc
        };
        if s.abs() < 1e-14 {
            return Err(Error::ParameterOutOfRange("weights leave no admissible last weight".into()));
        }
        let mut w = head.to_vec();
        w.push(-p / s);
        FiniteConfiguration::new(self.points().to_vec(), w)
    }
}

impl Reweight for PeriodicConfiguration {
    fn weights(&self) -> &[f64] {
        PeriodicConfiguration::weights(self)
    }

    fn reweighted(&self, weights: &[f64]) -> Result<Self> {
        match self.case() {
            Case::A => {
                let n = weights.len();
                let mut w = weights[..n - 1].to_vec();
                w.push(-w.iter().sum::<f64>());
                PeriodicConfiguration::new(self.points().to_vec(), w, self.c0(), Case::A)
            }
            Case::B => {
                let c0 = -0.5 * weights.iter().sum::<f64>();
                PeriodicConfiguration::new(self.points().to_vec(), weights.to_vec(), C::new(c0, 0.0), Case::B)
            }
        }
    }
}

impl<T: Reweight> WeightContinuation<T> {
    pub fn new(start: T, target: Vec<f64>) -> Self {
        WeightContinuation { current: start, target, step: CONTINUATION_STEP, options: NewtonOptions::default() }
    }

    /// Runs to the target and returns every intermediate balanced configuration.
    pub fn run(mut self, gauge: Option<&Gauge>) -> Result<Vec<(T, ForceReport)>> {
        let start = self.current.weights().to_vec();
        if start.len() != self.target.len() {
            return Err(Error::InvalidInput("target weight count differs".into()));
        }
        let dist = start.iter().zip(&self.target).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let steps = ((dist / self.step).ceil() as usize).max(1);
        let mut out = Vec::with_capacity(steps);
        for k in 1..=steps {
            let s = k as f64 / steps as f64;
            let w: Vec<f64> = start.iter().zip(&self.target).map(|(a, b)| a + s * (b - a)).collect();
            let seed = self.current.reweighted(&w)?;
            let (solved, report) = balance_solve(&seed, gauge, &self.options)?;
            if report.max_abs_force > BALANCE_TOL {
                return Err(Error::NoConvergence { iterations: k, residual: report.max_abs_force });
            }
            self.current = solved.clone();
            out.push((solved, report));
        }
        Ok(out)
    }
}
