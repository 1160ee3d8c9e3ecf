//! Complex polynomials with coefficients in ascending degree.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64 as C;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coeffs: Vec<C>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<C>) -> Self {
        while coeffs.len() > 1 && coeffs.last().map_or(false, |c| *c == C::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(C::new(0.0, 0.0));
        }
        Polynomial { coeffs }
    }

    pub fn real(coeffs: &[f64]) -> Self {
        Polynomial::new(coeffs.iter().map(|&c| C::new(c, 0.0)).collect())
    }

    pub fn constant(c: C) -> Self {
        Polynomial::new(vec![c])
    }

    pub fn one() -> Self {
        Polynomial::constant(C::new(1.0, 0.0))
    }

    /// `z - a`.
    pub fn linear_root(a: C) -> Self {
        Polynomial::new(vec![-a, C::new(1.0, 0.0)])
    }

    /// Monic polynomial with the given roots.
    pub fn from_roots(roots: &[C]) -> Self {
        roots.iter().fold(Polynomial::one(), |p, &r| &p * &Polynomial::linear_root(r))
    }

    pub fn coeffs(&self) -> &[C] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == C::new(0.0, 0.0)
    }

    pub fn leading(&self) -> C {
        *self.coeffs.last().unwrap()
    }

    pub fn eval(&self, z: C) -> C {
        self.coeffs.iter().rev().fold(C::new(0.0, 0.0), |acc, &c| acc * z + c)
    }

    pub fn derivative(&self) -> Self {
        if self.coeffs.len() == 1 {
            return Polynomial::constant(C::new(0.0, 0.0));
        }
        Polynomial::new(self.coeffs.iter().enumerate().skip(1).map(|(k, &c)| c * k as f64).collect())
    }

    pub fn scale(&self, s: C) -> Self {
        Polynomial::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    /// Multiplicity of `a` as a root, judged by successive derivatives falling below `tol` (relative).
    pub fn root_multiplicity(&self, a: C, tol: f64) -> usize {
        let scale = self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
        let mut p = self.clone();
        let mut k = 0;
        while !p.is_zero() && p.eval(a).norm() <= tol * scale * (1.0 + a.norm()).powi(p.degree() as i32) {
            p = p.derivative();
            k += 1;
        }
        k
    }

    /// All complex roots (Aberth–Ehrlich iteration with Newton polishing).
    pub fn roots(&self) -> Vec<C> {
        let n = self.degree();
        if n == 0 {
            return Vec::new();
        }
        let lead = self.leading();
        let monic: Vec<C> = self.coeffs.iter().map(|c| c / lead).collect();
        let p = Polynomial::new(monic);
        let dp = p.derivative();
        let radius = 1.0 + p.coeffs[..n].iter().map(|c| c.norm()).fold(0.0, f64::max);
        let mut z: Vec<C> = (0..n)
            .map(|k| C::from_polar(0.5 * radius, 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4))
            .collect();
        for _ in 0..500 {
            let mut moved = 0.0f64;
            for i in 0..n {
                let pv = p.eval(z[i]);
                if pv == C::new(0.0, 0.0) {
                    continue;
                }
                let ratio = pv / dp.eval(z[i]);
                let sum: C = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
                let w = ratio / (1.0 - ratio * sum);
                if w.is_finite() {
                    z[i] -= w;
                    moved = moved.max(w.norm() / (1.0 + z[i].norm()));
                }
            }
            if moved < 1e-16 {
                break;
            }
        }
        z
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        let zero = C::new(0.0, 0.0);
        Polynomial::new(
            (0..n)
                .map(|k| *self.coeffs.get(k).unwrap_or(&zero) + *rhs.coeffs.get(k).unwrap_or(&zero))
                .collect(),
        )
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(C::new(-1.0, 0.0))
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self + &(-rhs)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        let mut out = vec![C::new(0.0, 0.0); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Polynomial::new(out)
    }
}
