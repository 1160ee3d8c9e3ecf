use num_complex::Complex64 as C;

use crate::error::{Error, Result};
use crate::numeric::Polynomial;

/// Quotient of two polynomials, normalized so the denominator's leading coefficient is 1.
#[derive(Debug, Clone, PartialEq)]
pub struct RationalFunction {
    num: Polynomial,
    den: Polynomial,
}

impl RationalFunction {
    pub fn new(num: Polynomial, den: Polynomial) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::InvalidInput("denominator is identically zero".into()));
        }
        let lead = den.leading();
        let inv = C::new(1.0, 0.0) / lead;
        Ok(RationalFunction { num: num.scale(inv), den: den.scale(inv) })
    }

    pub fn polynomial(p: Polynomial) -> Self {
        RationalFunction { num: p, den: Polynomial::one() }
    }

    pub fn constant(c: C) -> Self {
        RationalFunction::polynomial(Polynomial::constant(c))
    }

    pub fn numerator(&self) -> &Polynomial {
        &self.num
    }

    pub fn denominator(&self) -> &Polynomial {
        &self.den
    }

    pub fn eval(&self, z: C) -> C {
        self.num.eval(z) / self.den.eval(z)
    }

    pub fn derivative(&self) -> Self {
        let n = &(&self.num.derivative() * &self.den) - &(&self.num * &self.den.derivative());
        let d = &self.den * &self.den;
        RationalFunction::new(n, d).expect("nonzero denominator").reduced()
    }

    pub fn poles(&self) -> Vec<C> {
        self.den.roots()
    }

    pub fn zeros(&self) -> Vec<C> {
        self.num.roots()
    }

    pub fn mul(&self, other: &RationalFunction) -> Self {
        RationalFunction::new(&self.num * &other.num, &self.den * &other.den).expect("nonzero denominator").reduced()
    }

    pub fn div(&self, other: &RationalFunction) -> Result<Self> {
        if other.num.is_zero() {
            return Err(Error::InvalidInput("division by the zero function".into()));
        }
        Ok(RationalFunction::new(&self.num * &other.den, &self.den * &other.num)?.reduced())
    }

    pub fn scale(&self, s: C) -> Self {
        RationalFunction { num: self.num.scale(s), den: self.den.clone() }
    }

    /// Cancels common roots of numerator and denominator.
    pub fn reduced(&self) -> Self {
        let mut num = self.num.clone();
        let mut den = self.den.clone();
        loop {
            if num.degree() == 0 || den.degree() == 0 {
                break;
            }
            let roots = num.roots();
            let common = roots.into_iter().find(|&r| {
                let scale = den.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
                den.eval(r).norm() <= 1e-10 * scale * (1.0 + r.norm()).powi(den.degree() as i32)
            });
            match common {
                Some(r) => {
                    num = deflate(&num, r);
                    den = deflate(&den, r);
                }
                None => break,
            }
        }
        RationalFunction::new(num, den).expect("nonzero denominator")
    }
}

/// Quotient of `p` by `(z − r)` (synthetic division, remainder dropped).
fn deflate(p: &Polynomial, r: C) -> Polynomial {
    let c = p.coeffs();
    let n = c.len() - 1;
    let mut q = vec![C::new(0.0, 0.0); n];
    let mut acc = C::new(0.0, 0.0);
    for k in (1..=n).rev() {
        acc = acc * r + c[k];
        q[k - 1] = acc;
    }
    Polynomial::new(q)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_and_eval() {
        let f = RationalFunction::new(Polynomial::real(&[2.0]), Polynomial::real(&[0.0, 2.0])).unwrap();
        assert_eq!(f.denominator().leading(), C::new(1.0, 0.0));
        assert!((f.eval(C::new(2.0, 0.0)) - 0.5).norm() < 1e-15);
        assert!(RationalFunction::new(Polynomial::one(), Polynomial::real(&[0.0])).is_err());
    }

    #[test]
    fn cancellation() {
        // (1/z) * (z/(z^2+1)) = 1/(z^2+1)
        let g = RationalFunction::new(Polynomial::one(), Polynomial::real(&[0.0, 1.0])).unwrap();
        let r = RationalFunction::new(Polynomial::real(&[0.0, 1.0]), Polynomial::real(&[1.0, 0.0, 1.0])).unwrap();
        let p = g.mul(&r);
        assert_eq!(p.denominator().degree(), 2);
        assert!((p.eval(C::new(0.0, 0.0)) - 1.0).norm() < 1e-14);
    }

    #[test]
    fn derivative_matches_difference() {
        let r = RationalFunction::new(Polynomial::real(&[1.0, 2.0]), Polynomial::real(&[3.0, 0.0, 1.0])).unwrap();
        let z = C::new(0.3, 0.7);
        let h = 1e-6;
        let fd = (r.eval(z + h) - r.eval(z - h)) / (2.0 * h);
        assert!((r.derivative().eval(z) - fd).norm() < 1e-8);
    }
}
