//! Closed-form balanced configurations.

use std::f64::consts::PI;

use num_complex::Complex64 as C;

use super::{Case, FiniteConfiguration, PeriodicConfiguration};
use crate::error::{Error, Result};

/// `n − 1` unit vortices on the roots of unity and one vortex of weight `1 − n/2` at the origin.
pub fn dihedral(n: usize) -> Result<FiniteConfiguration> {
    if n < 3 {
        return Err(Error::ParameterOutOfRange(format!("dihedral configuration needs n >= 3, got {n}")));
    }
    let m = n - 1;
    let mut points: Vec<C> = (1..=m).map(|j| C::from_polar(1.0, 2.0 * PI * j as f64 / m as f64)).collect();
    points.push(C::new(0.0, 0.0));
    let mut weights = vec![1.0; m];
    weights.push(1.0 - n as f64 / 2.0);
    FiniteConfiguration::new(points, weights)
}

/// Two-row street with weights `(1, −1)`: `p_1 = 1`, `p_2 = (2c_0 − 1)/(2c_0 + 1)`.
pub fn vonkarman_street(c0: C) -> Result<PeriodicConfiguration> {
    let num = 2.0 * c0 - 1.0;
    let den = 2.0 * c0 + 1.0;
    if num.norm() < 1e-12 || den.norm() < 1e-12 {
        return Err(Error::ParameterOutOfRange(format!("street needs c0 != ±0.5, got {c0}")));
    }
    PeriodicConfiguration::new(vec![C::new(1.0, 0.0), num / den], vec![1.0, -1.0], c0, Case::A)
}

/// The street for real `0 < |c0| < 0.5`, where the two rows sit half a period apart.
pub fn staggered_street(c0: f64) -> Result<PeriodicConfiguration> {
    if !(c0 != 0.0 && c0.abs() < 0.5) {
        return Err(Error::ParameterOutOfRange(format!("staggered street needs 0 < |c0| < 0.5, got {c0}")));
    }
    vonkarman_street(C::new(c0, 0.0))
}

/// `n` unit vortices at the `n`-th roots of unity in case b (`c0 = −n/2`).
pub fn regular_lane(n: usize) -> Result<PeriodicConfiguration> {
    if n == 0 {
        return Err(Error::ParameterOutOfRange("regular lane needs n >= 1".into()));
    }
    let points = (0..n).map(|j| C::from_polar(1.0, 2.0 * PI * j as f64 / n as f64)).collect();
    PeriodicConfiguration::new(points, vec![1.0; n], C::new(-(n as f64) / 2.0, 0.0), Case::B)
}

/// Case b with weights `(1, 1, c3)`, `p_3 = 1` and `p_1, p_2` the roots of `z² + 2c3/(c3+1) z + 1`.
pub fn three_lane(c3: f64) -> Result<PeriodicConfiguration> {
    if (c3 + 1.0).abs() < 1e-12 {
        return Err(Error::ParameterOutOfRange("three-lane street needs c3 != -1".into()));
    }
    if (c3 + 0.5).abs() < 1e-12 || (c3 + 2.0).abs() < 1e-12 || c3 == 0.0 {
        return Err(Error::ParameterOutOfRange(format!("three-lane street degenerates at c3 = {c3}")));
    }
    let b = c3 / (c3 + 1.0);
    let disc = C::new(b * b - 1.0, 0.0).sqrt();
    let p1 = -b + disc;
    let p2 = -b - disc;
    PeriodicConfiguration::new(
        vec![C::new(p1.re, p1.im), C::new(p2.re, p2.im), C::new(1.0, 0.0)],
        vec![1.0, 1.0, c3],
        C::new(-(2.0 + c3) / 2.0, 0.0),
        Case::B,
    )
}

/// Constant `c0` for which the uneven street coordinates below are balanced.
pub const UNEVEN_STREET_C0: f64 = 1.503;

/// Uneven street with weights `(1, 1, 1, −1.5, −1.5)` in case a, positions given as `q/π`.
pub fn uneven_street() -> PeriodicConfiguration {
    const Q_OVER_PI: [(f64, f64); 5] = [
        (-0.6666666664, -0.02936340626),
        (-0.03551828126, 0.01468170323),
        (0.7021849478, 0.01468170323),
        (-0.1846663713, -0.5251421936),
        (0.8513330378, -0.5251421936),
    ];
    let q: Vec<C> = Q_OVER_PI.iter().map(|&(x, y)| C::new(x * PI, y * PI)).collect();
    PeriodicConfiguration::from_q(&q, vec![1.0, 1.0, 1.0, -1.5, -1.5], C::new(UNEVEN_STREET_C0, 0.0), Case::A)
        .expect("fixed data is valid")
}

#[cfg(test)]
mod tests {
    use super::super::*;
    use super::*;

    fn max_force(cfg: &PeriodicConfiguration) -> f64 {
        periodic_forces(cfg).iter().map(|f| f.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn dihedral_balanced() {
        for n in 3..10 {
            let cfg = dihedral(n).unwrap();
            assert!(finite_forces(&cfg).iter().all(|f| f.norm() < 1e-13), "n = {n}");
            assert!(cfg.pair_sum().abs() < 1e-12);
        }
        assert!(dihedral(2).is_err());
    }

    #[test]
    fn streets_balanced() {
        for c0 in [C::new(0.25, 0.0), C::new(1.0, 0.0), C::from_polar(1.0, -PI / 4.0), C::new(-3.0, 0.7)] {
            assert!(max_force(&vonkarman_street(c0).unwrap()) < 1e-14);
        }
        assert!(vonkarman_street(C::new(0.5, 0.0)).is_err());
        assert!(vonkarman_street(C::new(-0.5, 0.0)).is_err());
        assert!(staggered_street(0.7).is_err());
        let s = staggered_street(0.25).unwrap();
        assert!((s.q_points()[1].re.abs() - PI).abs() < 1e-14);
    }

    #[test]
    fn three_lane_balanced() {
        for c3 in [-1.5, -3.0, 0.5, 2.0] {
            assert!(max_force(&three_lane(c3).unwrap()) < 1e-13, "c3 = {c3}");
        }
        assert!(matches!(three_lane(-1.0), Err(Error::ParameterOutOfRange(_))));
    }

    #[test]
    fn regular_lane_balanced() {
        assert!(max_force(&regular_lane(4).unwrap()) < 1e-13);
    }

    #[test]
    fn uneven_street_balanced_at_its_constant() {
        assert!(max_force(&uneven_street()) < 1e-8);
        let half = PeriodicConfiguration::new(
            uneven_street().points().to_vec(),
            vec![1.0, 1.0, 1.0, -1.5, -1.5],
            C::new(0.5, 0.0),
            Case::A,
        )
        .unwrap();
        assert!(max_force(&half) > 0.1);
    }
}
