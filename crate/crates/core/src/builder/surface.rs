//! The built domain viewed as Weierstrass data on the parameter plane.

use num_complex::Complex64 as C;

use super::{omega0_raw, BuilderInput};
use crate::weierstrass::{FormTriple, Forms, SingularKind};

/// The minimal surface of a built domain: `g_t = −i/(t f)` and `t ω0`.
#[derive(Debug, Clone)]
pub struct BuilderSurface {
    input: BuilderInput,
}

impl BuilderSurface {
    pub fn new(input: BuilderInput) -> Self {
        BuilderSurface { input }
    }

    pub fn input(&self) -> &BuilderInput {
        &self.input
    }

    /// Whether `z` lies in `Σ_t = {|t f| < 1}`.
    pub fn contains(&self, z: C) -> bool {
        (self.input.t() * self.input.f_raw(z)).norm() < 1.0
    }
}

impl Forms for BuilderSurface {
    fn gauss(&self, z: C) -> C {
        self.input.gauss(z)
    }

    fn integrands(&self, z: C, _root: C) -> FormTriple {
        let omega = self.input.t() * omega0_raw(self.input.config(), z);
        let g = self.input.gauss(z);
        FormTriple::new(omega, g * omega, omega / g)
    }

    fn singularities(&self) -> Vec<(C, SingularKind)> {
        let mut s = vec![(C::new(0.0, 0.0), SingularKind::Pole)];
        s.extend(self.input.config().points().iter().map(|p| (*p, SingularKind::Pole)));
        s
    }
}
