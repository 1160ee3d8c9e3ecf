//! Minimal graph to vortex domain: `F(ψ(z)) = φ(z) = −∫ gω` and `u = x3`.

use std::sync::Arc;

use num_complex::Complex64 as C;

use super::planner::segment_inside;
use crate::error::{Error, Result};
use crate::weierstrass::{FormTriple, Forms, Walker};

type Membership = Arc<dyn Fn(C) -> bool + Send + Sync>;

/// A graph given by Weierstrass data with `|g| > 1` inside, viewed as a vortex domain.
#[derive(Clone)]
pub struct MinimalVortex {
    forms: Arc<dyn Forms>,
    base: C,
    membership: Membership,
    phi_base: C,
    height_base: f64,
}

impl std::fmt::Debug for MinimalVortex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("MinimalVortex").field("base", &self.base).field("phi_base", &self.phi_base).finish()
    }
}

/// Images of one parameter point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexPoint {
    pub source: C,
    /// Graph-plane point `ψ(z)`.
    pub graph: C,
    /// Vortex-plane point `φ(z) = F(ψ(z))`.
    pub vortex: C,
    /// `u(φ(z)) = x3(z)`.
    pub height: f64,
}

/// Checks `|g| > 1` on `probes`; `membership` describes the parameter domain.
pub fn minimal_to_vortex(
    forms: Arc<dyn Forms>,
    base: C,
    membership: impl Fn(C) -> bool + Send + Sync + 'static,
    probes: &[C],
) -> Result<MinimalVortex> {
    if !membership(base) {
        return Err(Error::InvalidInput(format!("base point {base} outside the domain")));
    }
    for &z in probes {
        let m = forms.gauss(z).norm();
        if !(m > 1.0) {
            return Err(Error::NotExpanding { modulus: m, re: z.re, im: z.im });
        }
    }
    Ok(MinimalVortex { forms, base, membership: Arc::new(membership), phi_base: C::new(0.0, 0.0), height_base: 0.0 })
}

impl MinimalVortex {
    /// Values of `φ` and `u` at the base point.
    pub fn with_base_values(mut self, phi: C, height: f64) -> Self {
        self.phi_base = phi;
        self.height_base = height;
        self
    }

    pub fn forms(&self) -> &dyn Forms {
        &*self.forms
    }

    pub fn contains(&self, z: C) -> bool {
        (self.membership)(z)
    }

    fn point(&self, z: C, acc: FormTriple) -> VortexPoint {
        VortexPoint {
            source: z,
            graph: acc.psi(),
            vortex: self.phi_base + acc.phi(),
            height: self.height_base + acc.x3(),
        }
    }

    /// Images at the end of `path`, which starts at the base point.
    pub fn image_along(&self, path: &[C]) -> Result<VortexPoint> {
        let mut w = Walker::new(&*self.forms, self.base, None)?;
        w.follow(path)?;
        Ok(self.point(w.z(), w.integrals()))
    }

    /// Images of `z`, reached by a straight segment from the base point.
    pub fn image(&self, z: C) -> Result<VortexPoint> {
        self.image_along(&[z])
    }

    /// Increments `(F(ψ(z1)) − F(ψ(z0)), ψ(z1) − ψ(z0))` along the segment `[z0, z1]`, which must stay inside.
    pub fn increment(&self, z0: C, z1: C) -> Result<(C, C)> {
        let inside = |z: C| self.contains(z);
        let h = 1e-3f64.max((z1 - z0).norm() / 256.0);
        if !segment_inside(&inside, z0, z1, h) {
            return Err(Error::InvalidInput(format!("segment [{z0}, {z1}] leaves the domain")));
        }
        let mut w = Walker::new(&*self.forms, z0, None)?;
        w.advance(z1)?;
        let acc = w.integrals();
        Ok((acc.phi(), acc.psi()))
    }

    /// `2u_w` at `φ(z)`: `−1/g(z)`.
    pub fn uz2_at_source(&self, z: C) -> C {
        -1.0 / self.forms.gauss(z)
    }

    /// `|dF − dψ|/|dz|` along the unit tangent of the level curve of `|g|` through `z`.
    pub fn boundary_df_residual(&self, z: C) -> f64 {
        let h = 1e-6 * (1.0 + z.norm());
        let g = self.forms.gauss(z);
        let dlog = (self.forms.gauss(z + h) - self.forms.gauss(z - h)) / (2.0 * h * g);
        let dz = C::i() * dlog.conj();
        let dz = dz / dz.norm();
        let t = self.forms.integrands(z, C::new(1.0, 0.0));
        let dphi = -t.g_omega * dz;
        let dpsi = 0.5 * ((t.ginv_omega * dz).conj() - t.g_omega * dz);
        (dphi - dpsi).norm()
    }
}
