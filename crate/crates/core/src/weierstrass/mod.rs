//! Weierstrass data, path integration of the forms and vortex-domain images.

mod contour;
mod data;
mod domain;
mod forms;
mod lattice;
mod rational;

pub use contour::{contour_cells, grid_cells, Crossing, LevelCurve};
pub use data::{classical_data, gauss_map, ClassicalName, WeierstrassData};
pub use domain::{domain_image, DomainImage, DomainReport, DomainSettings};
pub use forms::{continue_root, nearest_root, walker_quadrature, BranchState, FormTriple, Forms, SingularKind, Walker};
pub use lattice::{reduce_lattice, residual_mod};
pub use rational::RationalFunction;

use num_complex::Complex64 as C;

use crate::error::Result;

/// A point of the immersed surface.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImmersionSample {
    pub z: C,
    pub root: C,
    pub integrals: FormTriple,
    pub position: [f64; 3],
    pub normal: [f64; 3],
}

/// Surface points at the vertices of `path`, starting from `path[0]` with the principal root.
pub fn immersion(forms: &dyn Forms, path: &[C]) -> Result<Vec<ImmersionSample>> {
    let Some(&z0) = path.first() else {
        return Ok(Vec::new());
    };
    let mut w = Walker::new(forms, z0, None)?;
    let mut out = Vec::with_capacity(path.len());
    for &z in path {
        w.advance(z)?;
        let integrals = w.integrals();
        out.push(ImmersionSample {
            z,
            root: w.root(),
            integrals,
            position: integrals.position(),
            normal: gauss_map(forms.gauss(z)),
        });
    }
    Ok(out)
}

/// Integrands `(ω, gω, g⁻¹ω)/dz` at `z` on the sheet selected by `root` (principal when `None`).
pub fn eval_omega(forms: &dyn Forms, z: C, root: Option<C>) -> FormTriple {
    let root = if forms.is_multivalued() {
        let q = forms.radicand(z);
        match root {
            Some(r) => nearest_root(q, r),
            None => q.sqrt(),
        }
    } else {
        C::new(1.0, 0.0)
    };
    forms.integrands(z, root)
}
