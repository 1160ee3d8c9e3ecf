//! Reduction of measured period vectors to a lattice basis.

use num_complex::Complex64 as C;

fn is_parallel(a: C, b: C, tol: f64) -> bool {
    (a.conj() * b).im.abs() <= tol * a.norm() * b.norm().max(1.0)
}

fn gauss_reduce(mut b1: C, mut b2: C) -> (C, C) {
    loop {
        if b2.norm() < b1.norm() {
            std::mem::swap(&mut b1, &mut b2);
        }
        let mu = ((b1.conj() * b2).re / b1.norm_sqr()).round();
        if mu == 0.0 {
            return (b1, b2);
        }
        b2 -= b1 * mu;
        if b2.norm() >= b1.norm() {
            return (b1, b2);
        }
    }
}

/// Basis (0, 1 or 2 vectors) of the lattice generated by `vectors`; entries shorter than `tol` are ignored.
pub fn reduce_lattice(vectors: &[C], tol: f64) -> Vec<C> {
    let mut pool: Vec<C> = vectors.iter().copied().filter(|v| v.norm() > tol).collect();
    let mut basis = Vec::new();
    for _ in 0..200 {
        pool.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
        let Some(&b1) = pool.first() else {
            return Vec::new();
        };
        basis = match pool.iter().find(|v| !is_parallel(b1, **v, 1e-6)) {
            Some(&b2) => {
                let (a, b) = gauss_reduce(b1, b2);
                vec![a, b]
            }
            None => vec![b1],
        };
        let extra = pool.iter().map(|&v| residual_mod(&basis, v)).find(|r| r.norm() > tol);
        match extra {
            Some(r) => pool.push(r),
            None => break,
        }
    }
    basis
}

/// `v` minus its nearest lattice point.
pub fn residual_mod(basis: &[C], v: C) -> C {
    match basis.len() {
        0 => v,
        1 => {
            let k = (v / basis[0]).re.round();
            v - basis[0] * k
        }
        _ => {
            let (b1, b2) = (basis[0], basis[1]);
            let det = b1.re * b2.im - b1.im * b2.re;
            let alpha = (v.re * b2.im - v.im * b2.re) / det;
            let beta = (b1.re * v.im - b1.im * v.re) / det;
            let mut best = v;
            let (a0, b0) = (alpha.round(), beta.round());
            for da in -1..=1 {
                for db in -1..=1 {
                    let r = v - b1 * (a0 + da as f64) - b2 * (b0 + db as f64);
                    if r.norm() < best.norm() {
                        best = r;
                    }
                }
            }
            best
        }
    }
}
