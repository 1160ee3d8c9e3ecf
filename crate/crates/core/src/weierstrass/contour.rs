//! Marching squares over arbitrary quadrilateral cells.

use std::collections::HashMap;

/// A level-set crossing on the edge between nodes `a` and `b`, at fraction `t` from `a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Crossing {
    pub a: usize,
    pub b: usize,
    pub t: f64,
}

/// A traced level curve; `closed` when the chain returns to its first edge.
#[derive(Debug, Clone, PartialEq)]
pub struct LevelCurve {
    pub crossings: Vec<Crossing>,
    pub closed: bool,
}

fn key(a: usize, b: usize) -> (usize, usize) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

fn crossing(values: &[f64], a: usize, b: usize, level: f64) -> Crossing {
    let (a, b) = if a < b { (a, b) } else { (b, a) };
    let (va, vb) = (values[a], values[b]);
    let t = if vb == va { 0.5 } else { ((level - va) / (vb - va)).clamp(0.0, 1.0) };
    Crossing { a, b, t }
}

/// Traces the `level` set of nodal `values` through `cells`, each given by four node indices in cyclic order.
///
/// Cells with a non-finite corner are skipped. Saddles are resolved by the mean of the corners.
pub fn contour_cells(values: &[f64], cells: &[[usize; 4]], level: f64) -> Vec<LevelCurve> {
    let mut segments: Vec<[(usize, usize); 2]> = Vec::new();
    for cell in cells {
        let v = cell.map(|k| values[k]);
        if v.iter().any(|x| !x.is_finite()) {
            continue;
        }
        let above = v.map(|x| x >= level);
        let edges: Vec<usize> = (0..4).filter(|&k| above[k] != above[(k + 1) % 4]).collect();
        let edge = |k: usize| key(cell[k], cell[(k + 1) % 4]);
        match edges.len() {
            2 => segments.push([edge(edges[0]), edge(edges[1])]),
            4 => {
                let center = v.iter().sum::<f64>() / 4.0 >= level;
                for k in 0..4 {
                    if above[k] != center {
                        segments.push([edge((k + 3) % 4), edge(k)]);
                    }
                }
            }
            _ => {}
        }
    }
    let mut by_edge: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
    for (i, s) in segments.iter().enumerate() {
        for e in s {
            by_edge.entry(*e).or_default().push(i);
        }
    }
    let mut used = vec![false; segments.len()];
    let mut curves = Vec::new();
    let mut starts: Vec<(usize, (usize, usize))> = Vec::new();
    for (i, s) in segments.iter().enumerate() {
        for e in s {
            if by_edge[e].len() == 1 {
                starts.push((i, *e));
            }
        }
    }
    let trace = |start: usize, first_edge: (usize, usize), used: &mut Vec<bool>| -> LevelCurve {
        let mut chain = vec![first_edge];
        let mut seg = start;
        let mut entry = first_edge;
        loop {
            used[seg] = true;
            let s = segments[seg];
            let exit = if s[0] == entry { s[1] } else { s[0] };
            chain.push(exit);
            if exit == first_edge {
                return LevelCurve { crossings: chain.iter().map(|e| crossing(values, e.0, e.1, level)).collect(), closed: true };
            }
            match by_edge[&exit].iter().find(|&&j| !used[j]) {
                Some(&next) => {
                    seg = next;
                    entry = exit;
                }
                None => {
                    return LevelCurve {
                        crossings: chain.iter().map(|e| crossing(values, e.0, e.1, level)).collect(),
                        closed: false,
                    }
                }
            }
        }
    };
    for (i, e) in starts {
        if !used[i] {
            curves.push(trace(i, e, &mut used));
        }
    }
    for i in 0..segments.len() {
        if !used[i] {
            let e = segments[i][0];
            curves.push(trace(i, e, &mut used));
        }
    }
    curves
}

/// Cells of a rectangular `nx × ny` node grid (row-major, index `j * nx + i`), optionally periodic in `i`.
pub fn grid_cells(nx: usize, ny: usize, wrap_x: bool) -> Vec<[usize; 4]> {
    let mut cells = Vec::new();
    let imax = if wrap_x { nx } else { nx - 1 };
    for j in 0..ny - 1 {
        for i in 0..imax {
            let i1 = (i + 1) % nx;
            cells.push([j * nx + i, j * nx + i1, (j + 1) * nx + i1, (j + 1) * nx + i]);
        }
    }
    cells
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn circle_level_set_is_closed() {
        let n = 41;
        let h = 2.0 / (n - 1) as f64;
        let pos = |k: usize| (-1.0 + h * (k % n) as f64, -1.0 + h * (k / n) as f64);
        let values: Vec<f64> = (0..n * n).map(|k| {
            let (x, y) = pos(k);
            x * x + y * y
        }).collect();
        let curves = contour_cells(&values, &grid_cells(n, n, false), 0.25);
        assert_eq!(curves.len(), 1);
        assert!(curves[0].closed);
        for c in &curves[0].crossings {
            let (xa, ya) = pos(c.a);
            let (xb, yb) = pos(c.b);
            let (x, y) = (xa + c.t * (xb - xa), ya + c.t * (yb - ya));
            assert!(((x * x + y * y).sqrt() - 0.5).abs() < 0.01);
        }
    }

    #[test]
    fn open_curves_and_wrapping() {
        // values = x on a 5x4 grid: vertical line, open.
        let values: Vec<f64> = (0..20).map(|k| (k % 5) as f64).collect();
        let curves = contour_cells(&values, &grid_cells(5, 4, false), 1.5);
        assert_eq!(curves.len(), 1);
        assert!(!curves[0].closed);
        assert_eq!(curves[0].crossings.len(), 4);
        // values = y with periodic x: a closed horizontal loop.
        let values: Vec<f64> = (0..20).map(|k| (k / 5) as f64).collect();
        let curves = contour_cells(&values, &grid_cells(5, 4, true), 1.5);
        assert_eq!(curves.len(), 1);
        assert!(curves[0].closed);
    }

    #[test]
    fn nan_cells_skipped() {
        let mut values: Vec<f64> = (0..20).map(|k| (k % 5) as f64).collect();
        values[7] = f64::NAN;
        let curves = contour_cells(&values, &grid_cells(5, 4, false), 1.5);
        assert!(curves.iter().all(|c| c.crossings.iter().all(|x| x.a != 7 && x.b != 7)));
    }
}
