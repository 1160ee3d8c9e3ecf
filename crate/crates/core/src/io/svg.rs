//! SVG rendering of domain artifacts and polyline sanity checks.

use std::fmt::Write as _;

use num_complex::Complex64 as C;

use super::{CurveKind, DomainArtifact};

/// Default number of fundamental domains drawn along each period.
pub const DEFAULT_TILES: usize = 3;

const WIDTH: f64 = 960.0;
const MARGIN: f64 = 0.05;

fn translations(periods: &[C], tiles: usize) -> Vec<C> {
    let tiles = tiles.max(1) as isize;
    let offsets: Vec<isize> = (0..tiles).map(|k| k - (tiles - 1) / 2).collect();
    match periods {
        [] => vec![C::new(0.0, 0.0)],
        [p] => offsets.iter().map(|&k| *p * k as f64).collect(),
        [p, q, ..] => offsets.iter().flat_map(|&j| offsets.iter().map(move |&k| *p * j as f64 + *q * k as f64)).collect(),
    }
}

/// Renders every curve, translated by `tiles` copies of each period, one `<path>` per polyline.
///
/// The y axis points up; the view box fits the drawing with a 5% margin.
pub fn render_svg(artifact: &DomainArtifact, tiles: usize) -> String {
    let shifts = translations(&artifact.periods, tiles);
    let mut polylines: Vec<(CurveKind, bool, Vec<C>)> = Vec::new();
    for curve in &artifact.curves {
        let closed = curve.kind == CurveKind::Boundary && curve.relative_gap() < 1e-6;
        for s in &shifts {
            let pts: Vec<C> = curve.points.iter().filter(|p| p.is_finite()).map(|p| p + s).collect();
            if pts.len() >= 2 {
                polylines.push((curve.kind, closed, pts));
            }
        }
    }
    let (mut lo, mut hi) = (C::new(f64::INFINITY, f64::INFINITY), C::new(f64::NEG_INFINITY, f64::NEG_INFINITY));
    for p in polylines.iter().flat_map(|(_, _, v)| v) {
        lo = C::new(lo.re.min(p.re), lo.im.min(p.im));
        hi = C::new(hi.re.max(p.re), hi.im.max(p.im));
    }
    if polylines.is_empty() {
        lo = C::new(0.0, 0.0);
        hi = C::new(1.0, 1.0);
    }
    let span = C::new((hi.re - lo.re).max(1e-12), (hi.im - lo.im).max(1e-12));
    let scale = WIDTH / span.re.max(span.im);
    let (w, h) = (span.re * scale, span.im * scale);
    let (mx, my) = (MARGIN * w, MARGIN * h);
    let map = |p: C| ((p.re - lo.re) * scale + mx, (hi.im - p.im) * scale + my);
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{:.1}" height="{:.1}" viewBox="0 0 {:.3} {:.3}">"#,
        w + 2.0 * mx,
        h + 2.0 * my,
        w + 2.0 * mx,
        h + 2.0 * my
    );
    let _ = writeln!(out, r#"<title>{}</title>"#, escape(&artifact.source));
    for (kind, closed, pts) in &polylines {
        let style = match kind {
            CurveKind::Boundary => r##"fill="none" stroke="#000000" stroke-width="1.5""##,
            CurveKind::Streamline => r##"fill="none" stroke="#1f5fa8" stroke-width="0.6""##,
        };
        let mut d = String::new();
        for (k, p) in pts.iter().enumerate() {
            let (x, y) = map(*p);
            let _ = write!(d, "{}{x:.3},{y:.3}", if k == 0 { "M" } else { " L" });
        }
        if *closed {
            d.push_str(" Z");
        }
        let _ = writeln!(out, r#"<path class="{}" d="{d}" {style}/>"#, kind.as_str());
    }
    out.push_str("</svg>\n");
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;").replace('"', "&quot;")
}

fn orient(a: C, b: C, c: C) -> f64 {
    (b - a).re * (c - a).im - (b - a).im * (c - a).re
}

fn segments_cross(a: C, b: C, c: C, d: C) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
}

/// Number of crossing pairs of non-adjacent segments, found by a sweep over segment x-extents.
///
/// A polyline whose last point equals its first is treated as closed.
pub fn self_intersections(points: &[C]) -> usize {
    let n = points.len();
    if n < 4 {
        return 0;
    }
    let closed = points[0] == points[n - 1];
    let m = n - 1;
    let mut order: Vec<usize> = (0..m).collect();
    let xmin = |k: usize| points[k].re.min(points[k + 1].re);
    let xmax = |k: usize| points[k].re.max(points[k + 1].re);
    order.sort_by(|&a, &b| xmin(a).total_cmp(&xmin(b)));
    let adjacent = |i: usize, j: usize| i.abs_diff(j) <= 1 || (closed && i.abs_diff(j) == m - 1);
    let mut active: Vec<usize> = Vec::new();
    let mut count = 0;
    for &k in &order {
        let x = xmin(k);
        active.retain(|&a| xmax(a) >= x);
        for &a in &active {
            if !adjacent(a, k) && segments_cross(points[a], points[a + 1], points[k], points[k + 1]) {
                count += 1;
            }
        }
        active.push(k);
    }
    count
}
