//! Voronoi cell areas over an axis-aligned rectangular domain.
//!
//! Each cell starts as the full rectangle and is clipped against the
//! perpendicular bisector of every relevant neighbour, nearest first.
//! Once the next candidate lies at distance d with d/2 ≥ the farthest
//! current cell vertex, no remaining bisector can cut the cell and the
//! scan stops; this bound is exact, so no pruning radius needs tuning.
//!
//! Polygons stay counter-clockwise throughout and areas come from the
//! shoelace formula, so Σ areas = rectangle area up to rounding.

use crate::error::{Error, Result};

/// Axis-aligned rectangle [x0, x1] × [y0, y1].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rect {
    pub x0: f64,
    pub y0: f64,
    pub x1: f64,
    pub y1: f64,
}

impl Rect {
    pub const UNIT: Rect = Rect {
        x0: 0.0,
        y0: 0.0,
        x1: 1.0,
        y1: 1.0,
    };

    pub fn new(x0: f64, y0: f64, x1: f64, y1: f64) -> Result<Rect> {
        if ![x0, y0, x1, y1].iter().all(|v| v.is_finite()) || x1 <= x0 || y1 <= y0 {
            return Err(Error::InvalidParameter(format!(
                "degenerate rectangle [{x0}, {x1}] × [{y0}, {y1}]"
            )));
        }
        Ok(Rect { x0, y0, x1, y1 })
    }

    pub fn area(&self) -> f64 {
        (self.x1 - self.x0) * (self.y1 - self.y0)
    }

    pub fn contains_strict(&self, p: [f64; 2]) -> bool {
        p[0] > self.x0 && p[0] < self.x1 && p[1] > self.y0 && p[1] < self.y1
    }
}

fn shoelace(poly: &[[f64; 2]]) -> f64 {
    let mut acc = 0.0;
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        acc += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * acc
}

/// Clips a CCW polygon against the half-plane of points closer to `p` than
/// to `q`: {x : (x − m)·(q − p) ≤ 0} with m the midpoint of p and q.
fn clip_halfplane(poly: &[[f64; 2]], p: [f64; 2], q: [f64; 2]) -> Vec<[f64; 2]> {
    let mx = 0.5 * (p[0] + q[0]);
    let my = 0.5 * (p[1] + q[1]);
    let dx = q[0] - p[0];
    let dy = q[1] - p[1];
    let side = |v: [f64; 2]| (v[0] - mx) * dx + (v[1] - my) * dy;

    let mut out = Vec::with_capacity(poly.len() + 1);
    for k in 0..poly.len() {
        let a = poly[k];
        let b = poly[(k + 1) % poly.len()];
        let sa = side(a);
        let sb = side(b);
        if sa <= 0.0 {
            out.push(a);
        }
        if (sa < 0.0 && sb > 0.0) || (sa > 0.0 && sb < 0.0) {
            let t = sa / (sa - sb);
            out.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
        }
    }
    out
}

/// Areas of the Voronoi cells of `points` clipped to `domain`.
///
/// Requires every point strictly inside the domain and pairwise-distinct
/// coordinates; cell areas are strictly positive and sum to the domain area.
pub fn voronoi_areas(points: &[[f64; 2]], domain: Rect) -> Result<Vec<f64>> {
    if points.is_empty() {
        return Err(Error::Voronoi("no points".into()));
    }
    for (i, p) in points.iter().enumerate() {
        if !p[0].is_finite() || !p[1].is_finite() {
            return Err(Error::Voronoi(format!("point {i} is not finite")));
        }
        if !domain.contains_strict(*p) {
            return Err(Error::Voronoi(format!(
                "point {i} = ({}, {}) is not strictly inside the domain",
                p[0], p[1]
            )));
        }
    }

    let n = points.len();
    let mut order: Vec<usize> = (0..n).collect();
    // detect exact duplicates via a coordinate sort
    order.sort_by(|&a, &b| {
        points[a]
            .partial_cmp(&points[b])
            .expect("finite coordinates")
    });
    for w in order.windows(2) {
        if points[w[0]] == points[w[1]] {
            return Err(Error::Voronoi(format!(
                "points {} and {} coincide at ({}, {})",
                w[0].min(w[1]),
                w[0].max(w[1]),
                points[w[0]][0],
                points[w[0]][1]
            )));
        }
    }

    let rect_poly = vec![
        [domain.x0, domain.y0],
        [domain.x1, domain.y0],
        [domain.x1, domain.y1],
        [domain.x0, domain.y1],
    ];

    let mut areas = Vec::with_capacity(n);
    let mut cand: Vec<(f64, usize)> = Vec::with_capacity(n - 1);
    for i in 0..n {
        let p = points[i];
        cand.clear();
        for (j, q) in points.iter().enumerate() {
            if j != i {
                let dx = p[0] - q[0];
                let dy = p[1] - q[1];
                cand.push((dx * dx + dy * dy, j));
            }
        }
        cand.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));

        let mut poly = rect_poly.clone();
        let mut r2_max = poly
            .iter()
            .map(|v| (v[0] - p[0]).powi(2) + (v[1] - p[1]).powi(2))
            .fold(0.0, f64::max);
        for &(d2, j) in &cand {
            // bisector distance d/2 beyond every cell vertex → cannot cut
            if d2 >= 4.0 * r2_max {
                break;
            }
            let clipped = clip_halfplane(&poly, p, points[j]);
            if clipped.len() < 3 {
                return Err(Error::Voronoi(format!("cell of point {i} collapsed")));
            }
            poly = clipped;
            r2_max = poly
                .iter()
                .map(|v| (v[0] - p[0]).powi(2) + (v[1] - p[1]).powi(2))
                .fold(0.0, f64::max);
        }
        let area = shoelace(&poly);
        if !(area.is_finite() && area > 0.0) {
            return Err(Error::Voronoi(format!(
                "cell of point {i} has non-positive area {area}"
            )));
        }
        areas.push(area);
    }
    Ok(areas)
}
