#![allow(dead_code)]

use curvatlas::geom::{FarSet, Point};
use curvatlas::PolyCurve;
use rand::Rng;

/// Polyline with 2..=max_vertices uniform vertices in the unit square.
pub fn random_polyline(rng: &mut impl Rng, max_vertices: usize) -> PolyCurve {
    let n = rng.gen_range(2..=max_vertices);
    let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.gen(), rng.gen())).collect();
    PolyCurve::from_xy(&pts, 0.0).unwrap()
}

fn diam(pts: &[Point]) -> f64 {
    let mut d: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            d = d.max(pts[i].dist(pts[j]));
        }
    }
    d
}

/// Diameter of the arc range `[s0, s1]`, from its vertices.
pub fn arc_diameter(c: &PolyCurve, s0: f64, s1: f64) -> f64 {
    diam(c.sub_curve(s0, s1).vertices())
}

/// Minimal contiguous partition by bisecting the farthest admissible end of
/// each segment, independent of the library's leg-by-leg construction.
pub fn partition_by_bisection(c: &PolyCurve, ell: f64) -> usize {
    let len = c.length();
    let mut s = 0.0;
    let mut count = 1;
    loop {
        if arc_diameter(c, s, len) <= ell {
            return count;
        }
        let (mut lo, mut hi) = (s, len);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if arc_diameter(c, s, mid) <= ell {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        count += 1;
        s = lo;
    }
}

/// Exhaustive minimum over cut sets restricted to interior vertices.
pub fn partition_vertex_exhaustive(c: &PolyCurve, ell: f64) -> Option<usize> {
    let v = c.vertices();
    let inner = v.len().saturating_sub(2);
    let mut best: Option<usize> = None;
    for mask in 0u32..(1u32 << inner) {
        let mut start = 0;
        let mut ok = true;
        for i in 1..v.len() {
            let cut = i == v.len() - 1 || mask & (1 << (i - 1)) != 0;
            if cut {
                if diam(&v[start..=i]) > ell {
                    ok = false;
                    break;
                }
                start = i;
            }
        }
        if ok {
            let n = mask.count_ones() as usize + 1;
            best = Some(best.map_or(n, |b| b.min(n)));
        }
    }
    best
}

/// Maximal packing among arc-grid points of spacing `h`: points with
/// successive distances at least `ell`, by levels of a nested farthest-point
/// structure.
pub fn packing_on_grid(c: &PolyCurve, ell: f64, h: f64) -> usize {
    let len = c.length();
    let n = (len / h).floor() as usize + 1;
    // sets[v]: grid points so far that end a packing of size > v
    let mut sets: Vec<FarSet> = Vec::new();
    let mut best_all = 1;
    for j in 0..n {
        let x = c.point_at((j as f64 * h).min(len));
        let far = |s: &FarSet| s.points().iter().any(|p| p.dist(x) >= ell);
        // sets are nested, so admissibility is monotone in the level
        let (mut lo, mut hi) = (0usize, sets.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            if far(&sets[mid]) {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        let b = lo + 1;
        best_all = best_all.max(b);
        while sets.len() < b {
            sets.push(FarSet::new(2));
        }
        for s in sets.iter_mut().take(b) {
            s.push(x);
        }
    }
    best_all
}
