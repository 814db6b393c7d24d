//! Continuous Frechet distance between polylines and the Hausdorff distance
//! it induces on configurations.

use std::cmp::Ordering;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::curve::{CurveConfig, PolyCurve};
use crate::error::{bad_param, Result};
use crate::geom::{line_ball, Point};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MetricParams {
    pub bisection_tol: f64,
}

impl Default for MetricParams {
    fn default() -> Self {
        MetricParams { bisection_tol: 1e-9 }
    }
}

type Iv = Option<(f64, f64)>;

/// Parameters of the segment `a b` within `eps` of `c`, clipped to `[0, 1]`.
fn free(a: Point, b: Point, c: Point, eps: f64) -> Iv {
    if a == b {
        return (a.dist(c) <= eps).then_some((0.0, 1.0));
    }
    let (mut lo, mut hi) = line_ball(a, b, c, eps)?;
    // endpoints decided by their distance, not the rounded roots
    if a.dist(c) <= eps {
        lo = 0.0;
    }
    if b.dist(c) <= eps {
        hi = 1.0;
    }
    let (lo, hi) = (lo.max(0.0), hi.min(1.0));
    (lo <= hi).then_some((lo, hi))
}

/// Free-space reachability: is the Frechet distance at most `eps`?
fn decide(p: &[Point], q: &[Point], eps: f64) -> bool {
    let (np, nq) = (p.len() - 1, q.len() - 1);
    if p[0].dist(q[0]) > eps || p[np].dist(q[nq]) > eps {
        return false;
    }
    // bottom[i]: reachable part of the horizontal edge over P leg i at the
    // current row j; left: reachable part of the vertical edge at column i
    let mut bottom: Vec<Iv> = Vec::with_capacity(np);
    let mut full = true;
    for i in 0..np {
        let f = if full { free(p[i], p[i + 1], q[0], eps).filter(|iv| iv.0 == 0.0) } else { None };
        full = matches!(f, Some((_, hi)) if hi == 1.0);
        bottom.push(f);
    }
    let mut left_full = true;
    for j in 0..nq {
        // left boundary edge over Q leg j at column 0
        let lf = free(q[j], q[j + 1], p[0], eps);
        let mut left: Iv = match lf {
            Some((lo, hi)) if left_full && lo == 0.0 => Some((lo, hi)),
            _ => None,
        };
        left_full = left_full && matches!(left, Some((_, hi)) if hi == 1.0);
        let mut top: Vec<Iv> = Vec::with_capacity(np);
        for i in 0..np {
            let b = bottom[i];
            // right edge of cell (i, j)
            let right_free = free(q[j], q[j + 1], p[i + 1], eps);
            let right = match (b, left) {
                (Some(_), _) => right_free,
                (None, Some((llo, _))) => right_free.and_then(|(lo, hi)| {
                    let lo = lo.max(llo);
                    (lo <= hi).then_some((lo, hi))
                }),
                (None, None) => None,
            };
            // top edge of cell (i, j)
            let top_free = free(p[i], p[i + 1], q[j + 1], eps);
            let t = match (left, b) {
                (Some(_), _) => top_free,
                (None, Some((blo, _))) => top_free.and_then(|(lo, hi)| {
                    let lo = lo.max(blo);
                    (lo <= hi).then_some((lo, hi))
                }),
                (None, None) => None,
            };
            top.push(t);
            left = right;
        }
        if j == nq - 1 {
            return matches!(left, Some((_, hi)) if hi >= 1.0) || matches!(top[np - 1], Some((_, hi)) if hi >= 1.0);
        }
        bottom = top;
    }
    unreachable!()
}

fn point_to_curve_sup(x: Point, c: &[Point]) -> f64 {
    c.iter().map(|v| v.dist(x)).fold(0.0, f64::max)
}

fn diameter_bound(c: &[Point]) -> f64 {
    let s = c[0];
    2.0 * c.iter().map(|v| v.dist(s)).fold(0.0, f64::max)
}

fn canonical<'a>(a: &'a PolyCurve, b: &'a PolyCurve) -> (&'a PolyCurve, &'a PolyCurve) {
    let (va, vb) = (a.vertices(), b.vertices());
    let dim = a.dim().max(b.dim());
    let ord = va
        .iter()
        .zip(vb)
        .map(|(x, y)| x.lex_cmp(y, dim))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or_else(|| va.len().cmp(&vb.len()));
    if ord == Ordering::Greater {
        (b, a)
    } else {
        (a, b)
    }
}

/// Frechet distance to within `tol`, as an upper bound from bisection on the
/// free-space decision procedure. Arguments are put in a canonical order
/// first, so the value is exactly symmetric.
pub fn curve_distance(a: &PolyCurve, b: &PolyCurve, tol: f64) -> Result<f64> {
    if !(tol > 0.0) {
        return bad_param("distance tolerance must be positive");
    }
    let (a, b) = canonical(a, b);
    let (p, q) = (a.vertices(), b.vertices());
    if p.len() == 1 {
        return Ok(point_to_curve_sup(p[0], q));
    }
    if q.len() == 1 {
        return Ok(point_to_curve_sup(q[0], p));
    }
    let mut lo = p[0].dist(q[0]).max(p[p.len() - 1].dist(q[q.len() - 1]));
    if decide(p, q, lo) {
        return Ok(lo);
    }
    let mut hi = p[0].dist(q[0]) + diameter_bound(p) + diameter_bound(q);
    while !decide(p, q, hi) {
        hi *= 2.0;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if decide(p, q, mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Pairwise distances, row `i` for curve `i` of `f1`.
pub fn distance_matrix(f1: &CurveConfig, f2: &CurveConfig, tol: f64) -> Result<Vec<Vec<f64>>> {
    let pairs: Vec<(usize, usize)> =
        (0..f1.len()).flat_map(|i| (0..f2.len()).map(move |j| (i, j))).collect();
    let flat: Vec<f64> = pairs
        .par_iter()
        .map(|&(i, j)| curve_distance(&f1.curves[i], &f2.curves[j], tol))
        .collect::<Result<_>>()?;
    Ok(flat.chunks(f2.len().max(1)).map(|r| r.to_vec()).take(f1.len()).collect())
}

/// `i,j,distance` lines with a header.
pub fn matrix_csv(m: &[Vec<f64>]) -> String {
    let mut out = String::from("i,j,distance\n");
    for (i, row) in m.iter().enumerate() {
        for (j, d) in row.iter().enumerate() {
            writeln!(out, "{i},{j},{d:e}").unwrap();
        }
    }
    out
}

/// Hausdorff distance over the curve metric. An empty side yields the
/// diameter of the joint region as a sentinel; two empty sides yield 0.
pub fn config_distance(f1: &CurveConfig, f2: &CurveConfig, tol: f64) -> Result<f64> {
    match (f1.is_empty(), f2.is_empty()) {
        (true, true) => return Ok(0.0),
        (true, false) | (false, true) => {
            let mut r = f1.region;
            r.include(f2.region.lo);
            r.include(f2.region.hi);
            return Ok(r.diameter());
        }
        _ => {}
    }
    let m = distance_matrix(f1, f2, tol)?;
    let fwd = m.iter().map(|r| r.iter().copied().fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    let bwd = (0..f2.len())
        .map(|j| m.iter().map(|r| r[j]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    Ok(fwd.max(bwd))
}

#[derive(Clone, Debug, PartialEq)]
pub struct GapReport {
    pub gaps: Vec<f64>,
    /// Whether the gaps never increase along the series.
    pub nonincreasing: bool,
}

/// Distances between consecutive configurations of a series.
pub fn coupling_gap(series: &[CurveConfig], tol: f64) -> Result<GapReport> {
    if series.len() < 2 {
        return bad_param("coupling gap needs at least two configurations");
    }
    let gaps: Vec<f64> =
        series.windows(2).map(|w| config_distance(&w[0], &w[1], tol)).collect::<Result<_>>()?;
    let nonincreasing = gaps.windows(2).all(|w| w[1] <= w[0] + tol);
    Ok(GapReport { gaps, nonincreasing })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg(h: f64) -> PolyCurve {
        PolyCurve::from_xy(&[(0.0, h), (1.0, h)], 0.0).unwrap()
    }

    /// Discrete Frechet on dense resamplings, an upper bound converging to
    /// the continuous value.
    fn discrete_frechet(a: &[Point], b: &[Point]) -> f64 {
        let mut d = vec![vec![f64::INFINITY; b.len()]; a.len()];
        for i in 0..a.len() {
            for j in 0..b.len() {
                let c = a[i].dist(b[j]);
                let prev = match (i, j) {
                    (0, 0) => 0.0,
                    (0, _) => d[0][j - 1],
                    (_, 0) => d[i - 1][0],
                    _ => d[i - 1][j].min(d[i][j - 1]).min(d[i - 1][j - 1]),
                };
                d[i][j] = c.max(prev);
            }
        }
        d[a.len() - 1][b.len() - 1]
    }

    fn resample(c: &PolyCurve, n: usize) -> Vec<Point> {
        (0..=n).map(|i| c.point_at(c.length() * i as f64 / n as f64)).collect()
    }

    #[test]
    fn translation_and_identity() {
        let d = curve_distance(&seg(0.0), &seg(0.25), 1e-10).unwrap();
        assert!((d - 0.25).abs() < 1e-9);
        assert!(curve_distance(&seg(0.0), &seg(0.0), 1e-10).unwrap() <= 1e-9);
    }

    #[test]
    fn v_path_against_discrete_oracle() {
        let v = PolyCurve::from_xy(&[(0.0, 0.0), (0.5, 0.3), (1.0, 0.0)], 0.0).unwrap();
        let d = curve_distance(&seg(0.0), &v, 1e-10).unwrap();
        assert!((d - 0.3).abs() < 1e-9);
        let disc = discrete_frechet(&resample(&seg(0.0), 1000), &resample(&v, 1000));
        assert!(disc >= d - 1e-9 && disc - d < 2e-3);
    }

    #[test]
    fn backtracking_needs_the_far_point() {
        // a curve that runs to x = 1 and back to x = 0.5 vs a straight run to 0.5
        let a = PolyCurve::from_xy(&[(0.0, 0.0), (1.0, 0.0), (0.5, 0.0)], 0.0).unwrap();
        let b = PolyCurve::from_xy(&[(0.0, 0.0), (0.5, 0.0)], 0.0).unwrap();
        let d = curve_distance(&a, &b, 1e-10).unwrap();
        assert!((d - 0.5).abs() < 1e-9);
        assert_eq!(d, curve_distance(&b, &a, 1e-10).unwrap());
    }

    #[test]
    fn configurations() {
        let f1 = CurveConfig::around(vec![seg(0.0)], 1.0).unwrap();
        let f2 = CurveConfig::around(vec![seg(0.0), seg(0.75)], 1.0).unwrap();
        assert!(config_distance(&f1, &f1, 1e-10).unwrap() <= 1e-9);
        assert!((config_distance(&f1, &f2, 1e-10).unwrap() - 0.75).abs() < 1e-9);
        let g = coupling_gap(&[f1.clone(), f1.clone(), f1], 1e-10).unwrap();
        assert!(g.gaps.iter().all(|&x| x <= 1e-9) && g.nonincreasing);
    }
}
