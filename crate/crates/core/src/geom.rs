//! Points in R^d for d <= 3 and the line/ball/capsule primitives the
//! counting and crossing code is built on.
//!
//! Coordinates beyond the ambient dimension are kept at zero, so vector
//! arithmetic never needs to know `d`.

use std::ops::{Add, Mul, Sub};

pub const MAX_DIM: usize = 3;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Point(pub [f64; MAX_DIM]);

impl Point {
    pub const ORIGIN: Point = Point([0.0; MAX_DIM]);

    pub fn new2(x: f64, y: f64) -> Self {
        Point([x, y, 0.0])
    }

    pub fn new3(x: f64, y: f64, z: f64) -> Self {
        Point([x, y, z])
    }

    /// Builds a point from up to three coordinates.
    pub fn from_slice(c: &[f64]) -> Self {
        let mut p = [0.0; MAX_DIM];
        for (dst, src) in p.iter_mut().zip(c) {
            *dst = *src;
        }
        Point(p)
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn y(&self) -> f64 {
        self.0[1]
    }

    pub fn dot(self, o: Point) -> f64 {
        self.0[0] * o.0[0] + self.0[1] * o.0[1] + self.0[2] * o.0[2]
    }

    pub fn norm2(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm2().sqrt()
    }

    pub fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }

    pub fn dist2(self, o: Point) -> f64 {
        (self - o).norm2()
    }

    pub fn lerp(self, o: Point, t: f64) -> Point {
        self + (o - self) * t
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Lexicographic comparison over the first `dim` coordinates.
    pub fn lex_cmp(&self, o: &Point, dim: usize) -> std::cmp::Ordering {
        for k in 0..dim {
            match self.0[k].partial_cmp(&o.0[k]) {
                Some(std::cmp::Ordering::Equal) | None => continue,
                Some(ord) => return ord,
            }
        }
        std::cmp::Ordering::Equal
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point([self.0[0] + o.0[0], self.0[1] + o.0[1], self.0[2] + o.0[2]])
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point([self.0[0] - o.0[0], self.0[1] - o.0[1], self.0[2] - o.0[2]])
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, s: f64) -> Point {
        Point([self.0[0] * s, self.0[1] * s, self.0[2] * s])
    }
}

/// Axis-aligned box.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Bbox {
    pub lo: Point,
    pub hi: Point,
}

impl Bbox {
    pub fn new(lo: Point, hi: Point) -> Self {
        Bbox { lo, hi }
    }

    pub fn unit(dim: usize) -> Self {
        let mut hi = [0.0; MAX_DIM];
        for c in hi.iter_mut().take(dim) {
            *c = 1.0;
        }
        Bbox { lo: Point::ORIGIN, hi: Point(hi) }
    }

    pub fn of_points<'a>(pts: impl IntoIterator<Item = &'a Point>) -> Option<Self> {
        let mut it = pts.into_iter();
        let first = *it.next()?;
        let mut b = Bbox { lo: first, hi: first };
        for p in it {
            b.include(*p);
        }
        Some(b)
    }

    pub fn include(&mut self, p: Point) {
        for k in 0..MAX_DIM {
            self.lo.0[k] = self.lo.0[k].min(p.0[k]);
            self.hi.0[k] = self.hi.0[k].max(p.0[k]);
        }
    }

    pub fn contains(&self, p: Point, slack: f64) -> bool {
        (0..MAX_DIM).all(|k| p.0[k] >= self.lo.0[k] - slack && p.0[k] <= self.hi.0[k] + slack)
    }

    pub fn diameter(&self) -> f64 {
        self.lo.dist(self.hi)
    }

    pub fn inflate(&self, r: f64) -> Bbox {
        let d = Point([r, r, r]);
        Bbox { lo: self.lo - d, hi: self.hi + d }
    }
}

/// Real roots of `a t^2 + b t + c = 0` with `a > 0`, as `(lo, hi)`.
fn quad_roots(a: f64, b: f64, c: f64) -> Option<(f64, f64)> {
    let disc = b * b - 4.0 * a * c;
    if disc < 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    // numerically stable pair
    let q = if b >= 0.0 { -0.5 * (b + sq) } else { -0.5 * (b - sq) };
    let (r1, r2) = if q == 0.0 { (0.0, 0.0) } else { (q / a, c / q) };
    Some(if r1 <= r2 { (r1, r2) } else { (r2, r1) })
}

/// Parameters `t` (unclipped) with `|a + t (b - a) - c| <= r`.
pub fn line_ball(a: Point, b: Point, c: Point, r: f64) -> Option<(f64, f64)> {
    let d = b - a;
    let dd = d.norm2();
    let w = a - c;
    if dd == 0.0 {
        return if w.norm2() <= r * r { Some((f64::NEG_INFINITY, f64::INFINITY)) } else { None };
    }
    quad_roots(dd, 2.0 * d.dot(w), w.norm2() - r * r)
}

/// Parameters `t` (unclipped) whose point on the line `a + t (b - a)` lies
/// within distance `r` of the segment `[p, q]`. The set is an interval because
/// the distance to a convex set is convex.
pub fn line_capsule(a: Point, b: Point, p: Point, q: Point, r: f64) -> Option<(f64, f64)> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    let mut merge = |iv: Option<(f64, f64)>| {
        if let Some((l, h)) = iv {
            if l <= h {
                lo = lo.min(l);
                hi = hi.max(h);
            }
        }
    };
    merge(line_ball(a, b, p, r));
    merge(line_ball(a, b, q, r));
    let e = q - p;
    let ee = e.norm2();
    if ee > 0.0 {
        merge(line_slab_cylinder(a, b, p, e, ee, r));
    }
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// Points of the line inside the finite round cylinder with axis `[p, p + e]`.
fn line_slab_cylinder(a: Point, b: Point, p: Point, e: Point, ee: f64, r: f64) -> Option<(f64, f64)> {
    let d = b - a;
    let w = a - p;
    // axial coordinate u(t) = (w + t d).e / ee must lie in [0, 1]
    let u0 = w.dot(e) / ee;
    let u1 = d.dot(e) / ee;
    let (mut lo, mut hi) = if u1.abs() < 1e-300 {
        if (0.0..=1.0).contains(&u0) {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            return None;
        }
    } else {
        let t0 = -u0 / u1;
        let t1 = (1.0 - u0) / u1;
        (t0.min(t1), t0.max(t1))
    };
    // perpendicular part
    let w0 = w - e * u0;
    let w1 = d - e * u1;
    let aa = w1.norm2();
    if aa <= 1e-300 {
        if w0.norm2() > r * r {
            return None;
        }
    } else {
        let (r0, r1) = quad_roots(aa, 2.0 * w0.dot(w1), w0.norm2() - r * r)?;
        lo = lo.max(r0);
        hi = hi.min(r1);
    }
    if lo <= hi {
        Some((lo, hi))
    } else {
        None
    }
}

/// Distance from `x` to the segment `[p, q]`.
pub fn point_segment_dist(x: Point, p: Point, q: Point) -> f64 {
    let e = q - p;
    let ee = e.norm2();
    if ee == 0.0 {
        return x.dist(p);
    }
    let t = ((x - p).dot(e) / ee).clamp(0.0, 1.0);
    x.dist(p + e * t)
}

/// Distance between segments `[a, b]` and `[c, d]`.
pub fn segment_segment_dist(a: Point, b: Point, c: Point, d: Point) -> f64 {
    let u = b - a;
    let v = d - c;
    let w = a - c;
    let uu = u.norm2();
    let vv = v.norm2();
    if uu == 0.0 {
        return point_segment_dist(a, c, d);
    }
    if vv == 0.0 {
        return point_segment_dist(c, a, b);
    }
    let uv = u.dot(v);
    let uw = u.dot(w);
    let vw = v.dot(w);
    let den = uu * vv - uv * uv;
    let mut best = point_segment_dist(a, c, d)
        .min(point_segment_dist(b, c, d))
        .min(point_segment_dist(c, a, b))
        .min(point_segment_dist(d, a, b));
    if den > 1e-14 * uu * vv {
        let s = (uv * vw - vv * uw) / den;
        let t = (uu * vw - uv * uw) / den;
        if (0.0..=1.0).contains(&s) && (0.0..=1.0).contains(&t) {
            best = best.min((a + u * s).dist(c + v * t));
        }
    }
    best
}

/// 2D convex hull (monotone chain), collinear points dropped.
pub fn convex_hull_2d(pts: &mut Vec<Point>) {
    if pts.len() < 4 {
        return;
    }
    pts.sort_by(|a, b| a.lex_cmp(b, 2));
    pts.dedup();
    if pts.len() < 3 {
        return;
    }
    let cross = |o: Point, a: Point, b: Point| (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
    let mut hull: Vec<Point> = Vec::with_capacity(pts.len() + 1);
    for &p in pts.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    *pts = hull;
}

/// A growing point set used as a farthest-point oracle: only the convex hull
/// matters for `max |x - p|`, so in 2D the set is periodically pruned.
#[derive(Clone, Debug)]
pub struct FarSet {
    dim: usize,
    pts: Vec<Point>,
    pruned_len: usize,
}

impl FarSet {
    pub fn new(dim: usize) -> Self {
        FarSet { dim, pts: Vec::new(), pruned_len: 16 }
    }

    pub fn clear(&mut self) {
        self.pts.clear();
        self.pruned_len = 16;
    }

    pub fn push(&mut self, p: Point) {
        self.pts.push(p);
        if self.dim == 2 && self.pts.len() > 2 * self.pruned_len {
            convex_hull_2d(&mut self.pts);
            self.pruned_len = self.pts.len().max(16);
        }
    }

    pub fn points(&self) -> &[Point] {
        &self.pts
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }
}

/// Uniform bucket grid over segments, keyed by integer cell.
#[derive(Clone, Debug)]
pub struct SegmentGrid {
    cell: f64,
    buckets: std::collections::HashMap<[i64; 3], Vec<usize>>,
}

impl SegmentGrid {
    pub fn new(cell: f64) -> Self {
        SegmentGrid { cell, buckets: std::collections::HashMap::new() }
    }

    fn key(&self, p: Point) -> [i64; 3] {
        let f = |v: f64| (v / self.cell).floor() as i64;
        [f(p.0[0]), f(p.0[1]), f(p.0[2])]
    }

    pub fn insert(&mut self, id: usize, a: Point, b: Point) {
        let mut bb = Bbox { lo: a, hi: a };
        bb.include(b);
        let lo = self.key(bb.lo);
        let hi = self.key(bb.hi);
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                for k in lo[2]..=hi[2] {
                    self.buckets.entry([i, j, k]).or_default().push(id);
                }
            }
        }
    }

    /// Ids in cells meeting `bb`, sorted and deduplicated.
    pub fn query(&self, bb: Bbox, out: &mut Vec<usize>) {
        out.clear();
        let lo = self.key(bb.lo);
        let hi = self.key(bb.hi);
        for i in lo[0]..=hi[0] {
            for j in lo[1]..=hi[1] {
                for k in lo[2]..=hi[2] {
                    if let Some(v) = self.buckets.get(&[i, j, k]) {
                        out.extend_from_slice(v);
                    }
                }
            }
        }
        out.sort_unstable();
        out.dedup();
    }
}
