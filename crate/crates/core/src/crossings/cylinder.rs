use crate::curve::PolyCurve;
use crate::error::{bad_param, Error, Result};
use crate::geom::{line_ball, segment_segment_dist, Point};

/// Round cylinder (a rectangle in 2D) with face centres `a`, `b` and
/// cross-sectional diameter `width`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cylinder {
    pub a: Point,
    pub b: Point,
    pub width: f64,
}

/// Boundary rounding allowance, relative to the cylinder size.
const REL_SLACK: f64 = 1e-9;

impl Cylinder {
    pub fn new(a: Point, b: Point, width: f64) -> Result<Self> {
        if a.dist(b) <= 0.0 || !(width > 0.0) {
            return bad_param("cylinder needs positive length and width");
        }
        Ok(Cylinder { a, b, width })
    }

    pub fn length(&self) -> f64 {
        self.a.dist(self.b)
    }

    pub fn axis(&self) -> Point {
        (self.b - self.a) * (1.0 / self.length())
    }

    pub fn diameter(&self) -> f64 {
        self.length().hypot(self.width)
    }

    pub fn midpoint(&self) -> Point {
        self.a.lerp(self.b, 0.5)
    }

    /// Axial coordinate and distance from the axis line.
    fn coords(&self, p: Point) -> (f64, f64) {
        let e = self.axis();
        let w = p - self.a;
        let u = w.dot(e);
        (u, (w - e * u).norm())
    }

    pub fn contains(&self, p: Point, axial_slack: f64) -> bool {
        let (u, rho) = self.coords(p);
        let eps = REL_SLACK * self.diameter();
        u >= -axial_slack - eps && u <= self.length() + axial_slack + eps && rho <= 0.5 * self.width + eps
    }

    /// Parameters of the line `p + t (q - p)` inside the cylinder extended
    /// axially by `slack` on both ends.
    fn line_interval(&self, p: Point, q: Point, slack: f64) -> Option<(f64, f64)> {
        let e = self.axis();
        let d = q - p;
        let w = p - self.a;
        let eps = REL_SLACK * self.diameter();
        let (lo_u, hi_u) = (-slack - eps, self.length() + slack + eps);
        let u0 = w.dot(e);
        let u1 = d.dot(e);
        let (mut lo, mut hi) = if u1.abs() < 1e-300 {
            if u0 < lo_u || u0 > hi_u {
                return None;
            }
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            let t0 = (lo_u - u0) / u1;
            let t1 = (hi_u - u0) / u1;
            (t0.min(t1), t0.max(t1))
        };
        let w0 = w - e * u0;
        let w1 = d - e * u1;
        let r = 0.5 * self.width + eps;
        let aa = w1.norm2();
        if aa < 1e-300 {
            if w0.norm2() > r * r {
                return None;
            }
        } else {
            let b = 2.0 * w0.dot(w1);
            let c = w0.norm2() - r * r;
            let disc = b * b - 4.0 * aa * c;
            if disc < 0.0 {
                return None;
            }
            let sq = disc.sqrt();
            lo = lo.max((-b - sq) / (2.0 * aa));
            hi = hi.min((-b + sq) / (2.0 * aa));
        }
        if lo <= hi {
            Some((lo, hi))
        } else {
            None
        }
    }

    fn corners_2d(&self) -> [Point; 4] {
        let e = self.axis();
        let n = Point::new2(-e.y(), e.x()) * (0.5 * self.width);
        [self.a + n, self.b + n, self.b - n, self.a - n]
    }

    /// Whether `other` lies inside `self`. Exact for rectangles in 2D; in 3D
    /// a conservative bound on each face disk is used.
    pub fn contains_cylinder(&self, other: &Cylinder, dim: usize) -> bool {
        if dim <= 2 {
            return other.corners_2d().iter().all(|&p| self.contains(p, 0.0));
        }
        let e = self.axis();
        let f = other.axis();
        let r = 0.5 * other.width;
        // disk points: c + r (cos t g1 + sin t g2), g1, g2 orthonormal to f
        let axial_spread = r * (1.0 - f.dot(e).powi(2)).max(0.0).sqrt();
        let eps = REL_SLACK * self.diameter();
        [other.a, other.b].iter().all(|&c| {
            let (u, rho) = self.coords(c);
            u - axial_spread >= -eps
                && u + axial_spread <= self.length() + eps
                && rho + r <= 0.5 * self.width + eps
        })
    }

    /// Distance between two cylinders: exact for rectangles in 2D, a lower
    /// bound (axis distance minus radii) in 3D.
    pub fn distance(&self, other: &Cylinder, dim: usize) -> f64 {
        if dim <= 2 {
            let p = self.corners_2d();
            let q = other.corners_2d();
            if p.iter().any(|&x| other.contains(x, 0.0)) || q.iter().any(|&x| self.contains(x, 0.0)) {
                return 0.0;
            }
            let mut best = f64::INFINITY;
            for i in 0..4 {
                for j in 0..4 {
                    best = best.min(segment_segment_dist(p[i], p[(i + 1) % 4], q[j], q[(j + 1) % 4]));
                }
            }
            return best;
        }
        (segment_segment_dist(self.a, self.b, other.a, other.b) - 0.5 * (self.width + other.width)).max(0.0)
    }
}

/// Each member's distance to every other member is at least its diameter.
pub fn check_well_separated(family: &[Cylinder], dim: usize) -> Result<()> {
    for i in 0..family.len() {
        for j in 0..family.len() {
            if i != j && family[i].distance(&family[j], dim) < family[i].diameter() {
                return Err(Error::NotSeparated(format!("cylinders {i} and {j}")));
            }
        }
    }
    Ok(())
}

#[derive(Default)]
struct Anchors {
    a: Option<f64>,
    b: Option<f64>,
}

impl Anchors {
    fn idle(&self) -> bool {
        self.a.is_none() && self.b.is_none()
    }
}

/// Boundary rounding allowance on local leg parameters.
const T_SLACK: f64 = 1e-12;

/// Scans legs from `from` on. A traversal runs from the last contact with
/// one face ball to the first contact with the other, inside the cylinder
/// (extended axially by `tol`) throughout. With `local`, the scan stops as
/// soon as it leaves the cylinder with no pending contact.
pub(crate) fn scan_traversal(c: &PolyCurve, cyl: &Cylinder, tol: f64, from: usize, local: bool) -> Option<(f64, f64)> {
    let mut st = Anchors::default();
    if c.n_legs() == 0 {
        let p = c.start();
        let inside = cyl.contains(p, tol);
        return (inside && p.dist(cyl.a) <= tol && p.dist(cyl.b) <= tol).then_some((0.0, 0.0));
    }
    for i in from..c.n_legs() {
        let (p, q) = c.leg(i);
        let Some((t0, t1)) = cyl.line_interval(p, q, tol) else {
            st = Anchors::default();
            if local && i > from {
                return None;
            }
            continue;
        };
        let (i0, i1) = (t0.max(0.0), t1.min(1.0));
        if i0 > i1 {
            st = Anchors::default();
            if local && i > from {
                return None;
            }
            continue;
        }
        if i0 > T_SLACK {
            st = Anchors::default();
        }
        let mut contacts: Vec<(f64, f64, bool)> = Vec::with_capacity(2);
        for (centre, is_a) in [(cyl.a, true), (cyl.b, false)] {
            if let Some((u0, u1)) = line_ball(p, q, centre, tol) {
                let (u0, u1) = (u0.max(i0), u1.min(i1));
                if u0 <= u1 {
                    contacts.push((u0, u1, is_a));
                }
            }
        }
        contacts.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
        for (u0, u1, is_a) in contacts {
            let other = if is_a { st.b } else { st.a };
            if let Some(s0) = other {
                return Some((s0, c.arc_of(i, u0)));
            }
            let s = Some(c.arc_of(i, u1));
            if is_a {
                st.a = s;
            } else {
                st.b = s;
            }
        }
        if i1 < 1.0 - T_SLACK {
            st = Anchors::default();
        }
        if local && st.idle() {
            return None;
        }
    }
    None
}

/// Earliest-ending subsegment inside the closed cylinder joining the two
/// face centres (within `tol`), in either direction.
pub fn cylinder_traversal(c: &PolyCurve, cyl: &Cylinder, tol: f64) -> Option<(f64, f64)> {
    scan_traversal(c, cyl, tol, 0, false)
}
