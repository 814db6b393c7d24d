//! Polygonal curves, finite configurations of them, and the counting
//! functionals (partition count, packing count, box count).

mod count;
pub mod io;

pub use count::{
    box_cells, box_constant, box_count, packing_count, partition_count, partition_count_vertex_cuts,
    partition_cuts, prefix_partition_counts,
};

use crate::error::{Error, Result};
use crate::geom::{Bbox, Point};

/// Relative slack accepted on the leg-length bound.
const STEP_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct PolyCurve {
    dim: usize,
    vertices: Vec<Point>,
    step: f64,
    /// cumulative arc length at each vertex
    arc: Vec<f64>,
}

impl PolyCurve {
    /// `step = 0` disables the leg-length check (continuum fixtures).
    pub fn new(dim: usize, vertices: Vec<Point>, step: f64) -> Result<Self> {
        if !(1..=crate::geom::MAX_DIM).contains(&dim) {
            return Err(Error::InvalidCurve(format!("dimension {dim} unsupported")));
        }
        if vertices.is_empty() {
            return Err(Error::InvalidCurve("no vertices".into()));
        }
        if !(step >= 0.0 && step.is_finite()) {
            return Err(Error::InvalidCurve(format!("bad step {step}")));
        }
        for (i, v) in vertices.iter().enumerate() {
            if !v.is_finite() || v.0[dim..].iter().any(|&c| c != 0.0) {
                return Err(Error::InvalidCurve(format!("bad vertex {i}")));
            }
        }
        let mut arc = Vec::with_capacity(vertices.len());
        arc.push(0.0);
        for (i, w) in vertices.windows(2).enumerate() {
            let len = w[0].dist(w[1]);
            if len == 0.0 {
                return Err(Error::InvalidCurve(format!("repeated vertex at {}", i + 1)));
            }
            if step > 0.0 && len > step * (1.0 + STEP_SLACK) {
                return Err(Error::InvalidCurve(format!("leg {i} has length {len} > step {step}")));
            }
            arc.push(arc[i] + len);
        }
        Ok(PolyCurve { dim, vertices, step, arc })
    }

    pub fn from_xy(pts: &[(f64, f64)], step: f64) -> Result<Self> {
        Self::new(2, pts.iter().map(|&(x, y)| Point::new2(x, y)).collect(), step)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn step(&self) -> f64 {
        self.step
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn n_legs(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn leg(&self, i: usize) -> (Point, Point) {
        (self.vertices[i], self.vertices[i + 1])
    }

    pub fn leg_len(&self, i: usize) -> f64 {
        self.arc[i + 1] - self.arc[i]
    }

    /// Arc length at vertex `i`.
    pub fn arc_at(&self, i: usize) -> f64 {
        self.arc[i]
    }

    pub fn length(&self) -> f64 {
        *self.arc.last().unwrap()
    }

    pub fn start(&self) -> Point {
        self.vertices[0]
    }

    pub fn end(&self) -> Point {
        *self.vertices.last().unwrap()
    }

    pub fn is_closed(&self) -> bool {
        self.vertices.len() > 1 && self.start() == self.end()
    }

    pub fn bbox(&self) -> Bbox {
        Bbox::of_points(&self.vertices).unwrap()
    }

    /// Diameter of the vertex set, which is the diameter of the curve.
    pub fn diameter(&self) -> f64 {
        let mut hull = self.vertices.clone();
        if self.dim == 2 {
            crate::geom::convex_hull_2d(&mut hull);
        }
        let mut best: f64 = 0.0;
        for i in 0..hull.len() {
            for j in i + 1..hull.len() {
                best = best.max(hull[i].dist2(hull[j]));
            }
        }
        best.sqrt()
    }

    /// Distance between the end points.
    pub fn span(&self) -> f64 {
        self.start().dist(self.end())
    }

    /// Leg index and local parameter for arc length `s`.
    pub fn locate(&self, s: f64) -> (usize, f64) {
        if self.vertices.len() == 1 {
            return (0, 0.0);
        }
        let s = s.clamp(0.0, self.length());
        let i = match self.arc.binary_search_by(|a| a.partial_cmp(&s).unwrap()) {
            Ok(i) => i.min(self.n_legs() - 1),
            Err(i) => i - 1,
        };
        let i = i.min(self.n_legs() - 1);
        let t = ((s - self.arc[i]) / self.leg_len(i)).clamp(0.0, 1.0);
        (i, t)
    }

    pub fn point_at(&self, s: f64) -> Point {
        if self.vertices.len() == 1 {
            return self.vertices[0];
        }
        let (i, t) = self.locate(s);
        let (a, b) = self.leg(i);
        a.lerp(b, t)
    }

    /// Arc length of local parameter `t` on leg `i`.
    pub fn arc_of(&self, i: usize, t: f64) -> f64 {
        self.arc[i] + t * self.leg_len(i)
    }

    /// The restriction to arc range `[s0, s1]`, with interpolated endpoints.
    pub fn sub_curve(&self, s0: f64, s1: f64) -> PolyCurve {
        let s0 = s0.clamp(0.0, self.length());
        let s1 = s1.clamp(s0, self.length());
        let mut v = vec![self.point_at(s0)];
        let (i0, _) = self.locate(s0);
        for k in i0 + 1..self.vertices.len() {
            if self.arc[k] >= s1 {
                break;
            }
            if self.arc[k] > s0 {
                v.push(self.vertices[k]);
            }
        }
        let end = self.point_at(s1);
        if *v.last().unwrap() != end {
            v.push(end);
        }
        v.dedup();
        PolyCurve::new(self.dim, v, 0.0).expect("sub-curve of a valid curve")
    }

    pub fn reversed(&self) -> PolyCurve {
        let mut v = self.vertices.clone();
        v.reverse();
        PolyCurve::new(self.dim, v, self.step).unwrap()
    }

    /// Same curve with a different step tag.
    pub fn with_step(&self, step: f64) -> Result<PolyCurve> {
        PolyCurve::new(self.dim, self.vertices.clone(), step)
    }

    /// Applies `f` to every vertex.
    pub fn map(&self, f: impl Fn(Point) -> Point) -> Result<PolyCurve> {
        PolyCurve::new(self.dim, self.vertices.iter().map(|&p| f(p)).collect(), self.step)
    }
}

/// A finite family of curves with a common cutoff inside a bounded region.
#[derive(Clone, Debug, PartialEq)]
pub struct CurveConfig {
    pub curves: Vec<PolyCurve>,
    pub cutoff: f64,
    pub region: Bbox,
    pub dim: usize,
}

impl CurveConfig {
    pub fn new(dim: usize, curves: Vec<PolyCurve>, cutoff: f64, region: Bbox) -> Result<Self> {
        if !(cutoff > 0.0 && cutoff.is_finite()) {
            return Err(Error::InvalidConfig(format!("bad cutoff {cutoff}")));
        }
        let slack = 1e-9 * region.diameter().max(1.0);
        for (i, c) in curves.iter().enumerate() {
            if c.dim() != dim {
                return Err(Error::InvalidConfig(format!("curve {i} has dimension {}", c.dim())));
            }
            if c.step() > cutoff * (1.0 + STEP_SLACK) {
                return Err(Error::InvalidConfig(format!("curve {i} step {} exceeds cutoff", c.step())));
            }
            if let Some(v) = c.vertices().iter().find(|v| !region.contains(**v, slack)) {
                return Err(Error::InvalidConfig(format!("curve {i} leaves the region at {:?}", v.0)));
            }
        }
        Ok(CurveConfig { curves, cutoff, region, dim })
    }

    /// A configuration over the bounding box of its curves.
    pub fn around(curves: Vec<PolyCurve>, cutoff: f64) -> Result<Self> {
        let dim = curves.first().map(|c| c.dim()).unwrap_or(2);
        let region = Bbox::of_points(curves.iter().flat_map(|c| c.vertices()))
            .unwrap_or_else(|| Bbox::unit(dim));
        Self::new(dim, curves, cutoff, region)
    }

    pub fn single(curve: PolyCurve) -> Result<Self> {
        let cutoff = if curve.step() > 0.0 { curve.step() } else { curve.length().max(1e-12) };
        Self::around(vec![curve], cutoff)
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }
}
