use crate::curve::PolyCurve;
use crate::error::{bad_param, Result};
use crate::geom::Point;

/// Deterministic test curves. Each carries its leg length as step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Fixture {
    /// unit segment cut into `2^depth` legs
    Line { depth: u32 },
    /// `2^depth` unit steps right then up, from `(0,0)` to `(1,1)`
    Staircase { depth: u32 },
    /// Koch curve over `[0,1]`, `4^depth` legs of length `3^-depth`
    Koch { depth: u32 },
    /// out along `y = 0` to `x = 1`, up by `gap`, back to `x = 0`
    Hairpin { gap: f64, step: f64 },
    /// Hilbert curve through the centres of `4^depth` cells of `[0,1]^2`
    Hilbert { depth: u32 },
}

fn subdivide(corners: &[Point], step: f64) -> Vec<Point> {
    let mut out = vec![corners[0]];
    for w in corners.windows(2) {
        let k = ((w[0].dist(w[1]) / step) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
        for i in 1..=k {
            out.push(w[0].lerp(w[1], i as f64 / k as f64));
        }
    }
    out
}

fn koch(depth: u32) -> Vec<Point> {
    let mut pts = vec![Point::new2(0.0, 0.0), Point::new2(1.0, 0.0)];
    let (c, s) = (0.5, -(3f64.sqrt()) / 2.0);
    for _ in 0..depth {
        let mut next = Vec::with_capacity(4 * pts.len());
        for w in pts.windows(2) {
            let (a, b) = (w[0], w[1]);
            let d = (b - a) * (1.0 / 3.0);
            let p = a + d;
            let q = a + d * 2.0;
            // apex: d rotated by +60 degrees
            let apex = p + Point::new2(c * d.x() + s * d.y(), -s * d.x() + c * d.y());
            next.extend([a, p, apex, q]);
        }
        next.push(*pts.last().unwrap());
        pts = next;
    }
    pts
}

fn hilbert_d2xy(order: u64, d: u64) -> (u64, u64) {
    let (mut x, mut y) = (0, 0);
    let mut t = d;
    let mut s = 1;
    while s < order {
        let rx = 1 & (t / 2);
        let ry = 1 & (t ^ rx);
        if ry == 0 {
            if rx == 1 {
                x = s - 1 - x;
                y = s - 1 - y;
            }
            std::mem::swap(&mut x, &mut y);
        }
        x += s * rx;
        y += s * ry;
        t /= 4;
        s *= 2;
    }
    (x, y)
}

pub fn gen_fixture(kind: Fixture) -> Result<PolyCurve> {
    const MAX_DEPTH: u32 = 12;
    match kind {
        Fixture::Line { depth } | Fixture::Staircase { depth } | Fixture::Koch { depth } | Fixture::Hilbert { depth }
            if depth > MAX_DEPTH =>
        {
            bad_param(format!("fixture depth {depth} exceeds {MAX_DEPTH}"))
        }
        Fixture::Line { depth } => {
            let n = 1usize << depth;
            let pts = (0..=n).map(|i| Point::new2(i as f64 / n as f64, 0.0)).collect();
            PolyCurve::new(2, pts, 1.0 / n as f64)
        }
        Fixture::Staircase { depth } => {
            let n = 1usize << depth;
            let h = 1.0 / n as f64;
            let mut pts = vec![Point::new2(0.0, 0.0)];
            for i in 0..n {
                pts.push(Point::new2((i + 1) as f64 * h, i as f64 * h));
                pts.push(Point::new2((i + 1) as f64 * h, (i + 1) as f64 * h));
            }
            PolyCurve::new(2, pts, h)
        }
        Fixture::Koch { depth } => PolyCurve::new(2, koch(depth), 3f64.powi(-(depth as i32))),
        Fixture::Hairpin { gap, step } => {
            if !(gap > 0.0 && gap < 1.0 && step > 0.0) {
                return bad_param("hairpin needs 0 < gap < 1 and step > 0");
            }
            let corners = [Point::new2(0.0, 0.0), Point::new2(1.0, 0.0), Point::new2(1.0, gap), Point::new2(0.0, gap)];
            PolyCurve::new(2, subdivide(&corners, step), step)
        }
        Fixture::Hilbert { depth } => {
            let order = 1u64 << depth;
            let h = 1.0 / order as f64;
            let pts = (0..order * order)
                .map(|d| {
                    let (x, y) = hilbert_d2xy(order, d);
                    Point::new2((x as f64 + 0.5) * h, (y as f64 + 0.5) * h)
                })
                .collect();
            PolyCurve::new(2, pts, h)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn koch_arithmetic() {
        let c = gen_fixture(Fixture::Koch { depth: 0 }).unwrap();
        assert_eq!(c.vertices(), &[Point::new2(0.0, 0.0), Point::new2(1.0, 0.0)]);
        for d in 1..=5 {
            let c = gen_fixture(Fixture::Koch { depth: d }).unwrap();
            assert_eq!(c.vertices().len(), 4usize.pow(d) + 1);
            assert!((c.length() - (4.0f64 / 3.0).powi(d as i32)).abs() < 1e-9);
            assert!(c.vertices().iter().all(|v| v.y() >= -1e-12));
            assert!((c.end().x() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn staircase_and_line() {
        let c = gen_fixture(Fixture::Staircase { depth: 3 }).unwrap();
        assert_eq!(c.n_legs(), 16);
        assert!((c.diameter() - 2f64.sqrt()).abs() < 1e-12);
        assert!((c.length() - 2.0).abs() < 1e-12);
        let l = gen_fixture(Fixture::Line { depth: 4 }).unwrap();
        assert_eq!(l.n_legs(), 16);
        assert_eq!(l.span(), 1.0);
    }

    #[test]
    fn hairpin_and_hilbert() {
        let c = gen_fixture(Fixture::Hairpin { gap: 0.0625, step: 1.0 / 64.0 }).unwrap();
        assert!((c.length() - 2.0625).abs() < 1e-12);
        assert!((c.span() - 0.0625).abs() < 1e-12);
        let h = gen_fixture(Fixture::Hilbert { depth: 3 }).unwrap();
        assert_eq!(h.vertices().len(), 64);
        for i in 0..h.n_legs() {
            assert!((h.leg_len(i) - 0.125).abs() < 1e-12);
        }
    }
}
