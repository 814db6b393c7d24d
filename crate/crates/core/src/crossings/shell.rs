use std::collections::HashSet;

use crate::curve::{CurveConfig, PolyCurve};
use crate::error::{bad_param, Result};
use crate::geom::{line_ball, point_segment_dist, Bbox, Point, SegmentGrid};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Shell {
    pub center: Point,
    pub inner: f64,
    pub outer: f64,
}

impl Shell {
    pub fn new(center: Point, inner: f64, outer: f64) -> Result<Self> {
        if !(inner > 0.0 && inner <= outer && outer.is_finite()) {
            return bad_param(format!("shell needs 0 < r <= R, got r={inner} R={outer}"));
        }
        Ok(Shell { center, inner, outer })
    }
}

/// Whether traversals are summed over the curves or the best single curve counts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Counting {
    #[default]
    AcrossCurves,
    PerCurve,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Visit {
    Inner,
    Outer,
}

/// Alternation counter between visits of `{rho <= r}` and `{rho >= R}`.
/// The number of alternations is the maximal number of disjoint traversals.
#[derive(Default)]
struct Alternations {
    last: Option<Visit>,
    count: usize,
}

impl Alternations {
    fn visit(&mut self, v: Visit) {
        if let Some(l) = self.last {
            if l != v {
                self.count += 1;
            }
        }
        self.last = Some(v);
    }

    fn leg(&mut self, a: Point, b: Point, s: &Shell) {
        let outer = line_ball(a, b, s.center, s.outer);
        let (u1, u2) = match outer {
            Some((u1, u2)) if u1 < u2 && u2 > 0.0 && u1 < 1.0 => (u1, u2),
            _ => {
                self.visit(Visit::Outer);
                return;
            }
        };
        if u1 >= 0.0 {
            self.visit(Visit::Outer);
        }
        if let Some((v1, v2)) = line_ball(a, b, s.center, s.inner) {
            if v1.max(0.0) <= v2.min(1.0) {
                self.visit(Visit::Inner);
            }
        }
        if u2 <= 1.0 {
            self.visit(Visit::Outer);
        }
    }
}

fn curve_traversals(c: &PolyCurve, s: &Shell) -> usize {
    let mut alt = Alternations::default();
    if c.n_legs() == 0 {
        return 0;
    }
    for i in 0..c.n_legs() {
        let (a, b) = c.leg(i);
        alt.leg(a, b, s);
    }
    alt.count
}

pub fn shell_traversals_per_curve(f: &CurveConfig, s: &Shell) -> Vec<usize> {
    f.curves.iter().map(|c| curve_traversals(c, s)).collect()
}

/// Disjoint traversals of the closed shell, summed over all curves.
pub fn shell_traversals(f: &CurveConfig, s: &Shell) -> usize {
    shell_traversals_per_curve(f, s).iter().sum()
}

/// Legs of a configuration in a bucket grid, for repeated local shell queries.
struct LegIndex<'a> {
    f: &'a CurveConfig,
    ids: Vec<(usize, usize)>,
    grid: SegmentGrid,
}

impl<'a> LegIndex<'a> {
    fn new(f: &'a CurveConfig, cell: f64) -> Self {
        let mut grid = SegmentGrid::new(cell);
        let mut ids = Vec::new();
        for (ci, c) in f.curves.iter().enumerate() {
            for li in 0..c.n_legs() {
                let (a, b) = c.leg(li);
                grid.insert(ids.len(), a, b);
                ids.push((ci, li));
            }
        }
        LegIndex { f, ids, grid }
    }

    fn traversals(&self, s: &Shell, mode: Counting, scratch: &mut Vec<usize>) -> usize {
        let bb = Bbox::new(s.center, s.center).inflate(s.outer);
        self.grid.query(bb, scratch);
        let mut total = 0;
        let mut best = 0;
        let mut cur_curve = usize::MAX;
        let mut prev_leg = 0;
        let mut alt = Alternations::default();
        for &id in scratch.iter() {
            let (ci, li) = self.ids[id];
            if ci != cur_curve {
                total += alt.count;
                best = best.max(alt.count);
                alt = Alternations::default();
                cur_curve = ci;
                if li > 0 {
                    alt.visit(Visit::Outer);
                }
            } else if li > prev_leg + 1 {
                alt.visit(Visit::Outer);
            }
            let (a, b) = self.f.curves[ci].leg(li);
            alt.leg(a, b, s);
            prev_leg = li;
        }
        total += alt.count;
        best = best.max(alt.count);
        match mode {
            Counting::AcrossCurves => total,
            Counting::PerCurve => best,
        }
    }
}

/// Grid points `spacing * Z^d` inside `region` within `reach` of some leg.
fn centers_near(f: &CurveConfig, spacing: f64, reach: f64) -> Vec<Point> {
    let d = f.dim;
    let mut set: HashSet<[i64; 3]> = HashSet::new();
    for c in &f.curves {
        let legs: Vec<(Point, Point)> = if c.n_legs() == 0 {
            vec![(c.start(), c.start())]
        } else {
            (0..c.n_legs()).map(|i| c.leg(i)).collect()
        };
        for (a, b) in legs {
            let mut bb = Bbox::new(a, a);
            bb.include(b);
            let bb = bb.inflate(reach);
            let lo: Vec<i64> = (0..3).map(|k| if k < d { (bb.lo.0[k] / spacing).ceil() as i64 } else { 0 }).collect();
            let hi: Vec<i64> = (0..3).map(|k| if k < d { (bb.hi.0[k] / spacing).floor() as i64 } else { 0 }).collect();
            for i in lo[0]..=hi[0] {
                for j in lo[1]..=hi[1] {
                    for k in lo[2]..=hi[2] {
                        let x = Point([i as f64 * spacing, j as f64 * spacing, k as f64 * spacing]);
                        if point_segment_dist(x, a, b) <= reach {
                            set.insert([i, j, k]);
                        }
                    }
                }
            }
        }
    }
    let mut keys: Vec<[i64; 3]> = set.into_iter().collect();
    keys.sort_unstable();
    keys.into_iter()
        .map(|k| Point([k[0] as f64 * spacing, k[1] as f64 * spacing, k[2] as f64 * spacing]))
        .filter(|x| f.region.contains(*x, 1e-12))
        .collect()
}

/// First center of the grid `spacing * Z^d` (in the region) whose shell
/// `D(x; inner, outer)` is traversed at least `k` times.
pub fn kfold_center(f: &CurveConfig, inner: f64, outer: f64, spacing: f64, k: usize, mode: Counting) -> Option<Point> {
    if k == 0 {
        return Some(f.region.lo);
    }
    let idx = LegIndex::new(f, 2.0 * outer);
    let mut scratch = Vec::new();
    centers_near(f, spacing, inner).into_iter().find(|&x| {
        let s = Shell { center: x, inner, outer };
        idx.traversals(&s, mode, &mut scratch) >= k
    })
}

pub fn min_kfold_scale(f: &CurveConfig, eps: f64, k: usize) -> Result<f64> {
    min_kfold_scale_with(f, eps, k, Counting::AcrossCurves)
}

/// Smallest dyadic `r = 2^-n >= cutoff` at which a discretized shell
/// `D(x; 3 r^(1+eps), r/2)` with `x` on `(2 r^(1+eps)/sqrt d) Z^d` is
/// traversed `k` times; 1 if none. Scales where the inner radius is not
/// below the outer one carry no admissible shell and are skipped.
pub fn min_kfold_scale_with(f: &CurveConfig, eps: f64, k: usize, mode: Counting) -> Result<f64> {
    if !(eps > 0.0 && eps < 1.0) {
        return bad_param(format!("eps must lie in (0, 1), got {eps}"));
    }
    if k == 0 {
        return bad_param("k must be at least 1");
    }
    let n_fine = (-(f.cutoff.log2()) + 1e-9).floor().max(0.0) as i32;
    for n in (0..=n_fine).rev() {
        let r = 2f64.powi(-n);
        let inner = 3.0 * r.powf(1.0 + eps);
        let outer = r / 2.0;
        if inner >= outer {
            continue;
        }
        let spacing = 2.0 * r.powf(1.0 + eps) / (f.dim as f64).sqrt();
        if kfold_center(f, inner, outer, spacing, k, mode).is_some() {
            return Ok(r);
        }
    }
    Ok(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(pts: &[(f64, f64)]) -> CurveConfig {
        CurveConfig::around(vec![PolyCurve::from_xy(pts, 0.0).unwrap()], 0.01).unwrap()
    }

    #[test]
    fn radial_segment_once() {
        let f = cfg(&[(0.0, 0.0), (1.0, 0.0)]);
        let s = Shell::new(Point::new2(0.0, 0.0), 0.2, 0.5).unwrap();
        assert_eq!(shell_traversals(&f, &s), 1);
    }

    #[test]
    fn inside_and_through() {
        let f = cfg(&[(0.0, 0.0), (0.1, 0.05)]);
        let s = Shell::new(Point::new2(0.0, 0.0), 0.2, 0.5).unwrap();
        assert_eq!(shell_traversals(&f, &s), 0);
        // a chord through the centre enters and leaves the inner ball
        let f = cfg(&[(-1.0, 0.0), (1.0, 0.0)]);
        assert_eq!(shell_traversals(&f, &s), 2);
        // a chord missing the inner ball does not traverse
        let f = cfg(&[(-1.0, 0.3), (1.0, 0.3)]);
        assert_eq!(shell_traversals(&f, &s), 0);
    }

    #[test]
    fn s_shape_counts_excursions() {
        let f = cfg(&[(1.0, 0.1), (0.0, 0.1), (0.0, -0.1), (1.0, -0.1)]);
        let s = Shell::new(Point::new2(0.0, 0.0), 0.2, 0.5).unwrap();
        assert_eq!(shell_traversals(&f, &s), 2);
    }

    #[test]
    fn indexed_count_matches_direct() {
        let f = cfg(&[(0.0, 0.5), (0.5, 0.5), (0.5, 0.52), (0.1, 0.52), (0.1, 0.9), (0.9, 0.9), (0.9, 0.1)]);
        let idx = LegIndex::new(&f, 0.2);
        let mut scratch = Vec::new();
        for i in 0..20 {
            for j in 0..20 {
                let s = Shell { center: Point::new2(i as f64 * 0.05, j as f64 * 0.05), inner: 0.03, outer: 0.1 };
                assert_eq!(idx.traversals(&s, Counting::AcrossCurves, &mut scratch), shell_traversals(&f, &s));
            }
        }
    }

    #[test]
    fn straight_segment_never_triples() {
        let f = cfg(&[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(min_kfold_scale(&f, 0.5, 3).unwrap(), 1.0);
    }
}
