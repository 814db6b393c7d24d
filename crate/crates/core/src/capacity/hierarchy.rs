use std::fmt::Write as _;

use crate::curve::PolyCurve;
use crate::error::{bad_param, Error, Result};
use crate::geom::{line_ball, line_capsule, point_segment_dist, segment_segment_dist, Bbox, Point, SegmentGrid};

/// A segment of the source curve, as an arc range, with its parent in the
/// previous generation and its number of immediate descendants.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HSegment {
    pub s0: f64,
    pub s1: f64,
    pub parent: Option<usize>,
    pub children: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FractalHierarchy {
    pub generations: Vec<Vec<HSegment>>,
    pub gamma: f64,
    pub m: usize,
    pub l0: f64,
    /// `gamma/m - 1`
    pub eps: f64,
}

impl FractalHierarchy {
    pub fn k_max(&self) -> usize {
        self.generations.len() - 1
    }

    pub fn scale(&self, k: usize) -> f64 {
        self.l0 * self.gamma.powi(-(k as i32))
    }

    /// `sqrt(m (m + 1))`
    pub fn beta(&self) -> f64 {
        ((self.m * (self.m + 1)) as f64).sqrt()
    }

    pub fn leaves(&self) -> &[HSegment] {
        self.generations.last().unwrap()
    }

    /// Mass of each segment of generation `k`: the product of inverse
    /// descendant counts along its ancestry.
    pub fn masses(&self, k: usize) -> Vec<f64> {
        let mut mass = vec![1.0];
        for g in 1..=k {
            let prev = &self.generations[g - 1];
            mass = self.generations[g]
                .iter()
                .map(|s| {
                    let p = s.parent.unwrap();
                    mass[p] / prev[p].children as f64
                })
                .collect();
        }
        mass
    }

    /// One line per segment: `generation parent s_start s_end`, indented by
    /// generation; the root has parent `-`.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "hierarchy gamma={} m={} L0={:.16e} kmax={}\n",
            self.gamma,
            self.m,
            self.l0,
            self.k_max()
        );
        for (k, gen) in self.generations.iter().enumerate() {
            for s in gen {
                let parent = s.parent.map_or("-".to_string(), |p| p.to_string());
                writeln!(out, "{:indent$}{} {} {:.16e} {:.16e}", "", k, parent, s.s0, s.s1, indent = 2 * k).unwrap();
            }
        }
        out
    }
}

/// Position on a curve: leg index and local parameter.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
struct Pos {
    leg: usize,
    t: f64,
}

fn at(c: &PolyCurve, p: Pos) -> Point {
    let (a, b) = c.leg(p.leg);
    a.lerp(b, p.t)
}

fn arc(c: &PolyCurve, p: Pos) -> f64 {
    c.arc_of(p.leg, p.t)
}

/// Local parameter range of leg `i` inside `[from, to]`.
fn range(i: usize, from: Pos, to: Pos) -> (f64, f64) {
    (if i == from.leg { from.t } else { 0.0 }, if i == to.leg { to.t } else { 1.0 })
}

/// First position in `[from, to]` at distance at least `r` from `centre`.
fn first_exit(c: &PolyCurve, from: Pos, to: Pos, centre: Point, r: f64) -> Option<Pos> {
    for i in from.leg..=to.leg {
        let (lo_t, hi_t) = range(i, from, to);
        let (a, b) = c.leg(i);
        match line_ball(a, b, centre, r) {
            None => return Some(Pos { leg: i, t: lo_t }),
            Some((lo, hi)) => {
                if lo_t <= lo {
                    return Some(Pos { leg: i, t: lo_t });
                }
                if hi <= hi_t {
                    return Some(Pos { leg: i, t: hi.max(lo_t) });
                }
            }
        }
    }
    None
}

/// Last position in `[from, x]` at distance at least `r` from the point at
/// `x`: the last entrance into the ball before `x`.
fn last_entrance(c: &PolyCurve, from: Pos, x: Pos, r: f64) -> Pos {
    let centre = at(c, x);
    for i in (from.leg..=x.leg).rev() {
        let (lo_t, hi_t) = range(i, from, x);
        let (a, b) = c.leg(i);
        match line_ball(a, b, centre, r) {
            None => return Pos { leg: i, t: hi_t },
            Some((lo, hi)) => {
                if hi <= hi_t {
                    return Pos { leg: i, t: hi_t };
                }
                if lo >= lo_t && lo <= hi_t {
                    return Pos { leg: i, t: lo };
                }
            }
        }
    }
    from
}

/// Pieces of the already cut subsegments, for distance queries.
struct Union {
    pieces: Vec<(Point, Point)>,
    grid: SegmentGrid,
    scratch: Vec<usize>,
    hint: Option<usize>,
}

impl Union {
    fn new(cell: f64) -> Self {
        Union { pieces: Vec::new(), grid: SegmentGrid::new(cell), scratch: Vec::new(), hint: None }
    }

    fn add(&mut self, c: &PolyCurve, from: Pos, to: Pos) {
        for i in from.leg..=to.leg {
            let (lo_t, hi_t) = range(i, from, to);
            let (a, b) = c.leg(i);
            let (p, q) = (a.lerp(b, lo_t), a.lerp(b, hi_t));
            self.grid.insert(self.pieces.len(), p, q);
            self.pieces.push((p, q));
        }
    }

    /// Distance from `x` to the nearest piece within `r`, remembered as the
    /// hint for later queries; infinite when none is that close.
    fn nearest(&mut self, x: Point, r: f64) -> f64 {
        self.grid.query(Bbox::new(x, x).inflate(r), &mut self.scratch);
        let mut best = f64::INFINITY;
        for &j in &self.scratch {
            let d = point_segment_dist(x, self.pieces[j].0, self.pieces[j].1);
            if d < best {
                best = d;
                self.hint = Some(j);
            }
        }
        best
    }

    /// First parameter in `[lo_t, hi_t]` of leg `i` at distance at least `r`.
    fn leg_exit(&mut self, c: &PolyCurve, i: usize, lo_t: f64, hi_t: f64, r: f64) -> Option<f64> {
        let (a, b) = c.leg(i);
        let mut bb = Bbox::new(a, a);
        bb.include(b);
        self.grid.query(bb.inflate(r), &mut self.scratch);
        let mut ivs: Vec<(f64, f64)> = self
            .scratch
            .iter()
            .filter_map(|&j| {
                let (p, q) = self.pieces[j];
                line_capsule(a, b, p, q, r)
            })
            .collect();
        ivs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mut cur = lo_t;
        for iv in &ivs {
            if iv.0 >= cur {
                break;
            }
            cur = cur.max(iv.1);
        }
        (cur <= hi_t).then_some(cur)
    }

    /// First position in `[from, to]` at distance at least `r` from the union.
    /// A point at distance `d < r` covers the next `r - d` of arc length, which
    /// is skipped without exact tests.
    fn first_far(&mut self, c: &PolyCurve, from: Pos, to: Pos, r: f64) -> Option<Pos> {
        let end_arc = arc(c, to);
        let mut p = from;
        while p <= to {
            let x = at(c, p);
            let mut d = self.hint.map_or(f64::INFINITY, |j| point_segment_dist(x, self.pieces[j].0, self.pieces[j].1));
            if d >= r {
                d = self.nearest(x, r);
            }
            if d >= r {
                return Some(p);
            }
            let i = p.leg;
            let here = arc(c, p);
            let s = here + (r - d) * (1.0 - 1e-9);
            if s >= end_arc {
                return None;
            }
            if s >= c.arc_of(i, 1.0) {
                let (li, t) = c.locate(s);
                let q = Pos { leg: li, t: if t.is_nan() { 0.0 } else { t } };
                if q > p {
                    p = q;
                    continue;
                }
            }
            let (lo_t, hi_t) = range(i, p, to);
            if let Some(t) = self.leg_exit(c, i, lo_t, hi_t, r) {
                return Some(Pos { leg: i, t });
            }
            if i == to.leg {
                return None;
            }
            p = Pos { leg: i + 1, t: 0.0 };
        }
        None
    }
}

/// Descendants of the segment `[start, end]` at generation scale `l_k`.
fn refine(c: &PolyCurve, start: Pos, end: Pos, l_next: f64, sep: f64) -> Vec<(Pos, Pos)> {
    let mut out = Vec::new();
    let Some(x1) = first_exit(c, start, end, at(c, start), l_next) else { return out };
    let mut u = Union::new(sep);
    u.add(c, start, x1);
    out.push((start, x1));
    let mut x = x1;
    while let Some(xn) = u.first_far(c, x, end, sep) {
        let yn = last_entrance(c, x, xn, l_next);
        u.add(c, yn, xn);
        out.push((yn, xn));
        if xn == x {
            break;
        }
        x = xn;
    }
    out
}

/// Nested generations `Gamma_0 .. Gamma_kmax` at scales `L_k = gamma^-k L0`.
///
/// `L0` is the largest distance from the start, and `Gamma_0` runs from the
/// start to the first point at that distance. Each segment is cut by points
/// `y_1 < x_1 < y_2 < ..`: `y_1` is its start, `x_1` the first exit from the
/// ball `B(y_1, L_{k+1})`, each later `x_n` the first point at distance at
/// least `L_k/m` from the subsegments cut so far, and `y_n` the last
/// entrance into `B(x_n, L_{k+1})` before `x_n`.
pub fn build_hierarchy(c: &PolyCurve, gamma: f64, m: usize, k_max: usize) -> Result<FractalHierarchy> {
    if !(gamma > 1.0) || m < 1 || (m as f64) < gamma / 2.0 || (m as f64) >= gamma {
        return bad_param(format!("need gamma > 1 and integer m in [gamma/2, gamma), got gamma={gamma}, m={m}"));
    }
    if c.n_legs() == 0 {
        return Err(Error::CurveTooShort("single-point curve".into()));
    }
    let start = c.start();
    let (far, l0) = c.vertices().iter().map(|v| v.dist(start)).enumerate().fold((0, 0.0), |b, (i, d)| {
        if d > b.1 {
            (i, d)
        } else {
            b
        }
    });
    let finest = l0 * gamma.powi(-(k_max as i32));
    if l0 == 0.0 || finest < c.step() {
        return Err(Error::CurveTooShort(format!("scale {finest:.3e} after {k_max} steps is below the cutoff")));
    }
    let s = Pos { leg: 0, t: 0.0 };
    let e = Pos { leg: c.n_legs() - 1, t: 1.0 };
    let far = Pos { leg: far - 1, t: 1.0 };
    let root_end = first_exit(c, s, e, start, l0).filter(|p| *p <= far).unwrap_or(far);
    let mut pos_gens: Vec<Vec<(Pos, Pos, Option<usize>)>> = vec![vec![(s, root_end, None)]];
    let mut counts: Vec<Vec<usize>> = Vec::new();
    for k in 0..k_max {
        let lk = l0 * gamma.powi(-(k as i32));
        let mut next = Vec::new();
        let mut cnt = Vec::new();
        for (pi, &(a, b, _)) in pos_gens[k].iter().enumerate() {
            let kids = refine(c, a, b, lk / gamma, lk / m as f64);
            cnt.push(kids.len());
            next.extend(kids.into_iter().map(|(y, x)| (y, x, Some(pi))));
        }
        counts.push(cnt);
        pos_gens.push(next);
    }
    counts.push(vec![0; pos_gens[k_max].len()]);
    let generations = pos_gens
        .iter()
        .zip(&counts)
        .map(|(g, cnt)| {
            g.iter()
                .zip(cnt)
                .map(|(&(a, b, parent), &children)| HSegment { s0: arc(c, a), s1: arc(c, b), parent, children })
                .collect()
        })
        .collect();
    let h = FractalHierarchy { generations, gamma, m, l0, eps: gamma / m as f64 - 1.0 };
    check_hierarchy(c, &h)?;
    Ok(h)
}

/// Nesting, at least `m` descendants per non-leaf segment, and separation
/// `eps L_k` between distinct segments of each generation.
pub fn check_hierarchy(c: &PolyCurve, h: &FractalHierarchy) -> Result<()> {
    for k in 0..h.k_max() {
        for seg in &h.generations[k] {
            if seg.children < h.m {
                return Err(Error::BranchingCondition { generation: k });
            }
        }
    }
    for k in 1..=h.k_max() {
        let prev = &h.generations[k - 1];
        let slack = 1e-9 * h.l0;
        for s in &h.generations[k] {
            let p = &prev[s.parent.ok_or(Error::BranchingCondition { generation: k })?];
            if s.s0 < p.s0 - slack || s.s1 > p.s1 + slack || s.s0 > s.s1 {
                return Err(Error::BranchingCondition { generation: k });
            }
        }
        let sep = h.eps * h.scale(k);
        let need = sep * (1.0 - 1e-9) - slack;
        let mut grid = SegmentGrid::new(sep.max(1e-12));
        let mut pieces: Vec<(Point, Point, usize)> = Vec::new();
        for (si, s) in h.generations[k].iter().enumerate() {
            let v = c.sub_curve(s.s0, s.s1);
            let vs = v.vertices();
            if vs.len() == 1 {
                grid.insert(pieces.len(), vs[0], vs[0]);
                pieces.push((vs[0], vs[0], si));
            }
            for w in vs.windows(2) {
                grid.insert(pieces.len(), w[0], w[1]);
                pieces.push((w[0], w[1], si));
            }
        }
        let mut near = Vec::new();
        for &(a, b, si) in &pieces {
            let mut bb = Bbox::new(a, a);
            bb.include(b);
            grid.query(bb.inflate(sep), &mut near);
            for &j in &near {
                let (p, q, sj) = pieces[j];
                if sj != si && segment_segment_dist(a, b, p, q) < need {
                    return Err(Error::NotSeparated(format!("segments {si} and {sj} of generation {k}")));
                }
            }
        }
    }
    Ok(())
}
