use std::collections::HashSet;

use super::PolyCurve;
use crate::error::{bad_param, Result};
use crate::geom::{line_ball, FarSet, Point};

/// Rounding allowance when a segment ends exactly at a leg end.
const END_SLACK: f64 = 1e-12;

fn check_scale(ell: f64) -> Result<()> {
    if !(ell > 0.0 && ell.is_finite()) {
        return bad_param(format!("scale must be positive, got {ell}"));
    }
    Ok(())
}

/// Largest `t` on the line `a + t(b - a)` still within `ell` of `v`.
fn exit_param(a: Point, b: Point, v: Point, ell: f64) -> f64 {
    match line_ball(a, b, v, ell) {
        Some((_, hi)) => hi,
        None => f64::NEG_INFINITY,
    }
}

/// Greedy cut positions (arc lengths) for the minimal partition into
/// consecutive segments of diameter at most `ell`.
///
/// Each segment is extended as far as possible; the cut is the first point
/// beyond which some earlier point of the segment would be farther than `ell`.
pub fn partition_cuts(c: &PolyCurve, ell: f64) -> Result<Vec<f64>> {
    let mut cuts = Vec::new();
    greedy_cuts(c, ell, |s| cuts.push(s))?;
    Ok(cuts)
}

fn greedy_cuts(c: &PolyCurve, ell: f64, mut on_cut: impl FnMut(f64)) -> Result<()> {
    check_scale(ell)?;
    let mut anchors = FarSet::new(c.dim());
    anchors.push(c.start());
    for i in 0..c.n_legs() {
        let (a, b) = c.leg(i);
        let mut t0 = 0.0;
        loop {
            let mut t_exit = f64::INFINITY;
            for &v in anchors.points() {
                t_exit = t_exit.min(exit_param(a, b, v, ell));
            }
            if t_exit >= 1.0 - END_SLACK {
                anchors.push(b);
                break;
            }
            let t_cut = t_exit.max(t0);
            on_cut(c.arc_of(i, t_cut));
            anchors.clear();
            anchors.push(a.lerp(b, t_cut));
            t0 = t_cut;
        }
    }
    Ok(())
}

/// Minimal number of consecutive segments of diameter at most `ell`.
pub fn partition_count(c: &PolyCurve, ell: f64) -> Result<usize> {
    let mut n = 1;
    greedy_cuts(c, ell, |_| n += 1)?;
    Ok(n)
}

/// Step function `s -> M(C_s, ell)` as `(s_i, count)` pairs: for `s` above
/// `s_i` (up to the next breakpoint) the prefix count is `count`.
pub fn prefix_partition_counts(c: &PolyCurve, ell: f64) -> Result<Vec<(f64, usize)>> {
    let cuts = partition_cuts(c, ell)?;
    let mut out = Vec::with_capacity(cuts.len() + 1);
    out.push((0.0, 1));
    for (k, s) in cuts.into_iter().enumerate() {
        out.push((s, k + 2));
    }
    Ok(out)
}

/// Partition count when cuts are only allowed at vertices. `None` if a
/// single leg is already longer than `ell`.
pub fn partition_count_vertex_cuts(c: &PolyCurve, ell: f64) -> Result<Option<usize>> {
    check_scale(ell)?;
    let v = c.vertices();
    let mut count = 1;
    let mut seg = FarSet::new(c.dim());
    seg.push(v[0]);
    let mut last = v[0];
    for &p in &v[1..] {
        let far = seg.points().iter().map(|q| q.dist(p)).fold(0.0, f64::max);
        if far > ell {
            if last.dist(p) > ell {
                return Ok(None);
            }
            count += 1;
            seg.clear();
            seg.push(last);
        }
        seg.push(p);
        last = p;
    }
    Ok(Some(count))
}

/// Closed intervals of a leg in local parameter.
type Ivs = Vec<(f64, f64)>;

fn merge_ivs(mut v: Ivs) -> Ivs {
    v.retain(|(a, b)| a <= b);
    v.sort_by(|x, y| x.0.partial_cmp(&y.0).unwrap());
    let mut out: Ivs = Vec::with_capacity(v.len());
    for (a, b) in v {
        if let Some(last) = out.last_mut() {
            if a <= last.1 {
                last.1 = last.1.max(b);
                continue;
            }
        }
        out.push((a, b));
    }
    out
}

/// Maximal number of points `x_1 < ... < x_n` along the curve with
/// `|x_i - x_{i+1}| >= ell`.
///
/// Exact: `E_k`, the set of positions where such a sequence of length `k`
/// can end, is computed leg by leg. `t` on leg `j` is in `E_k` when some
/// earlier point of `E_{k-1}` is at distance at least `ell`; on earlier legs
/// the farthest such point is an interval endpoint, on the same leg it is
/// the infimum.
pub fn packing_count(c: &PolyCurve, ell: f64) -> Result<usize> {
    check_scale(ell)?;
    let n = c.n_legs();
    if n == 0 {
        return Ok(1);
    }
    let mut prev: Vec<Ivs> = vec![vec![(0.0, 1.0)]; n];
    let mut k = 1;
    loop {
        let mut next: Vec<Ivs> = vec![Vec::new(); n];
        let mut far = FarSet::new(c.dim());
        let mut any = false;
        for j in 0..n {
            if prev[j].is_empty() {
                continue;
            }
            let (a, b) = c.leg(j);
            let len = c.leg_len(j);
            let mut pieces: Ivs = Vec::with_capacity(3);
            if !far.is_empty() {
                let mut lo = f64::NEG_INFINITY;
                let mut hi = f64::INFINITY;
                let mut all = false;
                for &p in far.points() {
                    match line_ball(a, b, p, ell) {
                        // open ball interval
                        Some((t1, t2)) if t1 < t2 => {
                            lo = lo.max(t1);
                            hi = hi.min(t2);
                        }
                        _ => {
                            all = true;
                            break;
                        }
                    }
                }
                if all || lo >= hi {
                    pieces.push((0.0, 1.0));
                } else {
                    pieces.push((0.0, lo.min(1.0)));
                    pieces.push((hi.max(0.0), 1.0));
                }
            }
            let tmin = prev[j][0].0;
            let t_same = tmin + ell / len;
            if t_same <= 1.0 + END_SLACK {
                pieces.push((t_same, 1.0));
            }
            let merged = merge_ivs(pieces);
            if !merged.is_empty() {
                any = true;
            }
            next[j] = merged;
            for &(s, e) in &prev[j] {
                far.push(a.lerp(b, s));
                far.push(a.lerp(b, e));
            }
        }
        if !any {
            return Ok(k);
        }
        prev = next;
        k += 1;
    }
}

/// Snap-to-upper floor used for grid attribution.
fn cell_index(x: f64, h: f64) -> i64 {
    let q = x / h;
    let r = q.round();
    if (q - r).abs() < 1e-9 {
        r as i64
    } else {
        q.floor() as i64
    }
}

/// Grid cells of mesh `ell / sqrt(d)` (anchored at the origin) that the curve
/// meets. A piece lying in a grid plane is attributed to the cell above it;
/// isolated contact at a corner or face is not counted.
pub fn box_cells(c: &PolyCurve, ell: f64) -> Result<HashSet<[i64; 3]>> {
    check_scale(ell)?;
    let d = c.dim();
    let h = ell / (d as f64).sqrt();
    let mut cells = HashSet::new();
    let key = |p: Point| {
        let mut k = [0i64; 3];
        for (ax, slot) in k.iter_mut().enumerate().take(d) {
            *slot = cell_index(p.0[ax], h);
        }
        k
    };
    if c.n_legs() == 0 {
        cells.insert(key(c.start()));
        return Ok(cells);
    }
    let mut ts: Vec<f64> = Vec::new();
    for i in 0..c.n_legs() {
        let (a, b) = c.leg(i);
        ts.clear();
        ts.push(0.0);
        ts.push(1.0);
        for ax in 0..d {
            let (pa, pb) = (a.0[ax], b.0[ax]);
            if pa == pb {
                continue;
            }
            let (lo, hi) = (pa.min(pb), pa.max(pb));
            let i0 = (lo / h).ceil() as i64;
            let i1 = (hi / h).floor() as i64;
            for g in i0..=i1 {
                let t = (g as f64 * h - pa) / (pb - pa);
                if t > 0.0 && t < 1.0 {
                    ts.push(t);
                }
            }
        }
        ts.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for w in ts.windows(2) {
            if w[1] - w[0] > 1e-12 {
                cells.insert(key(a.lerp(b, 0.5 * (w[0] + w[1]))));
            }
        }
    }
    Ok(cells)
}

pub fn box_count(c: &PolyCurve, ell: f64) -> Result<usize> {
    Ok(box_cells(c, ell)?.len())
}

/// Bound on the number of mesh-`ell/sqrt(d)` cells a set of diameter `ell`
/// can meet.
pub fn box_constant(dim: usize) -> usize {
    let per_axis = (dim as f64).sqrt().ceil() as usize + 1;
    per_axis.pow(dim as u32)
}
