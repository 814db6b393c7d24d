use std::collections::HashMap;

use rayon::prelude::*;

use super::cylinder::{scan_traversal, Cylinder};
use crate::curve::{CurveConfig, PolyCurve};
use crate::error::{bad_param, Result};
use crate::geom::{point_segment_dist, Bbox, Point};

/// `L_k = gamma^-k L0` for `k = 0..=k_max`, with exception index `k0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScaleLadder {
    pub l0: f64,
    pub gamma: f64,
    pub k_max: usize,
    pub k0: usize,
}

impl ScaleLadder {
    pub fn new(l0: f64, gamma: f64, k_max: usize, k0: usize) -> Result<Self> {
        if !(l0 > 0.0 && l0.is_finite()) || !(gamma > 1.0) {
            return bad_param(format!("ladder needs L0 > 0 and gamma > 1, got {l0}, {gamma}"));
        }
        Ok(ScaleLadder { l0, gamma, k_max, k0 })
    }

    /// Ladder from the largest curve diameter down to the cutoff.
    pub fn for_config(f: &CurveConfig, gamma: f64, k0: usize) -> Result<Self> {
        let l0 = f.curves.iter().map(|c| c.diameter()).fold(0.0, f64::max);
        if l0 < f.cutoff {
            return bad_param("configuration smaller than its cutoff");
        }
        let k_max = ((l0 / f.cutoff).ln() / gamma.ln() + 1e-9).floor() as usize;
        Self::new(l0, gamma, k_max, k0)
    }

    pub fn scale(&self, k: usize) -> f64 {
        self.l0 * self.gamma.powi(-(k as i32))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunRecord {
    pub cylinder: Cylinder,
    pub scale_index: usize,
    pub curve_index: usize,
    pub arc_range: (f64, f64),
}

impl RunRecord {
    /// `run scale=.. L=.. ax=x,y bx=x,y width=.. curve=.. s0=.. s1=..`
    pub fn record(&self, ladder: &ScaleLadder, dim: usize) -> String {
        let pt = |p: Point| (0..dim).map(|k| format!("{:.6}", p.0[k])).collect::<Vec<_>>().join(",");
        format!(
            "run scale={} L={:.6e} ax={} bx={} width={:.6e} curve={} s0={:.6} s1={:.6}",
            self.scale_index,
            ladder.scale(self.scale_index),
            pt(self.cylinder.a),
            pt(self.cylinder.b),
            self.cylinder.width,
            self.curve_index,
            self.arc_range.0,
            self.arc_range.1
        )
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunScan {
    pub runs: Vec<RunRecord>,
    /// Ladder scales below the cutoff, not scanned.
    pub skipped_scales: usize,
}

/// Integer offsets with `|o| L'` in the cylinder length window, one of each
/// `{o, -o}` pair.
fn ring_offsets(dim: usize, lo: f64, hi: f64) -> Vec<[i64; 3]> {
    let r = hi.ceil() as i64;
    let zr = if dim >= 3 { r } else { 0 };
    let yr = if dim >= 2 { r } else { 0 };
    let mut out = Vec::new();
    for i in -r..=r {
        for j in -yr..=yr {
            for k in -zr..=zr {
                let o = [i, j, k];
                if o <= [0, 0, 0] {
                    continue;
                }
                let n = ((i * i + j * j + k * k) as f64).sqrt();
                if n >= lo && n <= hi {
                    out.push(o);
                }
            }
        }
    }
    out
}

/// Grid points of `h Z^d` within `tol` of the curve, each with the legs
/// passing that close.
fn visits(c: &PolyCurve, dim: usize, h: f64, tol: f64) -> HashMap<[i64; 3], Vec<usize>> {
    let mut map: HashMap<[i64; 3], Vec<usize>> = HashMap::new();
    for li in 0..c.n_legs() {
        let (a, b) = c.leg(li);
        let mut bb = Bbox::new(a, a);
        bb.include(b);
        let bb = bb.inflate(tol);
        let rng = |k: usize| -> (i64, i64) {
            if k < dim {
                ((bb.lo.0[k] / h).ceil() as i64, (bb.hi.0[k] / h).floor() as i64)
            } else {
                (0, 0)
            }
        };
        let (r0, r1, r2) = (rng(0), rng(1), rng(2));
        for i in r0.0..=r0.1 {
            for j in r1.0..=r1.1 {
                for k in r2.0..=r2.1 {
                    let g = Point([i as f64 * h, j as f64 * h, k as f64 * h]);
                    if point_segment_dist(g, a, b) > tol {
                        continue;
                    }
                    map.entry([i, j, k]).or_default().push(li);
                }
            }
        }
    }
    map
}

pub fn detect_straight_runs(f: &CurveConfig, ladder: &ScaleLadder) -> RunScan {
    detect_straight_runs_with(f, ladder, f.cutoff)
}

/// Enumerates cylinders of width `(10/sqrt gamma) L_k` whose face centres lie
/// on `(L_k/gamma) Z^d` at distance in `[L_k/2, L_k/2 (1 + 2/gamma)]`, and
/// keeps those traversed by a curve.
pub fn detect_straight_runs_with(f: &CurveConfig, ladder: &ScaleLadder, tol: f64) -> RunScan {
    let mut scan = RunScan::default();
    let dim = f.dim;
    for k in 0..=ladder.k_max {
        let l = ladder.scale(k);
        if l < f.cutoff * (1.0 - 1e-9) {
            scan.skipped_scales += 1;
            continue;
        }
        let h = l / ladder.gamma;
        let width = 10.0 / ladder.gamma.sqrt() * l;
        let ring = ring_offsets(dim, 0.5 * ladder.gamma * (1.0 - 1e-12), 0.5 * ladder.gamma * (1.0 + 2.0 / ladder.gamma));
        for (ci, c) in f.curves.iter().enumerate() {
            if c.n_legs() == 0 {
                continue;
            }
            let vis = visits(c, dim, h, tol);
            let mut keys: Vec<&[i64; 3]> = vis.keys().collect();
            keys.sort_unstable();
            let found: Vec<RunRecord> = keys
                .par_iter()
                .flat_map_iter(|&&g1| {
                    let vis = &vis;
                    ring.iter().filter_map(move |o| {
                        let g2 = [g1[0] + o[0], g1[1] + o[1], g1[2] + o[2]];
                        let v2 = vis.get(&g2)?;
                        let v1 = &vis[&g1];
                        let pa = Point([g1[0] as f64 * h, g1[1] as f64 * h, g1[2] as f64 * h]);
                        let pb = Point([g2[0] as f64 * h, g2[1] as f64 * h, g2[2] as f64 * h]);
                        let cyl = Cylinder { a: pa, b: pb, width };
                        // a scan from every nearby leg of either face finds the
                        // earliest traversal
                        let best = v1
                            .iter()
                            .chain(v2.iter())
                            .filter_map(|&start| scan_traversal(c, &cyl, tol, start, true))
                            .min_by(|x, y| x.1.partial_cmp(&y.1).unwrap())?;
                        Some(RunRecord { cylinder: cyl, scale_index: k, curve_index: ci, arc_range: best })
                    })
                })
                .collect();
            scan.runs.extend(found);
        }
    }
    scan
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::crossings::cylinder_traversal;

    fn line(n: usize) -> PolyCurve {
        let pts: Vec<(f64, f64)> = (0..=n).map(|i| (i as f64 / n as f64, 0.0)).collect();
        PolyCurve::from_xy(&pts, 1.0 / n as f64).unwrap()
    }

    #[test]
    fn line_has_runs_at_every_scale() {
        let c = line(1024);
        let f = CurveConfig::around(vec![c], 1.0 / 1024.0).unwrap();
        let ladder = ScaleLadder::for_config(&f, 8.0, 0).unwrap();
        assert_eq!(ladder.k_max, 3);
        let scan = detect_straight_runs(&f, &ladder);
        for k in 0..=ladder.k_max {
            assert!(scan.runs.iter().any(|r| r.scale_index == k), "scale {k}");
        }
        for r in &scan.runs {
            let l = ladder.scale(r.scale_index);
            let c = &f.curves[0];
            let span = c.point_at(r.arc_range.0).dist(c.point_at(r.arc_range.1));
            assert!(span >= l / 2.0 - 2.0 * f.cutoff - 1e-12);
        }
    }

    #[test]
    fn local_scan_matches_full_scan() {
        let pts: Vec<(f64, f64)> = (0..=400)
            .map(|i| {
                let t = i as f64 / 400.0;
                (t, 0.05 * (t * 40.0).sin())
            })
            .collect();
        let c = PolyCurve::from_xy(&pts, 0.0).unwrap();
        let f = CurveConfig::around(vec![c.clone()], 0.01).unwrap();
        let ladder = ScaleLadder::new(1.0, 4.0, 2, 0).unwrap();
        let scan = detect_straight_runs_with(&f, &ladder, 0.01);
        assert!(!scan.runs.is_empty());
        for r in &scan.runs {
            assert_eq!(cylinder_traversal(&c, &r.cylinder, 0.01), Some(r.arc_range));
        }
    }

    #[test]
    fn ring_is_half() {
        let r = ring_offsets(2, 4.0, 5.0);
        for o in &r {
            let neg = [-o[0], -o[1], -o[2]];
            assert!(!r.contains(&neg));
        }
        assert!(r.contains(&[4, 0, 0]) && r.contains(&[0, 4, 0]) && r.contains(&[3, -4, 0]));
    }
}
