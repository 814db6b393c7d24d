use rayon::prelude::*;

use super::hierarchy::FractalHierarchy;
use crate::curve::PolyCurve;
use crate::error::{bad_param, Error, Result};
use crate::geom::Point;

#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteMeasure {
    pub support: Vec<Point>,
    pub weights: Vec<f64>,
}

impl DiscreteMeasure {
    pub fn total(&self) -> f64 {
        self.weights.iter().sum()
    }
}

/// One point per leaf, its lexicographically earliest curve point, carrying
/// the product of inverse descendant counts along its ancestry.
pub fn hierarchy_measure(c: &PolyCurve, h: &FractalHierarchy) -> DiscreteMeasure {
    let k = h.k_max();
    let weights = h.masses(k);
    let support = h
        .leaves()
        .iter()
        .map(|s| {
            let sub = c.sub_curve(s.s0, s.s1);
            *sub.vertices().iter().min_by(|a, b| a.lex_cmp(b, c.dim())).unwrap()
        })
        .collect();
    DiscreteMeasure { support, weights }
}

fn kernel(x: Point, y: Point, s: f64, ell: f64) -> Result<f64> {
    let d = x.dist(y).max(ell);
    if d == 0.0 {
        return Err(Error::EnergyOverflow);
    }
    Ok(d.powf(-s))
}

/// `sum_ij w_i w_j max(|x_i - x_j|, ell)^-s`, diagonal included.
pub fn energy(mu: &DiscreteMeasure, s: f64, ell: f64) -> Result<f64> {
    if !(s > 0.0) || !(ell >= 0.0) || mu.support.len() != mu.weights.len() {
        return bad_param("energy needs s > 0, ell >= 0 and one weight per point");
    }
    let rows: Vec<f64> = (0..mu.support.len())
        .into_par_iter()
        .map(|i| {
            let mut acc = 0.0;
            for j in 0..mu.support.len() {
                acc += mu.weights[j] * kernel(mu.support[i], mu.support[j], s, ell)?;
            }
            Ok(mu.weights[i] * acc)
        })
        .collect::<Result<_>>()?;
    Ok(rows.iter().sum())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Qp,
    /// projected descent, used when negative curvature was met
    Descent,
    HierarchyBound,
    Brute,
}

impl Method {
    pub fn id(&self) -> &'static str {
        match self {
            Method::Qp => "qp",
            Method::Descent => "descent",
            Method::HierarchyBound => "hierarchy-bound",
            Method::Brute => "brute",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CapacityResult {
    pub s: f64,
    pub ell: f64,
    pub energy: f64,
    pub capacity: f64,
    pub method: Method,
    /// Final linearization gap relative to the energy.
    pub gap: f64,
    pub weights: Vec<f64>,
    pub converged: bool,
}

impl CapacityResult {
    /// `cap s=.. l=.. E=.. C=.. method=.. gap=..`
    pub fn record(&self) -> String {
        format!(
            "cap s={} l={:e} E={:.12e} C={:.12e} method={} gap={:.3e}",
            self.s,
            self.ell,
            self.energy,
            self.capacity,
            self.method.id(),
            self.gap
        )
    }
}

const ITER_CAP: usize = 100_000;

struct Quad {
    n: usize,
    k: Vec<f64>,
}

impl Quad {
    fn row(&self, i: usize) -> &[f64] {
        &self.k[i * self.n..(i + 1) * self.n]
    }

    fn apply(&self, w: &[f64]) -> Vec<f64> {
        (0..self.n).map(|i| self.row(i).iter().zip(w).map(|(a, b)| a * b).sum()).collect()
    }
}

/// Frank-Wolfe with away steps and exact line search. Returns weights,
/// relative gap and whether negative curvature was seen.
fn frank_wolfe(q: &Quad, tol: f64) -> (Vec<f64>, f64, bool, bool) {
    let n = q.n;
    let mut w = vec![1.0 / n as f64; n];
    let mut kw = q.apply(&w);
    let mut indefinite = false;
    let mut rel_gap = f64::INFINITY;
    for _ in 0..ITER_CAP {
        let e: f64 = w.iter().zip(&kw).map(|(a, b)| a * b).sum();
        // gradient 2 K w; compare with kw directly
        let (fw, _) = kw.iter().enumerate().fold((0, f64::INFINITY), |b, (i, &v)| if v < b.1 { (i, v) } else { b });
        let (aw, _) = kw
            .iter()
            .enumerate()
            .filter(|(i, _)| w[*i] > 0.0)
            .fold((0, f64::NEG_INFINITY), |b, (i, &v)| if v > b.1 { (i, v) } else { b });
        let gap_fw = 2.0 * (e - kw[fw]);
        rel_gap = gap_fw / e;
        if rel_gap <= tol {
            return (w, rel_gap.max(0.0), indefinite, true);
        }
        let gap_aw = 2.0 * (kw[aw] - e);
        let kii = |i: usize| q.row(i)[i];
        // direction d: toward vertex fw, or away from vertex aw
        let (toward, idx, g_dot_d, dkd, max_step) = if gap_fw >= gap_aw {
            (true, fw, -gap_fw, kii(fw) - 2.0 * kw[fw] + e, 1.0)
        } else {
            let wa = w[aw];
            let max = if wa < 1.0 { wa / (1.0 - wa) } else { f64::INFINITY };
            (false, aw, -gap_aw, kii(aw) - 2.0 * kw[aw] + e, max)
        };
        let step = if dkd > 0.0 {
            (-g_dot_d / (2.0 * dkd)).min(max_step)
        } else {
            indefinite = true;
            max_step
        };
        if !(step > 0.0) || !step.is_finite() {
            break;
        }
        let row = q.row(idx);
        if toward {
            for i in 0..n {
                w[i] *= 1.0 - step;
                kw[i] = (1.0 - step) * kw[i] + step * row[i];
            }
            w[idx] += step;
        } else {
            for i in 0..n {
                w[i] *= 1.0 + step;
                kw[i] = (1.0 + step) * kw[i] - step * row[i];
            }
            w[idx] -= step;
            if w[idx] < 1e-15 {
                w[idx] = 0.0;
            }
        }
        // refresh occasionally against drift
        if w.iter().filter(|&&x| x > 0.0).count() <= 2 {
            kw = q.apply(&w);
        }
    }
    kw = q.apply(&w);
    let e: f64 = w.iter().zip(&kw).map(|(a, b)| a * b).sum();
    let min = kw.iter().copied().fold(f64::INFINITY, f64::min);
    rel_gap = rel_gap.min(2.0 * (e - min) / e);
    (w, rel_gap.max(0.0), indefinite, rel_gap <= tol)
}

/// Euclidean projection onto the probability simplex.
fn project_simplex(v: &mut [f64]) {
    let mut u: Vec<f64> = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).unwrap());
    let mut acc = 0.0;
    let mut theta = 0.0;
    for (i, &x) in u.iter().enumerate() {
        acc += x;
        let t = (acc - 1.0) / (i + 1) as f64;
        if x - t > 0.0 {
            theta = t;
        }
    }
    for x in v.iter_mut() {
        *x = (*x - theta).max(0.0);
    }
}

/// Projected gradient descent from several starts; the best energy wins.
fn descent(q: &Quad) -> Vec<f64> {
    let n = q.n;
    let lmax = (0..n).map(|i| q.row(i).iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    let step = 0.5 / lmax.max(1e-300);
    let mut starts = vec![vec![1.0 / n as f64; n]];
    for k in 0..n.min(4) {
        let mut w = vec![0.0; n];
        w[k * n / n.min(4)] = 1.0;
        starts.push(w);
    }
    let energy = |w: &[f64]| -> f64 { w.iter().zip(q.apply(w)).map(|(a, b)| a * b).sum() };
    let mut best: Option<(f64, Vec<f64>)> = None;
    for mut w in starts {
        for _ in 0..2000 {
            let g = q.apply(&w);
            for i in 0..n {
                w[i] -= step * 2.0 * g[i];
            }
            project_simplex(&mut w);
        }
        let e = energy(&w);
        if best.as_ref().is_none_or(|b| e < b.0) {
            best = Some((e, w));
        }
    }
    best.unwrap().1
}

/// Minimal energy over probability weights on `points`, by conditional
/// gradient until the linearization gap is at most `tol` times the energy.
pub fn capacity_qp(points: &[Point], s: f64, ell: f64, tol: f64) -> Result<CapacityResult> {
    if points.is_empty() || !(s > 0.0) || !(ell >= 0.0) || !(tol > 0.0) {
        return bad_param("capacity needs points, s > 0, ell >= 0 and tol > 0");
    }
    let n = points.len();
    let mut k = vec![0.0; n * n];
    k.par_chunks_mut(n).enumerate().try_for_each(|(i, row)| -> Result<()> {
        for j in 0..n {
            row[j] = kernel(points[i], points[j], s, ell)?;
        }
        Ok(())
    })?;
    let q = Quad { n, k };
    let (mut w, mut gap, indefinite, mut converged) = frank_wolfe(&q, tol);
    let mut method = Method::Qp;
    if indefinite {
        let alt = descent(&q);
        let e_alt: f64 = alt.iter().zip(q.apply(&alt)).map(|(a, b)| a * b).sum();
        let e_fw: f64 = w.iter().zip(q.apply(&w)).map(|(a, b)| a * b).sum();
        if e_alt < e_fw {
            w = alt;
            method = Method::Descent;
            let kw = q.apply(&w);
            let min = kw.iter().copied().fold(f64::INFINITY, f64::min);
            gap = (2.0 * (e_alt - min) / e_alt).max(0.0);
            converged = gap <= tol;
        }
    }
    let kw = q.apply(&w);
    let e: f64 = w.iter().zip(&kw).map(|(a, b)| a * b).sum();
    Ok(CapacityResult { s, ell, energy: e, capacity: 1.0 / e, method, gap, weights: w, converged })
}
