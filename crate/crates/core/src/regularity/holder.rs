//! Time-of-travel reparametrization.
//!
//! `t(s)` charges `(n+1)^-2 psi(l_n)` for every greedy cut of scale
//! `l_n = 2^-n` passed before arc length `s`, with `psi(l) = 1/M(C, l)`.
//! Counting cuts (`M(C_s, l) - 1`) instead of segments makes `t(0) = 0`.
//! The jumps are smoothed over a ramp of relative width `RAMP` just before
//! each cut and a small linear term keeps the map strictly increasing.

use std::collections::HashMap;

use rand::Rng;

use crate::curve::{partition_count, partition_cuts, PolyCurve};
use crate::error::{Error, Result};

const RAMP: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Parametrization {
    /// `(s, t)`, strictly increasing in both, from `(0, 0)` to `(length, 1)`.
    pub breakpoints: Vec<(f64, f64)>,
}

impl Parametrization {
    pub fn length(&self) -> f64 {
        self.breakpoints.last().unwrap().0
    }

    fn interp(pts: &[(f64, f64)], x: f64, key: impl Fn(&(f64, f64)) -> f64, val: impl Fn(&(f64, f64)) -> f64) -> f64 {
        let i = pts.partition_point(|p| key(p) <= x);
        if i == 0 {
            return val(&pts[0]);
        }
        if i == pts.len() {
            return val(&pts[pts.len() - 1]);
        }
        let (a, b) = (&pts[i - 1], &pts[i]);
        let f = (x - key(a)) / (key(b) - key(a));
        val(a) + f * (val(b) - val(a))
    }

    pub fn t_of_s(&self, s: f64) -> f64 {
        Self::interp(&self.breakpoints, s, |p| p.0, |p| p.1)
    }

    pub fn s_of_t(&self, t: f64) -> f64 {
        Self::interp(&self.breakpoints, t, |p| p.1, |p| p.0)
    }

    pub fn is_strictly_increasing(&self) -> bool {
        self.breakpoints.windows(2).all(|w| w[1].0 > w[0].0 && w[1].1 > w[0].1)
    }
}

pub fn reparametrize_holder(c: &PolyCurve, n_max: usize) -> Result<Parametrization> {
    let len = c.length();
    if len <= 0.0 {
        return Err(Error::InvalidCurve("reparametrization needs positive length".into()));
    }
    let n_max = n_max.max(1);
    // (ramp start, cut, weight)
    let mut ramps: Vec<(f64, f64, f64)> = Vec::new();
    for n in 0..=n_max {
        let cuts = partition_cuts(c, 2f64.powi(-(n as i32)))?;
        let w = 1.0 / ((n + 1) as f64).powi(2) / (cuts.len() + 1) as f64;
        for s in cuts {
            ramps.push(((s - RAMP * len).max(0.0), s, w));
        }
    }
    if ramps.is_empty() {
        return Ok(Parametrization { breakpoints: vec![(0.0, 0.0), (len, 1.0)] });
    }
    ramps.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap());
    let total: f64 = ramps.iter().map(|r| r.2).sum();
    let mut prefix = Vec::with_capacity(ramps.len() + 1);
    prefix.push(0.0);
    for r in &ramps {
        prefix.push(prefix.last().unwrap() + r.2);
    }
    let mut xs: Vec<f64> = vec![0.0, len];
    for r in &ramps {
        xs.push(r.0);
        xs.push(r.1);
    }
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let mut pts: Vec<f64> = Vec::with_capacity(xs.len());
    for x in xs {
        match pts.last() {
            Some(&p) if x - p <= 1e-14 * len => {}
            _ => pts.push(x),
        }
    }
    if *pts.last().unwrap() < len {
        pts.pop();
        pts.push(len);
    }
    let theta = 1.0 / ((n_max + 2) as f64).powi(2);
    let g = |s: f64| -> f64 {
        let done = ramps.partition_point(|r| r.1 <= s);
        let mut v = prefix[done];
        for r in &ramps[done..] {
            if r.1 > s + RAMP * len {
                break;
            }
            if s > r.0 {
                v += r.2 * (s - r.0) / (r.1 - r.0);
            }
        }
        v
    };
    let mut breakpoints: Vec<(f64, f64)> =
        pts.iter().map(|&s| (s, (1.0 - theta) * g(s) / total + theta * s / len)).collect();
    breakpoints[0] = (0.0, 0.0);
    let last = breakpoints.len() - 1;
    breakpoints[last] = (len, 1.0);
    Ok(Parametrization { breakpoints })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModulusReport {
    pub violations: usize,
    /// Smallest observed ratio `|t1 - t2| / bound`; at least 1 when clean.
    pub worst_margin: f64,
    pub checked: usize,
    pub skipped: usize,
}

/// `1/M(C, l)` with cheap upper bounds tried first: `l / diam` (segments of
/// diameter `l` chained across the curve), then a cache on a geometric grid
/// where a coarser grid value bounds psi. The exact value is computed only
/// when neither bound is decisive.
struct Psi<'a> {
    c: &'a PolyCurve,
    top: f64,
    cache: HashMap<i64, usize>,
}

impl<'a> Psi<'a> {
    const PER_OCTAVE: f64 = 16.0;

    fn grid_scale(&self, j: i64) -> f64 {
        self.top * 2f64.powf(-(j as f64) / Self::PER_OCTAVE)
    }

    /// Upper bound on `psi(l)`.
    fn upper(&mut self, l: f64) -> Result<f64> {
        let j = ((self.top / l).log2() * Self::PER_OCTAVE).floor() as i64;
        let j = j.max(0);
        let scale = self.grid_scale(j);
        let m = match self.cache.get(&j) {
            Some(&m) => m,
            None => {
                let m = partition_count(self.c, scale)?;
                self.cache.insert(j, m);
                m
            }
        };
        Ok(1.0 / m as f64)
    }

    fn exact(&self, l: f64) -> Result<f64> {
        Ok(1.0 / partition_count(self.c, l)? as f64)
    }
}

/// Samples random parameter pairs and checks
/// `|t1 - t2| >= psi(dq/2) / (2 log2(4/dq)^2)` with `dq = |gamma(t1) - gamma(t2)|`.
pub fn verify_modulus(c: &PolyCurve, p: &Parametrization, n_pairs: usize, seed: u64) -> Result<ModulusReport> {
    let mut rng = crate::seed::rng(seed);
    let mut psi = Psi { c, top: c.diameter().max(1e-300), cache: HashMap::new() };
    let mut rep = ModulusReport { violations: 0, worst_margin: f64::INFINITY, checked: 0, skipped: 0 };
    for _ in 0..n_pairs {
        let t1: f64 = rng.gen();
        let t2: f64 = rng.gen();
        let dt = (t1 - t2).abs();
        let dq = c.point_at(p.s_of_t(t1)).dist(c.point_at(p.s_of_t(t2)));
        if dt == 0.0 || dq == 0.0 || dq >= 4.0 {
            rep.skipped += 1;
            continue;
        }
        rep.checked += 1;
        let denom = 2.0 * (4.0 / dq).log2().powi(2);
        let mut bound = (dq / 2.0 / psi.top).min(1.0) / denom;
        if dt < bound {
            bound = psi.upper(dq / 2.0)? / denom;
        }
        if dt < bound {
            bound = psi.exact(dq / 2.0)? / denom;
        }
        let margin = dt / bound;
        rep.worst_margin = rep.worst_margin.min(margin);
        if dt < bound {
            rep.violations += 1;
        }
    }
    Ok(rep)
}
