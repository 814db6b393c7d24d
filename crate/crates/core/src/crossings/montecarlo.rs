use rayon::prelude::*;

use super::cylinder::{check_well_separated, cylinder_traversal, Cylinder};
use super::shell::{shell_traversals, Shell};
use crate::error::{bad_param, Error, Result};
use crate::generators::{cluster_cylinder_event, crossing_clusters, generate, GeneratorKind, GeneratorSpec, Sample};
use crate::geom::{Bbox, Point};
use crate::regularity::{fit_line, ExponentFit};
use crate::seed::child_seed;

/// Largest tolerated fraction of failed trials.
pub const FAIL_BUDGET: f64 = 0.01;

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaRow {
    pub ratio: f64,
    pub k: usize,
    pub p: f64,
    pub stderr: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaScan {
    pub rows: Vec<LambdaRow>,
    /// `fits[k-1]`: exponent of `p ~ (r/R)^lambda`; `None` with fewer than
    /// two positive cells.
    pub fits: Vec<Option<ExponentFit>>,
    /// `(ratio, k)` cells with `p = 0`, left out of the fits.
    pub excluded: Vec<(f64, usize)>,
    pub failed: usize,
}

impl LambdaScan {
    pub fn p(&self, ratio_index: usize, k: usize) -> f64 {
        let kmax = self.fits.len();
        self.rows[ratio_index * kmax + k - 1].p
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhoRow {
    pub k: usize,
    pub p: f64,
    pub stderr: f64,
    pub trials: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RhoEstimate {
    pub rows: Vec<RhoRow>,
    /// Fit of `log p` against `k`; its exponent is `log rho`.
    pub fit: Option<ExponentFit>,
    pub rho: Option<f64>,
    pub rho_stderr: Option<f64>,
    pub failed: usize,
}

/// Four unit-aspect cylinders (squares of side 0.2) near the corners of
/// the unit square, pairwise separated by more than their diameter.
pub fn corner_squares() -> Vec<Cylinder> {
    [(0.15, 0.15), (0.65, 0.15), (0.15, 0.65), (0.65, 0.65)]
        .iter()
        .map(|&(x, y)| Cylinder { a: Point::new2(x, y + 0.1), b: Point::new2(x + 0.2, y + 0.1), width: 0.2 })
        .collect()
}

/// Region the shells are centred in: fixed per model, so that the shell
/// does not move with the sample.
fn domain(kind: &GeneratorKind, first: &Sample) -> Bbox {
    match *kind {
        GeneratorKind::Lerw { radius, .. } => {
            Bbox::new(Point::new2(0.5 - radius, 0.5 - radius), Point::new2(0.5 + radius, 0.5 + radius))
        }
        GeneratorKind::Fixture(_) => first.config.region,
        _ => Bbox::unit(2),
    }
}

/// Runs `trials` draws in parallel, each seeded by its index; results in
/// trial order. Failed draws are dropped and counted.
pub(crate) fn run_trials<T: Send>(
    spec: &GeneratorSpec,
    trials: usize,
    seed: u64,
    f: impl Fn(&Sample) -> Result<T> + Sync,
) -> Result<(Vec<T>, usize)> {
    let out: Vec<Option<T>> = (0..trials)
        .into_par_iter()
        .map(|t| {
            let s = GeneratorSpec { kind: spec.kind, seed: child_seed(seed, t as u64) };
            generate(&s).and_then(|sample| f(&sample)).ok()
        })
        .collect();
    let failed = out.iter().filter(|o| o.is_none()).count();
    if failed as f64 > FAIL_BUDGET * trials as f64 || failed == trials {
        return Err(Error::Aborted { failed, total: trials });
    }
    Ok((out.into_iter().flatten().collect(), failed))
}

fn log_var(p: f64, n: usize) -> f64 {
    let n = n as f64;
    ((1.0 - p) / (p * n)).max(1.0 / (n * n))
}

/// Weighted fit of `log p` against `x` over the positive cells.
fn fit_log_p(xs: &[f64], ps: &[f64], n: usize) -> Option<ExponentFit> {
    let keep: Vec<usize> = (0..ps.len()).filter(|&i| ps[i] > 0.0).collect();
    let x: Vec<f64> = keep.iter().map(|&i| xs[i]).collect();
    let y: Vec<f64> = keep.iter().map(|&i| ps[i].ln()).collect();
    let w: Vec<f64> = keep.iter().map(|&i| 1.0 / log_var(ps[i], n)).collect();
    let lf = fit_line(&x, &y, Some(&w))?;
    let lo = x.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Some(ExponentFit {
        exponent: lf.slope,
        intercept: lf.intercept,
        window: (lo, hi),
        residual_rms: lf.residual_rms,
        n_scales: keep.len(),
        stderr: lf.slope_se,
    })
}

fn crossing_count(sample: &Sample, shell: &Shell) -> usize {
    match &sample.field {
        Some(f) => crossing_clusters(f, shell),
        None => shell_traversals(&sample.config, shell),
    }
}

/// Probability that the centred shell with inner/outer ratio `r/R` is
/// crossed at least `k` times, for `k = 1..=k_max`. On lattice models the
/// count is the number of distinct shell-restricted clusters joining the
/// two boundaries. Fits give `lambda(k)` from `p ~ (r/R)^lambda`.
pub fn estimate_lambda(
    spec: &GeneratorSpec,
    k_max: usize,
    ratios: &[f64],
    trials: usize,
    seed: u64,
) -> Result<LambdaScan> {
    if k_max < 1 || trials < 1 || ratios.len() < 3 {
        return bad_param("lambda scan needs k_max >= 1, trials >= 1 and at least 3 ratios");
    }
    if ratios.iter().any(|&q| !(q > 0.0 && q < 1.0)) {
        return bad_param("ratios r/R must lie in (0, 1)");
    }
    let first = generate(&GeneratorSpec { kind: spec.kind, seed: child_seed(seed, 0) })?;
    let dom = domain(&spec.kind, &first);
    let centre = dom.lo.lerp(dom.hi, 0.5);
    let extent = (0..2).map(|i| dom.hi.0[i] - dom.lo.0[i]).fold(0.0, f64::max);
    let outer = 0.45 * extent;
    let shells: Vec<Shell> = ratios.iter().map(|&q| Shell::new(centre, q * outer, outer)).collect::<Result<_>>()?;
    let (counts, failed) = run_trials(spec, trials, seed, |s| Ok(shells.iter().map(|sh| crossing_count(s, sh)).collect::<Vec<_>>()))?;
    let n = counts.len();
    let mut rows = Vec::with_capacity(ratios.len() * k_max);
    let mut excluded = Vec::new();
    for (ri, &q) in ratios.iter().enumerate() {
        for k in 1..=k_max {
            let hits = counts.iter().filter(|c| c[ri] >= k).count();
            let p = hits as f64 / n as f64;
            if hits == 0 {
                excluded.push((q, k));
            }
            rows.push(LambdaRow { ratio: q, k, p, stderr: (p * (1.0 - p) / n as f64).sqrt(), trials: n });
        }
    }
    let xs: Vec<f64> = ratios.iter().map(|q| q.ln()).collect();
    let fits = (1..=k_max)
        .map(|k| {
            let ps: Vec<f64> = (0..ratios.len()).map(|ri| rows[ri * k_max + k - 1].p).collect();
            fit_log_p(&xs, &ps, n)
        })
        .collect();
    Ok(LambdaScan { rows, fits, excluded, failed })
}

fn cylinder_hit(sample: &Sample, cyl: &Cylinder) -> bool {
    match &sample.field {
        Some(f) => cluster_cylinder_event(f, cyl),
        None => {
            let tol = sample.config.cutoff;
            sample.config.curves.iter().any(|c| cylinder_traversal(c, cyl, tol).is_some())
        }
    }
}

/// Probability that the first `k` cylinders of the family are all
/// traversed, for `k = 1..=K`, and the fitted ratio `rho`.
pub fn estimate_rho(spec: &GeneratorSpec, family: &[Cylinder], trials: usize, seed: u64) -> Result<RhoEstimate> {
    if trials < 1 {
        return bad_param("rho estimate needs trials >= 1");
    }
    check_well_separated(family, 2)?;
    if family.is_empty() {
        return Ok(RhoEstimate { rows: vec![], fit: None, rho: None, rho_stderr: None, failed: 0 });
    }
    let (hits, failed) = run_trials(spec, trials, seed, |s| {
        let mut k = 0;
        while k < family.len() && cylinder_hit(s, &family[k]) {
            k += 1;
        }
        Ok(k)
    })?;
    let n = hits.len();
    let rows: Vec<RhoRow> = (1..=family.len())
        .map(|k| {
            let p = hits.iter().filter(|&&h| h >= k).count() as f64 / n as f64;
            RhoRow { k, p, stderr: (p * (1.0 - p) / n as f64).sqrt(), trials: n }
        })
        .collect();
    let xs: Vec<f64> = rows.iter().map(|r| r.k as f64).collect();
    let ps: Vec<f64> = rows.iter().map(|r| r.p).collect();
    let fit = fit_log_p(&xs, &ps, n);
    let rho = fit.as_ref().map(|f| f.exponent.exp());
    let rho_stderr = fit.as_ref().map(|f| f.exponent.exp() * f.stderr);
    Ok(RhoEstimate { rows, fit, rho, rho_stderr, failed })
}
