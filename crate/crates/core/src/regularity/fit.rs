use crate::curve::PolyCurve;
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ExponentFit {
    pub exponent: f64,
    pub intercept: f64,
    pub window: (f64, f64),
    pub residual_rms: f64,
    pub n_scales: usize,
    /// Standard error of the slope.
    pub stderr: f64,
}

impl ExponentFit {
    /// One-line record: `fit kind=.. exponent=.. residual=.. lmin=.. lmax=.. n=..`.
    pub fn record(&self, kind: &str) -> String {
        format!(
            "fit kind={} exponent={:.6} residual={:.6} lmin={:.6e} lmax={:.6e} n={}",
            kind, self.exponent, self.residual_rms, self.window.0, self.window.1, self.n_scales
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
    pub residual_rms: f64,
}

/// Weighted least squares `y = intercept + slope x`. Weights default to 1.
/// With explicit weights (inverse variances) the slope error is the model
/// error; otherwise it is estimated from the residuals.
pub fn fit_line(xs: &[f64], ys: &[f64], weights: Option<&[f64]>) -> Option<LineFit> {
    let n = xs.len();
    if n < 2 || ys.len() != n {
        return None;
    }
    let w = |i: usize| weights.map_or(1.0, |w| w[i]);
    let sw: f64 = (0..n).map(w).sum();
    let mx = (0..n).map(|i| w(i) * xs[i]).sum::<f64>() / sw;
    let my = (0..n).map(|i| w(i) * ys[i]).sum::<f64>() / sw;
    let sxx: f64 = (0..n).map(|i| w(i) * (xs[i] - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = (0..n).map(|i| w(i) * (xs[i] - mx) * (ys[i] - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = (0..n).map(|i| (ys[i] - intercept - slope * xs[i]).powi(2)).sum();
    let residual_rms = (ssr / n as f64).sqrt();
    let slope_se = match weights {
        Some(_) => (1.0 / sxx).sqrt(),
        None if n > 2 => (ssr / (n - 2) as f64 / sxx).sqrt(),
        None => f64::NAN,
    };
    Some(LineFit { slope, intercept, slope_se, residual_rms })
}

/// Slope of `log(count)` against `log(1/ell)` over the samples inside
/// `window` (inclusive, up to rounding).
pub fn fit_exponent(samples: &[(f64, f64)], window: (f64, f64)) -> Result<ExponentFit> {
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::InvalidParameter(format!("bad window ({lo}, {hi})")));
    }
    let inside: Vec<(f64, f64)> = samples
        .iter()
        .copied()
        .filter(|&(l, _)| l >= lo * (1.0 - 1e-9) && l <= hi * (1.0 + 1e-9))
        .collect();
    if let Some(&(l, _)) = inside.iter().find(|&&(_, c)| !(c > 0.0)) {
        return Err(Error::InvalidParameter(format!("zero count at scale {l}")));
    }
    let mut scales: Vec<f64> = inside.iter().map(|s| s.0).collect();
    scales.sort_by(|a, b| a.partial_cmp(b).unwrap());
    scales.dedup();
    if scales.len() < 3 {
        return Err(Error::FitUnderdetermined { needed: 3, got: scales.len() });
    }
    let xs: Vec<f64> = inside.iter().map(|s| -s.0.ln()).collect();
    let ys: Vec<f64> = inside.iter().map(|s| s.1.ln()).collect();
    let f = fit_line(&xs, &ys, None).expect("distinct scales");
    Ok(ExponentFit {
        exponent: f.slope,
        intercept: f.intercept,
        window: (scales[0], *scales.last().unwrap()),
        residual_rms: f.residual_rms,
        n_scales: inside.len(),
        stderr: f.slope_se,
    })
}

/// Dyadic scales `2^-n` inside `[lmin, lmax]`, coarse to fine.
pub fn dyadic_scales(lmin: f64, lmax: f64) -> Vec<f64> {
    let n0 = (-(lmax.log2()) - 1e-9).ceil() as i32;
    let n1 = (-(lmin.log2()) + 1e-9).floor() as i32;
    (n0..=n1).map(|n| 2f64.powi(-n)).collect()
}

pub fn sample_counts(
    c: &PolyCurve,
    scales: &[f64],
    count: impl Fn(&PolyCurve, f64) -> Result<usize>,
) -> Result<Vec<(f64, f64)>> {
    scales.iter().map(|&l| Ok((l, count(c, l)? as f64))).collect()
}
