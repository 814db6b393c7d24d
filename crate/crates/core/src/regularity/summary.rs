use super::fit::{dyadic_scales, fit_exponent, sample_counts, ExponentFit};
use crate::curve::{box_count, partition_count, CurveConfig, PolyCurve};
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct DimensionSummary {
    pub tau: ExponentFit,
    pub dim_b: ExponentFit,
    pub alpha_lower: f64,
    /// `dimB <= tau <= (1 + eps) dimB`, each side with `2 * residual` slack.
    pub tempered: bool,
    /// Smallest dyadic scale carrying a k-fold crossing of power eps (1 if none).
    pub kfold_scale: f64,
}

/// Effective cutoff: the step, or the longest leg for continuum fixtures.
pub(crate) fn effective_cutoff(c: &PolyCurve) -> f64 {
    if c.step() > 0.0 {
        c.step()
    } else {
        (0..c.n_legs()).map(|i| c.leg_len(i)).fold(0.0, f64::max)
    }
}

/// `[4 delta, diameter / 4]`.
pub fn default_window(c: &PolyCurve) -> Result<(f64, f64)> {
    let d = effective_cutoff(c);
    let diam = c.diameter();
    if diam < 4.0 * d || d == 0.0 {
        return Err(Error::CurveTooShort(format!("diameter {diam} too small for cutoff {d}")));
    }
    Ok((4.0 * d, diam / 4.0))
}

pub fn dimension_summary(c: &PolyCurve, eps: f64, k: usize, window: Option<(f64, f64)>) -> Result<DimensionSummary> {
    let window = match window {
        Some(w) => w,
        None => default_window(c)?,
    };
    let scales = dyadic_scales(window.0, window.1);
    let tau = fit_exponent(&sample_counts(c, &scales, partition_count)?, window)?;
    let dim_b = fit_exponent(&sample_counts(c, &scales, box_count)?, window)?;
    let slack = 2.0 * tau.residual_rms.max(dim_b.residual_rms);
    let tempered = dim_b.exponent <= tau.exponent + slack && tau.exponent <= (1.0 + eps) * dim_b.exponent + slack;
    let cfg = CurveConfig::around(vec![c.clone()], effective_cutoff(c).max(1e-12))?;
    let kfold_scale = crate::crossings::min_kfold_scale(&cfg, eps, k)?;
    Ok(DimensionSummary { alpha_lower: 1.0 / tau.exponent, tau, dim_b, tempered, kfold_scale })
}
