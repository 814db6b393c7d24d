use super::hierarchy::FractalHierarchy;
use crate::crossings::{sparsity_check, ScaleLadder};
use crate::curve::{CurveConfig, PolyCurve};
use crate::error::{bad_param, Result};

/// Smallest `k0` such that every segment of every generation `k` in
/// `k0..=k_max` has ancestry product at least `beta^k`. Equals `k_max + 1`
/// when even the leaves fail.
pub fn minimal_branching_k0(h: &FractalHierarchy) -> usize {
    let beta = h.beta();
    let mut k0 = h.k_max() + 1;
    for k in (0..=h.k_max()).rev() {
        let worst = h.masses(k).into_iter().fold(0.0, f64::max);
        if worst > beta.powi(-(k as i32)) * (1.0 + 1e-12) {
            break;
        }
        k0 = k;
    }
    k0
}

/// `(eps L0)^s / (gamma^(s k0) + beta / (1 - gamma^s / beta))`, with `k0`
/// raised to the smallest index from which the hierarchy branches at rate
/// `beta`.
pub fn capacity_lower_bound(h: &FractalHierarchy, s: f64, k0: usize) -> Result<f64> {
    let beta = h.beta();
    let gs = h.gamma.powf(s);
    if !(s > 0.0) || gs >= beta {
        return bad_param(format!("bound needs 0 < s and gamma^s < beta = {beta}, got gamma^s = {gs}"));
    }
    let k0 = k0.max(minimal_branching_k0(h));
    Ok((h.eps * h.l0).powf(s) / (gs.powi(k0 as i32) + beta / (1.0 - gs / beta)))
}

/// `1 + ln(1 + 1/m) / (2 ln m)`, the bound when every `gamma > m` is sparse.
pub fn limit_bound(m: usize) -> f64 {
    let m = m as f64;
    1.0 + (1.0 + 1.0 / m).ln() / (2.0 * m.ln())
}

#[derive(Clone, Debug, PartialEq)]
pub struct DimensionBound {
    /// `(gamma, sparse, s)` with `gamma^s = sqrt(m (m + 1))`.
    pub per_gamma: Vec<(f64, bool, f64)>,
    /// Largest `s` over sparse `gamma`, at least 1.
    pub value: f64,
    pub limit: f64,
}

/// Sparsity scan of `c` at each `gamma`, turned into a dimension bound.
pub fn dimension_lower_bound(c: &PolyCurve, m: usize, gammas: &[f64], k0: usize) -> Result<DimensionBound> {
    if m < 2 {
        return bad_param("dimension bound needs m >= 2");
    }
    let beta = ((m * (m + 1)) as f64).sqrt();
    let f = CurveConfig::single(c.clone())?;
    let mut per_gamma = Vec::with_capacity(gammas.len());
    let mut value: f64 = 1.0;
    for &g in gammas {
        let mf = m as f64;
        if !(g > mf && g <= 2.0 * mf) {
            return bad_param(format!("gamma {g} must lie in (m, 2m]"));
        }
        let ladder = ScaleLadder::for_config(&f, g, k0)?;
        let sparse = sparsity_check(&f, &ladder).sparse;
        let s = beta.ln() / g.ln();
        if sparse {
            value = value.max(s);
        }
        per_gamma.push((g, sparse, s));
    }
    Ok(DimensionBound { per_gamma, value, limit: limit_bound(m) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::HSegment;

    fn flat(children: &[usize], gamma: f64, m: usize) -> FractalHierarchy {
        let root = HSegment { s0: 0.0, s1: 1.0, parent: None, children: children.len() };
        let mut g1 = Vec::new();
        for (i, &c) in children.iter().enumerate() {
            g1.push(HSegment { s0: i as f64, s1: i as f64 + 0.5, parent: Some(0), children: c });
        }
        let mut g2 = Vec::new();
        for (i, &c) in children.iter().enumerate() {
            for _ in 0..c {
                g2.push(HSegment { s0: 0.0, s1: 0.1, parent: Some(i), children: 0 });
            }
        }
        FractalHierarchy { generations: vec![vec![root], g1, g2], gamma, m, l0: 1.0, eps: gamma / m as f64 - 1.0 }
    }

    #[test]
    fn closed_form() {
        let h = flat(&[5, 5, 5, 5, 5], 5.0, 4);
        assert_eq!(minimal_branching_k0(&h), 0);
        let beta = 20f64.sqrt();
        let gs = 5f64.powf(0.9);
        let want = 0.25f64.powf(0.9) / (1.0 + beta / (1.0 - gs / beta));
        assert!((capacity_lower_bound(&h, 0.9, 0).unwrap() - want).abs() < 1e-15);
        assert!(capacity_lower_bound(&h, 1.0, 0).is_err());
        let tiny = capacity_lower_bound(&h, 1e-9, 0).unwrap();
        assert!((tiny - 1.0 / (1.0 + beta / (1.0 - 1.0 / beta))).abs() < 1e-6);
    }

    #[test]
    fn exactly_m_children_push_k0_past_the_leaves() {
        let h = flat(&[4, 4, 4, 4], 5.0, 4);
        assert_eq!(minimal_branching_k0(&h), 3);
        let gs = 5f64.powf(0.9);
        let beta = 20f64.sqrt();
        let want = 0.25f64.powf(0.9) / (gs.powi(3) + beta / (1.0 - gs / beta));
        assert!((capacity_lower_bound(&h, 0.9, 1).unwrap() - want).abs() < 1e-15);
    }

    #[test]
    fn limit_values() {
        assert!((limit_bound(2) - 1.2925).abs() < 1e-4);
        let s: f64 = 6f64.sqrt().ln() / 2.5f64.ln();
        assert!((s - 0.978).abs() < 1e-3);
    }

    #[test]
    fn line_has_no_bound() {
        let c = crate::generators::gen_fixture(crate::generators::Fixture::Line { depth: 9 }).unwrap();
        let b = dimension_lower_bound(&c, 7, &[7.125, 7.25], 0).unwrap();
        assert_eq!(b.value, 1.0);
        assert!(b.per_gamma.iter().all(|g| !g.1));
    }
}
