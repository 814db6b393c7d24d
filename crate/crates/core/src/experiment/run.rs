use std::fmt::Write as _;
use std::time::Instant;

use super::config::{ExperimentConfig, ExperimentKind};
use super::table::Table;
use crate::capacity::{build_hierarchy, capacity_lower_bound, capacity_qp, dimension_lower_bound, hierarchy_measure};
use crate::crossings::{corner_squares, estimate_lambda, estimate_rho, run_trials, sparsity_check, ScaleLadder};
use crate::curve::{box_count, partition_count, CurveConfig, PolyCurve};
use crate::error::{Error, Result};
use crate::generators::{generate, GeneratorSpec};
use crate::metric::config_distance;
use crate::regularity::{dimension_summary, dyadic_scales, sample_counts};
use crate::seed::child_seed;

#[derive(Clone, Debug, PartialEq)]
pub struct ResultRecord {
    pub experiment: ExperimentKind,
    pub params: Vec<(String, String)>,
    /// Ordered `key = value` metrics; a pure function of the config.
    pub metrics: Vec<(String, String)>,
    pub table: Table,
    pub wall_time: f64,
    pub version: String,
}

impl ResultRecord {
    pub fn metric(&self, key: &str) -> Option<&str> {
        self.metrics.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    pub fn metric_f64(&self, key: &str) -> Option<f64> {
        self.metric(key)?.parse().ok()
    }

    pub fn metrics_section(&self) -> String {
        let mut out = String::from("[metrics]\n");
        for (k, v) in &self.metrics {
            writeln!(out, "{k} = {v}").unwrap();
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "[record]\nexperiment = {}\nversion = {}\nwall_time = {:.3}\n\n[params]\n",
            self.experiment, self.version, self.wall_time
        );
        for (k, v) in &self.params {
            writeln!(out, "{k} = {v}").unwrap();
        }
        out.push('\n');
        out += &self.metrics_section();
        out += "\n[table]\n";
        out += &self.table.to_csv();
        out
    }
}

struct Metrics(Vec<(String, String)>);

impl Metrics {
    fn put(&mut self, k: impl Into<String>, v: impl ToString) {
        self.0.push((k.into(), v.to_string()));
    }

    fn opt(&mut self, k: impl Into<String>, v: Option<f64>) {
        self.put(k, v.map_or("none".to_string(), |x| x.to_string()));
    }
}

fn longest(f: &CurveConfig) -> Result<&PolyCurve> {
    f.curves
        .iter()
        .fold(None::<&PolyCurve>, |b, c| match b {
            Some(b) if b.diameter() >= c.diameter() => Some(b),
            _ => Some(c),
        })
        .ok_or_else(|| Error::CurveTooShort("sample has no curves".into()))
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

/// Runs the configured pipeline on a dedicated pool when a thread count is
/// given. Metrics do not depend on the thread count.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    cfg.validate()?;
    match cfg.threads {
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .map_err(|e| Error::InvalidConfig(format!("threads: {e}")))?;
            pool.install(|| run_inner(cfg))
        }
        None => run_inner(cfg),
    }
}

fn run_inner(cfg: &ExperimentConfig) -> Result<ResultRecord> {
    let start = Instant::now();
    let first = generate(&GeneratorSpec { kind: cfg.generator.kind, seed: child_seed(cfg.seed, 0) })?;
    let cutoff = first.config.cutoff;
    if let Some(l) = cfg.scales.iter().find(|&&l| l < cutoff) {
        return Err(Error::InvalidConfig(format!("scales: {l} below the cutoff {cutoff}")));
    }
    let mut m = Metrics(Vec::new());
    let table = match cfg.experiment {
        ExperimentKind::LambdaScan => lambda_scan(cfg, &mut m)?,
        ExperimentKind::RhoScan => rho_scan(cfg, &mut m)?,
        ExperimentKind::Sparsity => sparsity(cfg, &mut m)?,
        ExperimentKind::Dimension => dimension(cfg, &mut m)?,
        ExperimentKind::Capacity => capacity(cfg, &mut m)?,
        ExperimentKind::Distance => distance(cfg, &mut m)?,
    };
    Ok(ResultRecord {
        experiment: cfg.experiment,
        params: cfg.echo(),
        metrics: m.0,
        table,
        wall_time: start.elapsed().as_secs_f64(),
        version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

fn lambda_scan(cfg: &ExperimentConfig, m: &mut Metrics) -> Result<Table> {
    let k_max: usize = cfg.param("k_max", 3)?;
    let ratios = if cfg.ratios.is_empty() { vec![0.125, 0.25, 0.5] } else { cfg.ratios.clone() };
    let scan = estimate_lambda(&cfg.generator, k_max, &ratios, cfg.trials, cfg.seed)?;
    m.put("failed", scan.failed);
    m.put("used", cfg.trials - scan.failed);
    let monotone = (0..ratios.len()).all(|ri| (1..k_max).all(|k| scan.p(ri, k) >= scan.p(ri, k + 1)));
    m.put("monotone_in_k", monotone);
    for (k, fit) in scan.fits.iter().enumerate() {
        m.opt(format!("lambda.{}", k + 1), fit.as_ref().map(|f| f.exponent));
        m.opt(format!("lambda_stderr.{}", k + 1), fit.as_ref().map(|f| f.stderr));
    }
    m.put("excluded", scan.excluded.len());
    let mut t = Table::new(&["ratio", "k", "p", "stderr", "trials"]);
    for r in &scan.rows {
        t.push(vec![r.ratio, r.k as f64, r.p, r.stderr, r.trials as f64]);
    }
    Ok(t)
}

fn rho_scan(cfg: &ExperimentConfig, m: &mut Metrics) -> Result<Table> {
    let est = estimate_rho(&cfg.generator, &corner_squares(), cfg.trials, cfg.seed)?;
    m.put("failed", est.failed);
    m.opt("rho", est.rho);
    m.opt("rho_stderr", est.rho_stderr);
    let mut t = Table::new(&["k", "p", "stderr", "trials"]);
    for r in &est.rows {
        m.put(format!("p.{}", r.k), r.p);
        t.push(vec![r.k as f64, r.p, r.stderr, r.trials as f64]);
    }
    Ok(t)
}

fn sparsity(cfg: &ExperimentConfig, m: &mut Metrics) -> Result<Table> {
    let gamma: f64 = cfg.param("gamma", 8.0)?;
    let k0: usize = cfg.param("k0", 6)?;
    let bound_m: Option<usize> = cfg.params.get("m").map(|_| cfg.param("m", 0)).transpose()?;
    let gammas = cfg.param_list("gammas", &[])?;
    let rows = run_trials(&cfg.generator, cfg.trials, cfg.seed, |s| {
        let ladder = ScaleLadder::for_config(&s.config, gamma, k0)?;
        let v = sparsity_check(&s.config, &ladder);
        let chain = v.witness.as_ref().map_or(0, |w| w.len());
        let bound = match bound_m {
            Some(bm) if v.sparse && !gammas.is_empty() => Some(dimension_lower_bound(longest(&s.config)?, bm, &gammas, k0)?.value),
            _ => None,
        };
        Ok((v.sparse, v.n_runs, chain, bound))
    });
    let (rows, failed) = rows?;
    let sparse = rows.iter().filter(|r| r.0).count();
    m.put("failed", failed);
    m.put("used", rows.len());
    m.put("sparse", sparse);
    m.put("sparse_fraction", sparse as f64 / rows.len() as f64);
    let bounds: Vec<f64> = rows.iter().filter_map(|r| r.3).collect();
    m.opt("mean_bound", mean(&bounds));
    m.opt("min_bound", (!bounds.is_empty()).then(|| bounds.iter().copied().fold(f64::INFINITY, f64::min)));
    let mut t = Table::new(&["sample", "sparse", "runs", "chain", "bound"]);
    for (i, r) in rows.iter().enumerate() {
        t.push(vec![i as f64, r.0 as u8 as f64, r.1 as f64, r.2 as f64, r.3.unwrap_or(f64::NAN)]);
    }
    Ok(t)
}

fn dimension(cfg: &ExperimentConfig, m: &mut Metrics) -> Result<Table> {
    let eps: f64 = cfg.param("eps", 0.1)?;
    let k: usize = cfg.param("k", 2)?;
    let window = if cfg.scales.len() >= 2 {
        let lo = cfg.scales.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = cfg.scales.iter().copied().fold(0.0, f64::max);
        Some((lo, hi))
    } else {
        None
    };
    let (rows, failed) = run_trials(&cfg.generator, cfg.trials, cfg.seed, |s| {
        let c = longest(&s.config)?;
        let d = dimension_summary(c, eps, k, window)?;
        Ok((c.clone(), d))
    })?;
    m.put("failed", failed);
    m.put("used", rows.len());
    let dims: Vec<f64> = rows.iter().map(|r| r.1.dim_b.exponent).collect();
    let taus: Vec<f64> = rows.iter().map(|r| r.1.tau.exponent).collect();
    m.opt("dim_b", mean(&dims));
    m.opt("tau", mean(&taus));
    m.opt("alpha_lower", mean(&rows.iter().map(|r| r.1.alpha_lower).collect::<Vec<_>>()));
    m.put("tempered", rows.iter().filter(|r| r.1.tempered).count());
    for (i, r) in rows.iter().enumerate().take(16) {
        m.put(format!("sample.{i}"), format!("dim_b={} tau={} kfold={}", r.1.dim_b.exponent, r.1.tau.exponent, r.1.kfold_scale));
    }
    let mut t = Table::new(&["scale", "partition", "box"]);
    if let Some((c, d)) = rows.first() {
        let scales = dyadic_scales(d.dim_b.window.0, d.dim_b.window.1);
        let pc = sample_counts(c, &scales, partition_count)?;
        let bc = sample_counts(c, &scales, box_count)?;
        for (p, b) in pc.iter().zip(&bc) {
            t.push(vec![p.0, p.1, b.1]);
        }
    }
    Ok(t)
}

fn capacity(cfg: &ExperimentConfig, m: &mut Metrics) -> Result<Table> {
    let gamma: f64 = cfg.param("gamma", 5.0)?;
    let mm: usize = cfg.param("m", 4)?;
    let k_max: usize = cfg.param("k_max", 3)?;
    let k0: usize = cfg.param("k0", 0)?;
    let tol: f64 = cfg.param("tol", 1e-6)?;
    let beta = ((mm * (mm + 1)) as f64).sqrt();
    let s: f64 = cfg.param("s", 0.9 * beta.ln() / gamma.ln())?;
    let (rows, failed) = run_trials(&cfg.generator, cfg.trials, cfg.seed, |smp| {
        let c = longest(&smp.config)?;
        let h = build_hierarchy(c, gamma, mm, k_max)?;
        let mu = hierarchy_measure(c, &h);
        let ell = cfg.scales.first().copied().unwrap_or(h.scale(h.k_max()));
        let q = capacity_qp(&mu.support, s, ell, tol)?;
        let lb = capacity_lower_bound(&h, s, k0)?;
        Ok((mu.support.len(), q, lb))
    })?;
    m.put("failed", failed);
    m.put("used", rows.len());
    m.put("s", s);
    m.put("bound_holds", rows.iter().all(|r| r.2 <= r.1.capacity));
    m.put("converged", rows.iter().all(|r| r.1.converged));
    m.opt("mean_capacity", mean(&rows.iter().map(|r| r.1.capacity).collect::<Vec<_>>()));
    for (i, r) in rows.iter().enumerate().take(16) {
        m.put(format!("sample.{i}"), r.1.record());
    }
    let mut t = Table::new(&["sample", "leaves", "s", "ell", "energy", "capacity", "lower_bound", "gap"]);
    for (i, (n, q, lb)) in rows.iter().enumerate() {
        t.push(vec![i as f64, *n as f64, q.s, q.ell, q.energy, q.capacity, *lb, q.gap]);
    }
    Ok(t)
}

fn distance(cfg: &ExperimentConfig, m: &mut Metrics) -> Result<Table> {
    let tol: f64 = cfg.param("tol", 1e-9)?;
    let (configs, failed) = run_trials(&cfg.generator, cfg.trials, cfg.seed, |s| Ok(s.config.clone()))?;
    let pairs: Vec<(usize, usize)> =
        (0..configs.len()).flat_map(|i| (i + 1..configs.len()).map(move |j| (i, j))).collect();
    use rayon::prelude::*;
    let d: Vec<f64> =
        pairs.par_iter().map(|&(i, j)| config_distance(&configs[i], &configs[j], tol)).collect::<Result<_>>()?;
    m.put("failed", failed);
    m.put("pairs", pairs.len());
    m.opt("mean", mean(&d));
    m.opt("max", d.iter().copied().reduce(f64::max));
    m.opt("min", d.iter().copied().reduce(f64::min));
    let mut t = Table::new(&["i", "j", "distance"]);
    for (&(i, j), v) in pairs.iter().zip(&d) {
        t.push(vec![i as f64, j as f64, *v]);
    }
    Ok(t)
}
