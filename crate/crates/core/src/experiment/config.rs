//! Experiment configuration: flat `key = value` lines with `[section]`
//! headers.
//!
//! ```text
//! experiment = lambda_scan
//! trials = 200
//! seed = 7
//! ratios = 0.125, 0.25, 0.5
//!
//! [generator]
//! kind = bond_perc
//! n = 64
//! p = 0.5
//!
//! [params]
//! k_max = 3
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::generators::{GeneratorKind, GeneratorSpec};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum ExperimentKind {
    LambdaScan,
    RhoScan,
    Sparsity,
    Dimension,
    Capacity,
    Distance,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 6] = [
        ExperimentKind::LambdaScan,
        ExperimentKind::RhoScan,
        ExperimentKind::Sparsity,
        ExperimentKind::Dimension,
        ExperimentKind::Capacity,
        ExperimentKind::Distance,
    ];

    pub fn id(&self) -> &'static str {
        match self {
            ExperimentKind::LambdaScan => "lambda_scan",
            ExperimentKind::RhoScan => "rho_scan",
            ExperimentKind::Sparsity => "sparsity",
            ExperimentKind::Dimension => "dimension",
            ExperimentKind::Capacity => "capacity",
            ExperimentKind::Distance => "distance",
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for ExperimentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.id() == s)
            .ok_or_else(|| Error::InvalidConfig(format!("experiment: unknown kind {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// The generator; its seed is the master seed of the experiment.
    pub generator: GeneratorSpec,
    /// Inner/outer radius ratios for crossing scans.
    pub ratios: Vec<f64>,
    /// Length scales for count tables and capacity truncations.
    pub scales: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub output_path: Option<PathBuf>,
    pub threads: Option<usize>,
    /// Experiment-specific settings from the `[params]` section.
    pub params: BTreeMap<String, String>,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn list(v: &str) -> std::result::Result<Vec<f64>, String> {
    v.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| format!("bad number {t:?}")))
        .collect()
}

fn join(v: &[f64]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

const TOP_KEYS: [&str; 7] = ["experiment", "trials", "seed", "ratios", "scales", "output", "threads"];

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut top: BTreeMap<String, (usize, String)> = BTreeMap::new();
        let mut generator: BTreeMap<String, String> = BTreeMap::new();
        let mut params: BTreeMap<String, String> = BTreeMap::new();
        let mut section = String::new();
        for (i, raw) in text.lines().enumerate() {
            let n = i + 1;
            let line = raw.split('#').next().unwrap().trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name.strip_suffix(']').ok_or_else(|| perr(n, "unterminated section header"))?.trim();
                if !["generator", "params"].contains(&name) {
                    return Err(perr(n, format!("unknown section [{name}]")));
                }
                section = name.to_string();
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| perr(n, "expected key = value"))?;
            let (k, v) = (k.trim().to_string(), v.trim().to_string());
            if k.is_empty() {
                return Err(perr(n, "empty key"));
            }
            let dup = match section.as_str() {
                "" => {
                    if !TOP_KEYS.contains(&k.as_str()) {
                        return Err(perr(n, format!("unknown key `{k}`")));
                    }
                    top.insert(k.clone(), (n, v)).is_some()
                }
                "generator" => generator.insert(k.clone(), v).is_some(),
                _ => params.insert(k.clone(), v).is_some(),
            };
            if dup {
                return Err(perr(n, format!("duplicate key `{k}`")));
            }
        }
        let get = |k: &str| top.get(k);
        let (_, exp) = get("experiment").ok_or_else(|| Error::InvalidConfig("missing `experiment`".into()))?;
        let experiment: ExperimentKind = exp.parse()?;
        fn typed<T: FromStr>(e: Option<&(usize, String)>, what: &str) -> Result<Option<T>> {
            match e {
                None => Ok(None),
                Some((n, v)) => v.parse().map(Some).map_err(|_| perr(*n, format!("bad value {v:?} for `{what}`"))),
            }
        }
        let lists = |k: &str| -> Result<Vec<f64>> {
            match get(k) {
                None => Ok(Vec::new()),
                Some((n, v)) => list(v).map_err(|m| perr(*n, format!("`{k}`: {m}"))),
            }
        };
        let seed = typed::<u64>(get("seed"), "seed")?.unwrap_or(0);
        let kind_name = generator.remove("kind").ok_or_else(|| Error::InvalidConfig("[generator]: missing `kind`".into()))?;
        let kind = GeneratorKind::from_params(&kind_name, &generator)?;
        let cfg = ExperimentConfig {
            experiment,
            generator: GeneratorSpec { kind, seed },
            ratios: lists("ratios")?,
            scales: lists("scales")?,
            trials: typed(get("trials"), "trials")?.unwrap_or(1),
            seed,
            output_path: get("output").map(|(_, v)| PathBuf::from(v)),
            threads: typed(get("threads"), "threads")?,
            params,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that do not need a sample; scales against the cutoff are
    /// checked when the experiment runs.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.trials < 1 {
            return bad("trials: must be at least 1".into());
        }
        if self.threads == Some(0) {
            return bad("threads: must be at least 1".into());
        }
        if let Some(q) = self.ratios.iter().find(|&&q| !(q > 0.0 && q < 1.0)) {
            return bad(format!("ratios: {q} not in (0, 1)"));
        }
        if let Some(l) = self.scales.iter().find(|&&l| !(l > 0.0 && l <= 1.0)) {
            return bad(format!("scales: {l} not in (0, 1]"));
        }
        self.generator.kind.validate()
    }

    /// Overrides from the command line.
    pub fn with_overrides(mut self, seed: Option<u64>, trials: Option<usize>, threads: Option<usize>) -> Result<Self> {
        if let Some(s) = seed {
            self.seed = s;
            self.generator.seed = s;
        }
        if let Some(t) = trials {
            self.trials = t;
        }
        if threads.is_some() {
            self.threads = threads;
        }
        self.validate()?;
        Ok(self)
    }

    /// Typed `[params]` value, or `default` when absent.
    pub fn param<T: FromStr>(&self, key: &str, default: T) -> Result<T> {
        match self.params.get(key) {
            None => Ok(default),
            Some(v) => v.parse().map_err(|_| Error::InvalidConfig(format!("params: bad value {v:?} for `{key}`"))),
        }
    }

    pub fn param_list(&self, key: &str, default: &[f64]) -> Result<Vec<f64>> {
        match self.params.get(key) {
            None => Ok(default.to_vec()),
            Some(v) => list(v).map_err(|m| Error::InvalidConfig(format!("params: `{key}`: {m}"))),
        }
    }

    /// Canonical text: parsing it gives back the same config.
    pub fn to_text(&self) -> String {
        let mut out = format!("experiment = {}\ntrials = {}\nseed = {}\n", self.experiment, self.trials, self.seed);
        if !self.ratios.is_empty() {
            out += &format!("ratios = {}\n", join(&self.ratios));
        }
        if !self.scales.is_empty() {
            out += &format!("scales = {}\n", join(&self.scales));
        }
        if let Some(p) = &self.output_path {
            out += &format!("output = {}\n", p.display());
        }
        if let Some(t) = self.threads {
            out += &format!("threads = {t}\n");
        }
        out += &format!("\n[generator]\nkind = {}\n", self.generator.kind.name());
        for (k, v) in self.generator.kind.params() {
            out += &format!("{k} = {v}\n");
        }
        if !self.params.is_empty() {
            out += "\n[params]\n";
            for (k, v) in &self.params {
                out += &format!("{k} = {v}\n");
            }
        }
        out
    }

    /// `key=value` pairs describing the run, for the record.
    pub fn echo(&self) -> Vec<(String, String)> {
        let mut e = vec![
            ("experiment".to_string(), self.experiment.to_string()),
            ("generator".to_string(), self.generator.kind.name().to_string()),
        ];
        for (k, v) in self.generator.kind.params() {
            e.push((format!("generator.{k}"), v));
        }
        e.push(("trials".into(), self.trials.to_string()));
        e.push(("seed".into(), self.seed.to_string()));
        if !self.ratios.is_empty() {
            e.push(("ratios".into(), join(&self.ratios)));
        }
        if !self.scales.is_empty() {
            e.push(("scales".into(), join(&self.scales)));
        }
        for (k, v) in &self.params {
            e.push((format!("params.{k}"), v.clone()));
        }
        e
    }
}
