use std::collections::BTreeMap;

use super::fixture::{gen_fixture, Fixture};
use super::frontier::gen_rw_frontier;
use super::lattice::{extract_crossing_path, gen_bond_percolation, gen_site_percolation, Direction, LatticeField};
use super::lerw::gen_lerw;
use super::mst::gen_mst_path;
use crate::curve::CurveConfig;
use crate::error::{Error, Result};
use crate::geom::{Bbox, Point};

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GeneratorKind {
    /// lowest left-right crossing of bond percolation
    BondPerc { n: usize, p: f64 },
    SitePerc { n: usize, p: f64 },
    /// walk from the centre of the unit square out to `radius`
    Lerw { n: usize, radius: f64 },
    /// tree path between opposite corners of the box
    MstPath { n: usize },
    RwFrontier { steps: usize, n: usize },
    Fixture(Fixture),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub kind: GeneratorKind,
    pub seed: u64,
}

/// A generated configuration and, for lattice models, the field behind it.
#[derive(Clone, Debug)]
pub struct Sample {
    pub config: CurveConfig,
    pub field: Option<LatticeField>,
}

fn field_sample(f: LatticeField) -> Result<Sample> {
    let curves = extract_crossing_path(&f, Direction::LeftRight).into_iter().collect();
    let config = CurveConfig::new(2, curves, f.delta, Bbox::unit(2))?;
    Ok(Sample { config, field: Some(f) })
}

pub fn generate(spec: &GeneratorSpec) -> Result<Sample> {
    let seed = spec.seed;
    match spec.kind {
        GeneratorKind::BondPerc { n, p } => field_sample(gen_bond_percolation(n, p, seed)?),
        GeneratorKind::SitePerc { n, p } => field_sample(gen_site_percolation(n, p, seed)?),
        GeneratorKind::Lerw { n, radius } => {
            let c = gen_lerw(n, seed, Point::new2(0.5, 0.5), radius)?;
            Ok(Sample { config: CurveConfig::around(vec![c], 1.0 / n as f64)?, field: None })
        }
        GeneratorKind::MstPath { n } => {
            let far = (n as f64 - 1.0) / n as f64;
            let c = gen_mst_path(n, seed, Point::new2(0.0, 0.0), Point::new2(far, far))?;
            Ok(Sample { config: CurveConfig::new(2, vec![c], 1.0 / n as f64, Bbox::unit(2))?, field: None })
        }
        GeneratorKind::RwFrontier { steps, n } => {
            let c = gen_rw_frontier(steps, n, seed)?;
            Ok(Sample { config: CurveConfig::around(vec![c], 1.0 / n as f64)?, field: None })
        }
        GeneratorKind::Fixture(fx) => {
            let c = gen_fixture(fx)?;
            Ok(Sample { config: CurveConfig::single(c)?, field: None })
        }
    }
}

fn bad(msg: String) -> Error {
    Error::InvalidConfig(msg)
}

fn get<T: std::str::FromStr>(params: &BTreeMap<String, String>, key: &str) -> Result<T> {
    let v = params.get(key).ok_or_else(|| bad(format!("generator: missing `{key}`")))?;
    v.parse().map_err(|_| bad(format!("generator: bad value {v:?} for `{key}`")))
}

impl GeneratorKind {
    /// Kind name plus `key = value` parameters, as read from a config section.
    pub fn from_params(kind: &str, params: &BTreeMap<String, String>) -> Result<Self> {
        let k = match kind {
            "bond_perc" => GeneratorKind::BondPerc { n: get(params, "n")?, p: get(params, "p")? },
            "site_perc" => GeneratorKind::SitePerc { n: get(params, "n")?, p: get(params, "p")? },
            "lerw" => GeneratorKind::Lerw { n: get(params, "n")?, radius: get(params, "radius")? },
            "mst_path" => GeneratorKind::MstPath { n: get(params, "n")? },
            "rw_frontier" => GeneratorKind::RwFrontier { steps: get(params, "steps")?, n: get(params, "n")? },
            "fixture" => {
                let name: String = get(params, "fixture")?;
                let fx = match name.as_str() {
                    "line" => Fixture::Line { depth: get(params, "depth")? },
                    "staircase" => Fixture::Staircase { depth: get(params, "depth")? },
                    "koch" => Fixture::Koch { depth: get(params, "depth")? },
                    "hilbert" => Fixture::Hilbert { depth: get(params, "depth")? },
                    "hairpin" => Fixture::Hairpin { gap: get(params, "gap")?, step: get(params, "step")? },
                    other => return Err(bad(format!("generator: unknown fixture {other:?}"))),
                };
                GeneratorKind::Fixture(fx)
            }
            other => return Err(bad(format!("generator: unknown kind {other:?}"))),
        };
        k.validate()?;
        Ok(k)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            GeneratorKind::BondPerc { n, p } | GeneratorKind::SitePerc { n, p } => n >= 2 && (0.0..=1.0).contains(&p),
            GeneratorKind::Lerw { n, radius } => n >= 1 && radius > 0.0 && radius <= 0.5,
            GeneratorKind::MstPath { n } => n >= 2,
            GeneratorKind::RwFrontier { steps, n } => steps >= 1 && n >= 2,
            GeneratorKind::Fixture(_) => true,
        };
        if ok {
            Ok(())
        } else {
            Err(bad(format!("generator: parameters out of range in {self:?}")))
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GeneratorKind::BondPerc { .. } => "bond_perc",
            GeneratorKind::SitePerc { .. } => "site_perc",
            GeneratorKind::Lerw { .. } => "lerw",
            GeneratorKind::MstPath { .. } => "mst_path",
            GeneratorKind::RwFrontier { .. } => "rw_frontier",
            GeneratorKind::Fixture(_) => "fixture",
        }
    }

    /// Parameters in the form accepted by [`GeneratorKind::from_params`].
    pub fn params(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        match *self {
            GeneratorKind::BondPerc { n, p } | GeneratorKind::SitePerc { n, p } => {
                put("n", n.to_string());
                put("p", p.to_string());
            }
            GeneratorKind::Lerw { n, radius } => {
                put("n", n.to_string());
                put("radius", radius.to_string());
            }
            GeneratorKind::MstPath { n } => put("n", n.to_string()),
            GeneratorKind::RwFrontier { steps, n } => {
                put("steps", steps.to_string());
                put("n", n.to_string());
            }
            GeneratorKind::Fixture(fx) => match fx {
                Fixture::Line { depth } => {
                    put("fixture", "line".into());
                    put("depth", depth.to_string());
                }
                Fixture::Staircase { depth } => {
                    put("fixture", "staircase".into());
                    put("depth", depth.to_string());
                }
                Fixture::Koch { depth } => {
                    put("fixture", "koch".into());
                    put("depth", depth.to_string());
                }
                Fixture::Hilbert { depth } => {
                    put("fixture", "hilbert".into());
                    put("depth", depth.to_string());
                }
                Fixture::Hairpin { gap, step } => {
                    put("fixture", "hairpin".into());
                    put("gap", gap.to_string());
                    put("step", step.to_string());
                }
            },
        }
        m
    }
}
