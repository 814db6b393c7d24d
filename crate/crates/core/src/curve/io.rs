//! Plain-text curveset format.
//!
//! ```text
//! curveset v1 d=2 delta=1.0000000000000000e-2
//! 3 0.0e0 0.0e0 1.0e-2 0.0e0 2.0e-2 0.0e0
//! ```
//! One curve per line: vertex count then coordinates. Floats are written with
//! 17 significant digits so a round trip is exact.

use std::fmt::Write as _;

use super::{CurveConfig, PolyCurve};
use crate::error::{Error, Result};
use crate::geom::{Bbox, Point};

pub fn write_curveset(cfg: &CurveConfig) -> String {
    let mut out = String::new();
    writeln!(out, "curveset v1 d={} delta={:.16e}", cfg.dim, cfg.cutoff).unwrap();
    writeln!(
        out,
        "region {}",
        (0..cfg.dim)
            .flat_map(|k| [cfg.region.lo.0[k], cfg.region.hi.0[k]])
            .map(|v| format!("{v:.16e}"))
            .collect::<Vec<_>>()
            .join(" ")
    )
    .unwrap();
    for c in &cfg.curves {
        write!(out, "{}", c.vertices().len()).unwrap();
        for v in c.vertices() {
            for k in 0..cfg.dim {
                write!(out, " {:.16e}", v.0[k]).unwrap();
            }
        }
        out.push('\n');
    }
    out
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn header_value<'a>(tok: &'a str, key: &str, line: usize) -> Result<&'a str> {
    tok.strip_prefix(key)
        .and_then(|r| r.strip_prefix('='))
        .ok_or_else(|| perr(line, format!("expected {key}=")))
}

pub fn parse_curveset(text: &str) -> Result<CurveConfig> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'));
    let (_, head) = lines.next().ok_or_else(|| perr(1, "empty input"))?;
    let toks: Vec<&str> = head.split_whitespace().collect();
    if toks.len() != 4 || toks[0] != "curveset" || toks[1] != "v1" {
        return Err(perr(1, "bad header"));
    }
    let dim: usize = header_value(toks[2], "d", 1)?.parse().map_err(|_| perr(1, "bad d"))?;
    let delta: f64 = header_value(toks[3], "delta", 1)?.parse().map_err(|_| perr(1, "bad delta"))?;
    if !(1..=3).contains(&dim) {
        return Err(perr(1, "d must be 1, 2 or 3"));
    }
    let mut region = None;
    let mut curves = Vec::new();
    for (i, l) in lines {
        let ln = i + 1;
        let mut it = l.split_whitespace();
        let first = it.next().unwrap();
        if first == "region" {
            let v: Vec<f64> = it
                .map(|t| t.parse().map_err(|_| perr(ln, "bad region value")))
                .collect::<Result<_>>()?;
            if v.len() != 2 * dim {
                return Err(perr(ln, "region needs 2d values"));
            }
            let mut lo = Point::ORIGIN;
            let mut hi = Point::ORIGIN;
            for k in 0..dim {
                lo.0[k] = v[2 * k];
                hi.0[k] = v[2 * k + 1];
            }
            region = Some(Bbox::new(lo, hi));
            continue;
        }
        let n: usize = first.parse().map_err(|_| perr(ln, "bad vertex count"))?;
        let vals: Vec<f64> = it
            .map(|t| t.parse().map_err(|_| perr(ln, format!("bad number {t:?}"))))
            .collect::<Result<_>>()?;
        if vals.len() != n * dim {
            return Err(perr(ln, format!("expected {} coordinates, got {}", n * dim, vals.len())));
        }
        let verts = vals.chunks(dim).map(Point::from_slice).collect();
        let c = PolyCurve::new(dim, verts, delta).map_err(|e| perr(ln, e.to_string()))?;
        curves.push(c);
    }
    match region {
        Some(r) => CurveConfig::new(dim, curves, delta, r),
        None => CurveConfig::around(curves, delta),
    }
}
