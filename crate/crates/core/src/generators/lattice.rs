//! Bond and site percolation on a rectangle of `delta Z^2`.

use std::collections::{HashMap, HashSet};
use std::fmt::Write as _;

use petgraph::unionfind::UnionFind;
use rand::RngCore;

use crate::crossings::{Cylinder, Shell};
use crate::curve::PolyCurve;
use crate::error::{bad_param, Error, Result};
use crate::geom::Point;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    Bond,
    Site,
}

/// Sites `(x, y)` for `0 <= x < width`, `0 <= y < height` at `(x delta, y delta)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    pub n: usize,
    pub width: usize,
    pub height: usize,
    pub delta: f64,
    pub p: f64,
    pub seed: u64,
    pub model: Model,
    /// bond (x,y)-(x+1,y) at `y * (width - 1) + x`
    horiz: Vec<bool>,
    /// bond (x,y)-(x,y+1) at `y * width + x`
    vert: Vec<bool>,
    sites: Vec<bool>,
}

const DIRS: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];

fn bernoulli(rng: &mut impl RngCore, p: f64) -> bool {
    if p >= 1.0 {
        return true;
    }
    if p <= 0.0 {
        return false;
    }
    let threshold = (p * 18_446_744_073_709_551_616.0) as u64;
    rng.next_u64() < threshold
}

impl LatticeField {
    fn empty(n: usize, width: usize, height: usize, p: f64, seed: u64, model: Model) -> Self {
        LatticeField {
            n,
            width,
            height,
            delta: 1.0 / n as f64,
            p,
            seed,
            model,
            horiz: Vec::new(),
            vert: Vec::new(),
            sites: Vec::new(),
        }
    }

    pub fn n_sites(&self) -> usize {
        self.width * self.height
    }

    pub fn id(&self, x: usize, y: usize) -> usize {
        y * self.width + x
    }

    pub fn point(&self, x: usize, y: usize) -> Point {
        Point::new2(x as f64 * self.delta, y as f64 * self.delta)
    }

    pub fn site_open(&self, x: usize, y: usize) -> bool {
        match self.model {
            Model::Bond => true,
            Model::Site => self.sites[self.id(x, y)],
        }
    }

    /// Whether the edge from `(x, y)` in direction `d` (E, N, W, S) is open.
    pub fn open(&self, x: usize, y: usize, d: usize) -> bool {
        let (dx, dy) = DIRS[d];
        let (nx, ny) = (x as i64 + dx, y as i64 + dy);
        if nx < 0 || ny < 0 || nx >= self.width as i64 || ny >= self.height as i64 {
            return false;
        }
        let (nx, ny) = (nx as usize, ny as usize);
        match self.model {
            Model::Bond => match d {
                0 => self.horiz[y * (self.width - 1) + x],
                2 => self.horiz[y * (self.width - 1) + nx],
                1 => self.vert[y * self.width + x],
                _ => self.vert[ny * self.width + x],
            },
            Model::Site => self.sites[self.id(x, y)] && self.sites[self.id(nx, ny)],
        }
    }

    /// Mirror in the diagonal, `(x, y) -> (y, x)`.
    pub fn transposed(&self) -> LatticeField {
        let (w, h) = (self.width, self.height);
        let mut t = LatticeField::empty(self.n, h, w, self.p, self.seed, self.model);
        for yp in 0..w {
            for xp in 0..h {
                match self.model {
                    Model::Bond => {
                        if xp + 1 < h {
                            t.horiz.push(self.vert[xp * w + yp]);
                        }
                    }
                    Model::Site => t.sites.push(self.sites[xp * w + yp]),
                }
            }
        }
        if self.model == Model::Bond {
            for yp in 0..w - 1 {
                for xp in 0..h {
                    t.vert.push(self.horiz[xp * (w - 1) + yp]);
                }
            }
        }
        t
    }

    pub fn open_bond_fraction(&self) -> f64 {
        let total = self.horiz.len() + self.vert.len();
        let open = self.horiz.iter().chain(&self.vert).filter(|&&b| b).count();
        open as f64 / total as f64
    }

    /// Union-find over the whole field.
    pub fn clusters(&self) -> UnionFind<u32> {
        let mut uf = UnionFind::new(self.n_sites());
        for y in 0..self.height {
            for x in 0..self.width {
                for d in 0..2 {
                    if self.open(x, y, d) {
                        let (dx, dy) = DIRS[d];
                        let j = self.id((x as i64 + dx) as usize, (y as i64 + dy) as usize);
                        uf.union(self.id(x, y) as u32, j as u32);
                    }
                }
            }
        }
        uf
    }
}

fn check_dims(width: usize, height: usize, p: f64) -> Result<()> {
    if width < 2 || height < 2 {
        return bad_param("lattice needs at least 2 sites per side");
    }
    if !(0.0..=1.0).contains(&p) {
        return bad_param(format!("p must lie in [0, 1], got {p}"));
    }
    Ok(())
}

fn gen_bonds(n: usize, width: usize, height: usize, p: f64, seed: u64) -> Result<LatticeField> {
    check_dims(width, height, p)?;
    let mut rng = crate::seed::rng(seed);
    let mut f = LatticeField::empty(n, width, height, p, seed, Model::Bond);
    f.horiz = (0..(width - 1) * height).map(|_| bernoulli(&mut rng, p)).collect();
    f.vert = (0..width * (height - 1)).map(|_| bernoulli(&mut rng, p)).collect();
    Ok(f)
}

/// Bond percolation on the `(n+1) x (n+1)` sites of `[0, 1]^2` at spacing `1/n`.
pub fn gen_bond_percolation(n: usize, p: f64, seed: u64) -> Result<LatticeField> {
    gen_bonds(n, n + 1, n + 1, p, seed)
}

/// Bond percolation on a `width x height` site rectangle at spacing `1/n`.
pub fn gen_bond_rectangle(n: usize, width: usize, height: usize, p: f64, seed: u64) -> Result<LatticeField> {
    gen_bonds(n, width, height, p, seed)
}

/// Site percolation on the `(n+1) x (n+1)` sites of `[0, 1]^2`.
pub fn gen_site_percolation(n: usize, p: f64, seed: u64) -> Result<LatticeField> {
    check_dims(n + 1, n + 1, p)?;
    let mut rng = crate::seed::rng(seed);
    let mut f = LatticeField::empty(n, n + 1, n + 1, p, seed, Model::Site);
    f.sites = (0..f.n_sites()).map(|_| bernoulli(&mut rng, p)).collect();
    Ok(f)
}

pub fn lr_crossing_exists(f: &LatticeField) -> bool {
    let uf = f.clusters();
    let right: HashSet<u32> = (0..f.height)
        .filter(|&y| f.site_open(f.width - 1, y))
        .map(|y| uf.find(f.id(f.width - 1, y) as u32))
        .collect();
    (0..f.height).any(|y| f.site_open(0, y) && right.contains(&uf.find(f.id(0, y) as u32)))
}

fn loop_erase<T: Copy + Eq + std::hash::Hash>(path: &[T]) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(path.len());
    let mut at: HashMap<T, usize> = HashMap::new();
    for &p in path {
        if let Some(&i) = at.get(&p) {
            for q in out.drain(i + 1..) {
                at.remove(&q);
            }
        } else {
            at.insert(p, out.len());
            out.push(p);
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    /// lowest left-right crossing
    LeftRight,
    /// leftmost bottom-top crossing
    BottomTop,
}

/// Crossing path in the given direction, `None` when no crossing exists.
pub fn extract_crossing_path(f: &LatticeField, direction: Direction) -> Option<PolyCurve> {
    match direction {
        Direction::LeftRight => lowest_crossing(f),
        Direction::BottomTop => {
            let c = lowest_crossing(&f.transposed())?;
            c.map(|p| Point::new2(p.y(), p.x())).ok()
        }
    }
}

/// A right-hand wall follower started east from the lowest left-column site
/// of a crossing cluster, stopped at the right column and loop-erased.
fn lowest_crossing(f: &LatticeField) -> Option<PolyCurve> {
    let uf = f.clusters();
    let right: HashSet<u32> = (0..f.height)
        .filter(|&y| f.site_open(f.width - 1, y))
        .map(|y| uf.find(f.id(f.width - 1, y) as u32))
        .collect();
    let y0 = (0..f.height).find(|&y| f.site_open(0, y) && right.contains(&uf.find(f.id(0, y) as u32)))?;
    let mut pos = (0usize, y0);
    let mut dir = 0usize;
    let mut walk = vec![pos];
    let cap = 8 * f.n_sites() + 8;
    while pos.0 != f.width - 1 {
        if walk.len() > cap {
            return None;
        }
        let mut moved = false;
        for turn in [3usize, 0, 1, 2] {
            let nd = (dir + turn) % 4;
            if f.open(pos.0, pos.1, nd) {
                let (dx, dy) = DIRS[nd];
                pos = ((pos.0 as i64 + dx) as usize, (pos.1 as i64 + dy) as usize);
                dir = nd;
                moved = true;
                break;
            }
        }
        if !moved {
            // isolated start site; only possible when width is 1
            return None;
        }
        walk.push(pos);
    }
    let path = loop_erase(&walk);
    let pts = path.iter().map(|&(x, y)| f.point(x, y)).collect();
    PolyCurve::new(2, pts, f.delta).ok()
}

/// Local site box of a disk, clipped to the field.
fn site_box(f: &LatticeField, c: Point, r: f64) -> (usize, usize, usize, usize) {
    let lo = |v: f64, m: usize| (((v - r) / f.delta).floor().max(0.0) as usize).min(m - 1);
    let hi = |v: f64, m: usize| (((v + r) / f.delta).ceil().max(0.0) as usize).min(m - 1);
    (lo(c.x(), f.width), hi(c.x(), f.width), lo(c.y(), f.height), hi(c.y(), f.height))
}

/// Clusters of the shell-restricted open graph joining the inner boundary
/// sites (`rho < r + delta`) to the outer ones (`rho > R - delta`).
pub fn crossing_clusters(f: &LatticeField, s: &Shell) -> usize {
    let (x0, x1, y0, y1) = site_box(f, s.center, s.outer);
    let w = x1 - x0 + 1;
    let h = y1 - y0 + 1;
    let local = |x: usize, y: usize| (y - y0) * w + (x - x0);
    let rho = |x: usize, y: usize| f.point(x, y).dist(s.center);
    let inside: Vec<bool> = (0..w * h)
        .map(|i| {
            let (x, y) = (x0 + i % w, y0 + i / w);
            let r = rho(x, y);
            r >= s.inner && r <= s.outer && f.site_open(x, y)
        })
        .collect();
    let mut uf = UnionFind::<u32>::new(w * h);
    for y in y0..=y1 {
        for x in x0..=x1 {
            if !inside[local(x, y)] {
                continue;
            }
            if x < x1 && inside[local(x + 1, y)] && f.open(x, y, 0) {
                uf.union(local(x, y) as u32, local(x + 1, y) as u32);
            }
            if y < y1 && inside[local(x, y + 1)] && f.open(x, y, 1) {
                uf.union(local(x, y) as u32, local(x, y + 1) as u32);
            }
        }
    }
    let mut inner_roots = HashSet::new();
    let mut outer_roots = HashSet::new();
    for y in y0..=y1 {
        for x in x0..=x1 {
            let i = local(x, y);
            if !inside[i] {
                continue;
            }
            let r = rho(x, y);
            if r < s.inner + f.delta {
                inner_roots.insert(uf.find(i as u32));
            }
            if r > s.outer - f.delta {
                outer_roots.insert(uf.find(i as u32));
            }
        }
    }
    inner_roots.intersection(&outer_roots).count()
}

/// At least `k` distinct shell-restricted clusters cross the shell.
pub fn cluster_kcrossing_event(f: &LatticeField, s: &Shell, k: usize) -> bool {
    crossing_clusters(f, s) >= k
}

/// Some cylinder-restricted cluster joins the layer of sites within
/// `delta` of face `a` to the layer within `delta` of face `b`.
pub fn cluster_cylinder_event(f: &LatticeField, cyl: &Cylinder) -> bool {
    let mid = cyl.midpoint();
    let (x0, x1, y0, y1) = site_box(f, mid, 0.5 * cyl.diameter());
    let w = x1 - x0 + 1;
    let h = y1 - y0 + 1;
    let local = |x: usize, y: usize| (y - y0) * w + (x - x0);
    let e = cyl.axis();
    let len = cyl.length();
    let inside: Vec<bool> =
        (0..w * h).map(|i| f.site_open(x0 + i % w, y0 + i / w) && cyl.contains(f.point(x0 + i % w, y0 + i / w), 0.0)).collect();
    let mut uf = UnionFind::<u32>::new(w * h);
    for y in y0..=y1 {
        for x in x0..=x1 {
            if !inside[local(x, y)] {
                continue;
            }
            if x < x1 && inside[local(x + 1, y)] && f.open(x, y, 0) {
                uf.union(local(x, y) as u32, local(x + 1, y) as u32);
            }
            if y < y1 && inside[local(x, y + 1)] && f.open(x, y, 1) {
                uf.union(local(x, y) as u32, local(x, y + 1) as u32);
            }
        }
    }
    let mut a_roots = HashSet::new();
    let mut b_roots = HashSet::new();
    for y in y0..=y1 {
        for x in x0..=x1 {
            let i = local(x, y);
            if !inside[i] {
                continue;
            }
            let u = (f.point(x, y) - cyl.a).dot(e);
            if u < f.delta {
                a_roots.insert(uf.find(i as u32));
            }
            if u > len - f.delta {
                b_roots.insert(uf.find(i as u32));
            }
        }
    }
    a_roots.intersection(&b_roots).next().is_some()
}

fn rle(bits: &[bool]) -> String {
    let mut out = String::new();
    let mut cur = false;
    let mut run = 0usize;
    for &b in bits {
        if b == cur {
            run += 1;
        } else {
            write!(out, "{run} ").unwrap();
            cur = b;
            run = 1;
        }
    }
    write!(out, "{run}").unwrap();
    out
}

fn unrle(s: &str, len: usize, line: usize) -> Result<Vec<bool>> {
    let mut out = Vec::with_capacity(len);
    let mut cur = false;
    for tok in s.split_whitespace() {
        let run: usize = tok.parse().map_err(|_| Error::Parse { line, msg: format!("bad run {tok:?}") })?;
        out.extend(std::iter::repeat_n(cur, run));
        cur = !cur;
    }
    if out.len() != len {
        return Err(Error::Parse { line, msg: format!("expected {len} bits, got {}", out.len()) });
    }
    Ok(out)
}

/// `field v1 n=.. p=.. seed=.. w=.. h=.. model=..` then run-length lines.
pub fn write_field(f: &LatticeField) -> String {
    let model = match f.model {
        Model::Bond => "bond",
        Model::Site => "site",
    };
    let mut out = format!(
        "field v1 n={} p={:.16e} seed={} w={} h={} model={}\n",
        f.n, f.p, f.seed, f.width, f.height, model
    );
    match f.model {
        Model::Bond => {
            writeln!(out, "h {}", rle(&f.horiz)).unwrap();
            writeln!(out, "v {}", rle(&f.vert)).unwrap();
        }
        Model::Site => writeln!(out, "s {}", rle(&f.sites)).unwrap(),
    }
    out
}

pub fn parse_field(text: &str) -> Result<LatticeField> {
    let mut lines = text.lines();
    let head = lines.next().ok_or(Error::Parse { line: 1, msg: "empty".into() })?;
    let toks: Vec<&str> = head.split_whitespace().collect();
    if toks.len() != 8 || toks[0] != "field" || toks[1] != "v1" {
        return Err(Error::Parse { line: 1, msg: "bad field header".into() });
    }
    let kv: HashMap<&str, &str> = toks[2..].iter().filter_map(|t| t.split_once('=')).collect();
    let get = |k: &str| kv.get(k).copied().ok_or(Error::Parse { line: 1, msg: format!("missing {k}") });
    let perr = |k: &str| Error::Parse { line: 1, msg: format!("bad {k}") };
    let n: usize = get("n")?.parse().map_err(|_| perr("n"))?;
    let p: f64 = get("p")?.parse().map_err(|_| perr("p"))?;
    let seed: u64 = get("seed")?.parse().map_err(|_| perr("seed"))?;
    let width: usize = get("w")?.parse().map_err(|_| perr("w"))?;
    let height: usize = get("h")?.parse().map_err(|_| perr("h"))?;
    let model = match get("model")? {
        "bond" => Model::Bond,
        "site" => Model::Site,
        _ => return Err(perr("model")),
    };
    check_dims(width, height, p)?;
    let mut f = LatticeField::empty(n, width, height, p, seed, model);
    for (i, l) in lines.enumerate() {
        let ln = i + 2;
        let Some((tag, rest)) = l.split_once(' ') else { continue };
        match tag {
            "h" => f.horiz = unrle(rest, (width - 1) * height, ln)?,
            "v" => f.vert = unrle(rest, width * (height - 1), ln)?,
            "s" => f.sites = unrle(rest, width * height, ln)?,
            _ => return Err(Error::Parse { line: ln, msg: format!("unknown tag {tag:?}") }),
        }
    }
    let complete = match model {
        Model::Bond => f.horiz.len() == (width - 1) * height && f.vert.len() == width * (height - 1),
        Model::Site => f.sites.len() == width * height,
    };
    if !complete {
        return Err(Error::Parse { line: 1, msg: "missing bit arrays".into() });
    }
    Ok(f)
}
