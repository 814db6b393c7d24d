use std::collections::VecDeque;

use petgraph::unionfind::UnionFind;
use rand::Rng;

use crate::curve::PolyCurve;
use crate::error::{bad_param, Result};
use crate::geom::Point;

/// Bonds of the `n x n` site box, horizontal ones first (`y (n-1) + x`),
/// then vertical ones (`y n + x`). Sites are numbered `y n + x`.
fn bonds(n: usize) -> Vec<(usize, usize)> {
    let mut out = Vec::with_capacity(2 * n * (n - 1));
    for y in 0..n {
        for x in 0..n - 1 {
            out.push((y * n + x, y * n + x + 1));
        }
    }
    for y in 0..n - 1 {
        for x in 0..n {
            out.push((y * n + x, (y + 1) * n + x));
        }
    }
    out
}

/// Kruskal on the box with the given bond weights; ties break by bond index.
pub fn mst_from_weights(n: usize, weights: &[f64]) -> Result<Vec<(usize, usize)>> {
    if n < 2 {
        return bad_param("mst needs n >= 2");
    }
    let all = bonds(n);
    if weights.len() != all.len() || weights.iter().any(|w| !w.is_finite()) {
        return bad_param(format!("expected {} finite bond weights, got {}", all.len(), weights.len()));
    }
    let mut order: Vec<usize> = (0..all.len()).collect();
    order.sort_by(|&i, &j| weights[i].total_cmp(&weights[j]).then(i.cmp(&j)));
    let mut uf = UnionFind::<u32>::new(n * n);
    let mut tree = Vec::with_capacity(n * n - 1);
    for i in order {
        let (a, b) = all[i];
        if uf.union(a as u32, b as u32) {
            tree.push((a, b));
        }
    }
    Ok(tree)
}

/// Minimal spanning tree for i.i.d. uniform call numbers drawn from `seed`.
pub fn mst_edges(n: usize, seed: u64) -> Result<Vec<(usize, usize)>> {
    if n < 2 {
        return bad_param("mst needs n >= 2");
    }
    let mut rng = crate::seed::rng(seed);
    let w: Vec<f64> = (0..2 * n * (n - 1)).map(|_| rng.gen::<f64>()).collect();
    mst_from_weights(n, &w)
}

fn site_of(n: usize, p: Point) -> Result<usize> {
    let (fx, fy) = (p.x() * n as f64, p.y() * n as f64);
    let (x, y) = (fx.round(), fy.round());
    if (fx - x).abs() > 1e-9 || (fy - y).abs() > 1e-9 || x < 0.0 || y < 0.0 || x >= n as f64 || y >= n as f64 {
        return bad_param(format!("({}, {}) is not a site of the box", p.x(), p.y()));
    }
    Ok(y as usize * n + x as usize)
}

pub(crate) fn tree_path(n: usize, tree: &[(usize, usize)], a: usize, b: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); n * n];
    for &(u, v) in tree {
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut parent = vec![usize::MAX; n * n];
    parent[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        if u == b {
            break;
        }
        for &v in &adj[u] {
            if parent[v] == usize::MAX {
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    let mut path = vec![b];
    let mut u = b;
    while u != a {
        u = parent[u];
        path.push(u);
    }
    path.reverse();
    path
}

/// Tree path between the sites `a` and `b` of the `n x n` box at spacing `1/n`.
pub fn gen_mst_path(n: usize, seed: u64, a: Point, b: Point) -> Result<PolyCurve> {
    let tree = mst_edges(n, seed)?;
    let (ia, ib) = (site_of(n, a)?, site_of(n, b)?);
    let delta = 1.0 / n as f64;
    let pts = tree_path(n, &tree, ia, ib)
        .into_iter()
        .map(|i| Point::new2((i % n) as f64 * delta, (i / n) as f64 * delta))
        .collect();
    PolyCurve::new(2, pts, delta)
}
