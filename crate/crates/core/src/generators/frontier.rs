use std::collections::{HashSet, VecDeque};

use rand::Rng;

use crate::curve::PolyCurve;
use crate::error::{bad_param, Result};
use crate::geom::Point;

const MAX_DOUBLINGS: u32 = 3;

/// Cell `(i, j)` of the grid is the square `[i, i+1] x [j, j+1]` times `delta`.
/// Exterior: 8-connected flood from the border of the box `[lo, hi)^2`
/// through non-trail cells. The returned closed curve runs along the
/// boundary of the non-exterior region, keeping it on the left.
pub fn trace_frontier(trail: &HashSet<(i64, i64)>, lo: (i64, i64), hi: (i64, i64), delta: f64) -> Result<PolyCurve> {
    if trail.is_empty() {
        return bad_param("empty trail");
    }
    let (w, h) = ((hi.0 - lo.0) as usize, (hi.1 - lo.1) as usize);
    let idx = |c: (i64, i64)| (c.1 - lo.1) as usize * w + (c.0 - lo.0) as usize;
    let inside = |c: (i64, i64)| c.0 >= lo.0 && c.0 < hi.0 && c.1 >= lo.1 && c.1 < hi.1;
    if trail.iter().any(|&c| !inside(c) || c.0 == lo.0 || c.1 == lo.1 || c.0 == hi.0 - 1 || c.1 == hi.1 - 1) {
        return bad_param("trail touches the box border");
    }
    let mut exterior = vec![false; w * h];
    let mut queue = VecDeque::new();
    for i in lo.0..hi.0 {
        for j in lo.1..hi.1 {
            if i == lo.0 || j == lo.1 || i == hi.0 - 1 || j == hi.1 - 1 {
                exterior[idx((i, j))] = true;
                queue.push_back((i, j));
            }
        }
    }
    while let Some((i, j)) = queue.pop_front() {
        for di in -1..=1 {
            for dj in -1..=1 {
                let c = (i + di, j + dj);
                if inside(c) && !exterior[idx(c)] && !trail.contains(&c) {
                    exterior[idx(c)] = true;
                    queue.push_back(c);
                }
            }
        }
    }
    let region = |c: (i64, i64)| inside(c) && !exterior[idx(c)];
    let start = *trail.iter().min_by_key(|c| (c.1, c.0)).unwrap();
    // directions E, N, W, S; moving along an edge from vertex v in direction
    // d, the region cell is on the left
    const D: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let ahead = |v: (i64, i64), d: usize| -> ((i64, i64), (i64, i64)) {
        // cells ahead-left and ahead-right of vertex v when heading d
        match d {
            0 => ((v.0, v.1), (v.0, v.1 - 1)),
            1 => ((v.0 - 1, v.1), (v.0, v.1)),
            2 => ((v.0 - 1, v.1 - 1), (v.0 - 1, v.1)),
            _ => ((v.0, v.1 - 1), (v.0 - 1, v.1 - 1)),
        }
    };
    let v0 = start;
    let mut v = (v0.0 + 1, v0.1);
    let mut d = 0usize;
    let mut verts = vec![v0, v];
    let cap = 4 * w * h + 4;
    while !(v == v0 && d == 0) {
        if verts.len() > cap {
            return bad_param("frontier trace did not close");
        }
        let (al, ar) = ahead(v, d);
        d = if !region(al) {
            (d + 1) % 4
        } else if !region(ar) {
            d
        } else {
            (d + 3) % 4
        };
        if v == v0 && d == 0 {
            break;
        }
        v = (v.0 + D[d].0, v.1 + D[d].1);
        verts.push(v);
    }
    let pts = verts.iter().map(|&(i, j)| Point::new2(i as f64 * delta, j as f64 * delta)).collect();
    PolyCurve::new(2, pts, delta)
}

fn walk_trail(steps: usize, c0: (i64, i64), seed: u64) -> HashSet<(i64, i64)> {
    let mut rng = crate::seed::rng(seed);
    let mut pos = c0;
    let mut trail = HashSet::from([pos]);
    for _ in 0..steps {
        let (dx, dy) = [(1, 0), (0, 1), (-1, 0), (0, -1)][rng.gen_range(0..4)];
        pos = (pos.0 + dx, pos.1 + dy);
        trail.insert(pos);
    }
    trail
}

/// Frontier of a `steps`-step simple random walk trail on the `delta = 1/n`
/// grid, started in the centre cell of the `n x n` box over `[0, 1]^2`.
pub fn gen_rw_frontier(steps: usize, n: usize, seed: u64) -> Result<PolyCurve> {
    if steps < 1 || n < 2 {
        return bad_param("frontier needs steps >= 1 and n >= 2");
    }
    let c0 = (n as i64 / 2, n as i64 / 2);
    let trail = walk_trail(steps, c0, seed);
    let delta = 1.0 / n as f64;
    for k in 0..=MAX_DOUBLINGS {
        let side = (n as i64) << k;
        let lo = (c0.0 - side / 2, c0.1 - side / 2);
        let hi = (lo.0 + side, lo.1 + side);
        let clear = trail.iter().all(|&c| c.0 > lo.0 && c.1 > lo.1 && c.0 < hi.0 - 1 && c.1 < hi.1 - 1);
        if clear {
            return trace_frontier(&trail, lo, hi, delta);
        }
    }
    bad_param(format!("trail leaves the box after {MAX_DOUBLINGS} doublings"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_step_walk_is_a_domino() {
        let c = gen_rw_frontier(1, 16, 3).unwrap();
        assert!(c.is_closed());
        assert!((c.length() - 6.0 / 16.0).abs() < 1e-12);
    }

    #[test]
    fn pinch_and_hole() {
        // ring around (2, 2) open only at the corner cell (1, 1)
        let ring: HashSet<(i64, i64)> =
            [(2, 1), (3, 1), (3, 2), (3, 3), (2, 3), (1, 3), (1, 2)].into_iter().collect();
        let c = trace_frontier(&ring, (-2, -2), (7, 7), 1.0).unwrap();
        assert!(c.is_closed());
        assert_eq!(c.n_legs(), 16);
        let mut closed = ring.clone();
        closed.insert((1, 1));
        let c = trace_frontier(&closed, (-2, -2), (7, 7), 1.0).unwrap();
        assert_eq!(c.n_legs(), 12);
    }

    #[test]
    fn legs_separate_trail_from_exterior() {
        for seed in 0..10 {
            let c = gen_rw_frontier(400, 32, seed).unwrap();
            assert!(c.is_closed());
            let trail = walk_trail(400, (16, 16), seed);
            let d = 1.0 / 32.0;
            let cell = |p: Point| ((p.x() / d).floor() as i64, (p.y() / d).floor() as i64);
            let mut edges = HashSet::new();
            for i in 0..c.n_legs() {
                let (a, b) = c.leg(i);
                let m = a.lerp(b, 0.5);
                let e = (b - a) * (1.0 / d);
                let left = m + Point::new2(-e.y(), e.x()) * (0.5 * d);
                let right = m + Point::new2(e.y(), -e.x()) * (0.5 * d);
                assert!(trail.contains(&cell(left)));
                assert!(!trail.contains(&cell(right)));
                assert!(edges.insert((cell(left), cell(right))), "edge traced twice");
            }
        }
    }
}
