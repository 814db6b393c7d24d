use std::collections::HashMap;

use super::runs::{detect_straight_runs, RunRecord, RunScan, ScaleLadder};
use crate::curve::CurveConfig;

#[derive(Clone, Debug, PartialEq)]
pub struct SparsityVerdict {
    pub sparse: bool,
    /// Longest violating chain, coarse to fine.
    pub witness: Option<Vec<RunRecord>>,
    pub n_runs: usize,
    pub skipped_scales: usize,
}

pub fn sparsity_check(f: &CurveConfig, ladder: &ScaleLadder) -> SparsityVerdict {
    let scan = detect_straight_runs(f, ladder);
    verdict_from_runs(scan, ladder, f.dim)
}

/// Longest nested chains over strictly increasing scale indices, per curve.
/// A chain `k_1 < .. < k_n` violates sparsity when `n >= max(k_n, k0) / 2`.
pub(crate) fn verdict_from_runs(scan: RunScan, ladder: &ScaleLadder, dim: usize) -> SparsityVerdict {
    let RunScan { mut runs, skipped_scales } = scan;
    runs.sort_by(|a, b| {
        (a.curve_index, a.scale_index)
            .cmp(&(b.curve_index, b.scale_index))
            .then(a.arc_range.0.partial_cmp(&b.arc_range.0).unwrap())
    });
    let n = runs.len();
    let mut best = vec![1usize; n];
    let mut parent: Vec<Option<usize>> = vec![None; n];
    // bucket coarser runs by (curve, scale) on a grid of their own length
    let mut buckets: HashMap<(usize, usize), (f64, HashMap<[i64; 3], Vec<usize>>)> = HashMap::new();
    let key = |p: crate::geom::Point, cell: f64| {
        [(p.0[0] / cell).floor() as i64, (p.0[1] / cell).floor() as i64, (p.0[2] / cell).floor() as i64]
    };
    for j in 0..n {
        let rj = &runs[j];
        for ks in 0..rj.scale_index {
            let Some((cell, grid)) = buckets.get(&(rj.curve_index, ks)) else { continue };
            let kc = key(rj.cylinder.midpoint(), *cell);
            for di in -1..=1 {
                for dj in -1..=1 {
                    for dk in -1..=1 {
                        let Some(ids) = grid.get(&[kc[0] + di, kc[1] + dj, kc[2] + dk]) else { continue };
                        for &i in ids {
                            if best[i] + 1 > best[j] && runs[i].cylinder.contains_cylinder(&rj.cylinder, dim) {
                                best[j] = best[i] + 1;
                                parent[j] = Some(i);
                            }
                        }
                    }
                }
            }
        }
        let cell = runs[j].cylinder.diameter();
        let e = buckets.entry((rj.curve_index, rj.scale_index)).or_insert_with(|| (cell, HashMap::new()));
        let kj = key(runs[j].cylinder.midpoint(), e.0);
        e.1.entry(kj).or_default().push(j);
    }
    let mut worst: Option<usize> = None;
    for j in 0..n {
        let need = 0.5 * runs[j].scale_index.max(ladder.k0) as f64;
        if best[j] as f64 >= need && worst.is_none_or(|w| best[j] > best[w]) {
            worst = Some(j);
        }
    }
    let witness = worst.map(|mut j| {
        let mut chain = vec![runs[j].clone()];
        while let Some(p) = parent[j] {
            chain.push(runs[p].clone());
            j = p;
        }
        chain.reverse();
        chain
    });
    SparsityVerdict { sparse: witness.is_none(), witness, n_runs: n, skipped_scales }
}
