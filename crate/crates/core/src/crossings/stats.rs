use std::collections::HashSet;

use crate::curve::{box_cells, CurveConfig};
use crate::error::{bad_param, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigStatistics {
    pub r_scales: Vec<f64>,
    pub l_scales: Vec<f64>,
    /// `table[n][m]`: cells of diameter `l_m` meeting a curve of diameter at
    /// least `r_n`; `None` where `l_m > r_n`.
    pub table: Vec<Vec<Option<usize>>>,
    /// Weighted normalized sum, when normalizers were supplied.
    pub u: Option<f64>,
}

/// `normalizers[n][m]` are the expected counts used to normalize `U`;
/// cells with a zero normalizer are left out of the sum.
pub fn config_statistics(
    f: &CurveConfig,
    r_scales: &[f64],
    l_scales: &[f64],
    normalizers: Option<&[Vec<f64>]>,
) -> Result<ConfigStatistics> {
    if r_scales.iter().chain(l_scales).any(|&s| !(s > 0.0)) {
        return bad_param("scales must be positive");
    }
    let diams: Vec<f64> = f.curves.iter().map(|c| c.diameter()).collect();
    let mut table = vec![vec![None; l_scales.len()]; r_scales.len()];
    for (m, &l) in l_scales.iter().enumerate() {
        let cells: Vec<HashSet<[i64; 3]>> = f.curves.iter().map(|c| box_cells(c, l)).collect::<Result<_>>()?;
        for (n, &r) in r_scales.iter().enumerate() {
            if l > r * (1.0 + 1e-12) {
                continue;
            }
            let mut union: HashSet<[i64; 3]> = HashSet::new();
            for (ci, set) in cells.iter().enumerate() {
                if diams[ci] >= r {
                    union.extend(set.iter().copied());
                }
            }
            table[n][m] = Some(union.len());
        }
    }
    let u = normalizers.map(|norm| {
        let mut u = 0.0;
        for (n, row) in table.iter().enumerate() {
            for (m, v) in row.iter().enumerate() {
                let Some(v) = v else { continue };
                let e = norm.get(n).and_then(|r| r.get(m)).copied().unwrap_or(0.0);
                if e > 0.0 {
                    u += (*v as f64) / e / (((n + 1) * (n + 1) * (m + 1) * (m + 1)) as f64);
                }
            }
        }
        u
    });
    Ok(ConfigStatistics { r_scales: r_scales.to_vec(), l_scales: l_scales.to_vec(), table, u })
}
