mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use curvatlas::capacity::capacity_qp;
use curvatlas::crossings::{shell_traversals, Shell};
use curvatlas::curve::io::{parse_curveset, write_curveset};
use curvatlas::curve::{box_count, packing_count, partition_count, partition_count_vertex_cuts};
use curvatlas::experiment::{ExperimentConfig, Table};
use curvatlas::generators::{crossing_clusters, extract_crossing_path, gen_bond_percolation, lr_crossing_exists, Direction, LatticeField};
use curvatlas::metric::curve_distance;
use curvatlas::{CurveConfig, Point, PolyCurve};

fn polyline(max_vertices: usize, side: f64) -> impl Strategy<Value = PolyCurve> {
    prop::collection::vec((0.0..side, 0.0..side), 2..=max_vertices)
        .prop_map(|pts| PolyCurve::from_xy(&pts, 0.0).unwrap())
}

fn points(n: std::ops::Range<usize>, side: f64) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec((0.0..side, 0.0..side), n).prop_map(|v| v.into_iter().map(|(x, y)| Point::new2(x, y)).collect())
}

/// Components of the open annulus graph meeting both rims, by depth-first
/// search over the whole field.
fn dfs_crossings(f: &LatticeField, s: &Shell) -> usize {
    let rho = |x: usize, y: usize| f.point(x, y).dist(s.center);
    let inside = |x: usize, y: usize| {
        let r = rho(x, y);
        r >= s.inner && r <= s.outer && f.site_open(x, y)
    };
    let steps: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let mut seen = vec![false; f.n_sites()];
    let mut count = 0;
    for y in 0..f.height {
        for x in 0..f.width {
            if seen[f.id(x, y)] || !inside(x, y) {
                continue;
            }
            let (mut hits_in, mut hits_out) = (false, false);
            let mut stack = vec![(x, y)];
            seen[f.id(x, y)] = true;
            while let Some((cx, cy)) = stack.pop() {
                let r = rho(cx, cy);
                hits_in |= r < s.inner + f.delta;
                hits_out |= r > s.outer - f.delta;
                for (d, (dx, dy)) in steps.iter().enumerate() {
                    if !f.open(cx, cy, d) {
                        continue;
                    }
                    let (nx, ny) = ((cx as i64 + dx) as usize, (cy as i64 + dy) as usize);
                    if inside(nx, ny) && !seen[f.id(nx, ny)] {
                        seen[f.id(nx, ny)] = true;
                        stack.push((nx, ny));
                    }
                }
            }
            if hits_in && hits_out {
                count += 1;
            }
        }
    }
    count
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn counts_are_monotone_and_related(c in polyline(10, 1.0), ell in 0.02f64..0.9, grow in 1.0f64..3.0) {
        let m = partition_count(&c, ell).unwrap();
        let p = packing_count(&c, ell).unwrap();
        prop_assert!(partition_count(&c, ell * grow).unwrap() <= m);
        prop_assert!(packing_count(&c, ell * grow).unwrap() <= p);
        prop_assert!(partition_count(&c, 3.0 * ell).unwrap() <= p);
        prop_assert!(p <= partition_count(&c, ell * (1.0 - 1e-9)).unwrap());
        if let Some(v) = partition_count_vertex_cuts(&c, ell).unwrap() {
            prop_assert!(v >= m);
        }
        prop_assert!(m >= 1 && p >= 1);
    }

    #[test]
    fn partition_matches_bisection(c in polyline(8, 1.0), ell in 0.05f64..0.8) {
        prop_assert_eq!(partition_count(&c, ell).unwrap(), common::partition_by_bisection(&c, ell));
    }

    #[test]
    fn capacity_monotone_in_ell_and_s(pts in points(2..10, 0.7), s in 0.3f64..1.8, ell in 0.01f64..0.4, ds in 0.01f64..0.5, dl in 0.01f64..0.3) {
        let tol = 1e-10;
        let base = capacity_qp(&pts, s, ell, tol).unwrap().capacity;
        let wider = capacity_qp(&pts, s, ell + dl, tol).unwrap().capacity;
        let steeper = capacity_qp(&pts, s + ds, ell, tol).unwrap().capacity;
        prop_assert!(wider >= base * (1.0 - 1e-6), "ell: {wider} < {base}");
        prop_assert!(steeper <= base * (1.0 + 1e-6), "s: {steeper} > {base}");
        // the kernel lies between max(diam, ell)^-s and ell^-s, the diagonal forces E >= ell^-s / n
        let ls = ell.powf(s);
        prop_assert!(base >= ls * (1.0 - 1e-9) && base <= pts.len() as f64 * ls * (1.0 + 1e-9), "{base} vs l^s {ls}");
    }

    #[test]
    fn boxes_bound_vertex_capacity(c in polyline(10, 1.0), s in 0.3f64..1.8, ell in 0.02f64..0.5) {
        let cap = capacity_qp(c.vertices(), s, ell, 1e-10).unwrap().capacity;
        let n = box_count(&c, ell).unwrap() as f64;
        prop_assert!(n >= cap * ell.powf(-s) * (1.0 - 1e-6), "N = {n}, cap l^-s = {}", cap * ell.powf(-s));
    }

    #[test]
    fn frechet_symmetric_and_triangle(a in polyline(6, 1.0), b in polyline(6, 1.0), c in polyline(6, 1.0)) {
        let tol = 1e-10;
        let ab = curve_distance(&a, &b, tol).unwrap();
        prop_assert_eq!(ab, curve_distance(&b, &a, tol).unwrap());
        let ac = curve_distance(&a, &c, tol).unwrap();
        let bc = curve_distance(&b, &c, tol).unwrap();
        prop_assert!(ac <= ab + bc + 3.0 * tol);
        prop_assert!(curve_distance(&a, &a, tol).unwrap() <= 1e-9);
        prop_assert!(ab >= a.start().dist(b.start()).min(a.start().dist(b.end())) - 1e-9);
    }

    #[test]
    fn traversals_invariant_under_reversal_and_motion(c in polyline(12, 1.0), r in 0.05f64..0.3, w in 0.05f64..0.4, th in 0.0f64..std::f64::consts::TAU, dx in -1.0f64..1.0, dy in -1.0f64..1.0) {
        let shell = Shell::new(Point::new2(0.5, 0.5), r, r + w).unwrap();
        let f = CurveConfig::around(vec![c.clone()], 1e-3).unwrap();
        let n = shell_traversals(&f, &shell);
        let rev = CurveConfig::around(vec![c.reversed()], 1e-3).unwrap();
        prop_assert_eq!(shell_traversals(&rev, &shell), n);
        let (cs, sn) = (th.cos(), th.sin());
        let mv = |p: Point| Point::new2(cs * p.x() - sn * p.y() + dx, sn * p.x() + cs * p.y() + dy);
        let moved = CurveConfig::around(vec![c.map(mv).unwrap()], 1e-3).unwrap();
        let moved_shell = Shell::new(mv(shell.center), r, r + w).unwrap();
        prop_assert_eq!(shell_traversals(&moved, &moved_shell), n);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn cluster_crossings_match_dfs(n in 4usize..20, seed in any::<u64>(), p in 0.3f64..0.8, cx in 0.2f64..0.8, cy in 0.2f64..0.8, r in 0.05f64..0.25, w in 0.1f64..0.4) {
        let f = gen_bond_percolation(n, p, seed).unwrap();
        let s = Shell::new(Point::new2(cx, cy), r, r + w).unwrap();
        prop_assert_eq!(crossing_clusters(&f, &s), dfs_crossings(&f, &s));
    }

    #[test]
    fn lowest_crossing_is_an_open_path(n in 2usize..16, seed in any::<u64>(), p in 0.3f64..0.8) {
        let f = gen_bond_percolation(n, p, seed).unwrap();
        let path = extract_crossing_path(&f, Direction::LeftRight);
        prop_assert_eq!(path.is_some(), lr_crossing_exists(&f));
        if let Some(c) = path {
            let sites: Vec<(usize, usize)> = c
                .vertices()
                .iter()
                .map(|v| ((v.x() * n as f64).round() as usize, (v.y() * n as f64).round() as usize))
                .collect();
            prop_assert_eq!(sites[0].0, 0);
            prop_assert_eq!(sites[sites.len() - 1].0, n);
            prop_assert!(sites[..sites.len() - 1].iter().all(|s| s.0 < n));
            let mut seen = std::collections::HashSet::new();
            prop_assert!(sites.iter().all(|s| seen.insert(*s)), "path revisits a site");
            for w in sites.windows(2) {
                let (a, b) = (w[0], w[1]);
                let d = match (b.0 as i64 - a.0 as i64, b.1 as i64 - a.1 as i64) {
                    (1, 0) => 0,
                    (0, 1) => 1,
                    (-1, 0) => 2,
                    (0, -1) => 3,
                    step => return Err(TestCaseError::fail(format!("non-unit step {step:?}"))),
                };
                prop_assert!(f.open(a.0, a.1, d));
            }
            // no crossing starts lower on the left column
            let start = sites[0];
            for y in 0..start.1 {
                prop_assert!(!reaches_right(&f, y), "row {y} below {}", start.1);
            }
        }
    }

    #[test]
    fn csv_round_trip(rows in prop::collection::vec(prop::collection::vec(-1e6f64..1e6, 3), 0..20)) {
        let mut t = Table::new(&["a", "b", "c"]);
        for r in rows {
            t.push(r);
        }
        prop_assert_eq!(Table::parse_csv(&t.to_csv()).unwrap(), t);
    }

    #[test]
    fn curveset_round_trip(curves in prop::collection::vec(polyline(8, 1.0), 0..4)) {
        let cfg = CurveConfig::new(2, curves, 1.5, curvatlas::Bbox::unit(2)).unwrap();
        let back = parse_curveset(&write_curveset(&cfg)).unwrap();
        prop_assert_eq!(back.curves.len(), cfg.curves.len());
        for (a, b) in back.curves.iter().zip(&cfg.curves) {
            prop_assert_eq!(a.vertices(), b.vertices());
        }
        prop_assert_eq!(back.cutoff, cfg.cutoff);
        prop_assert_eq!(back.region, cfg.region);
    }

    #[test]
    fn config_round_trip(
        kind in 0usize..6,
        trials in 1usize..500,
        seed in any::<u64>(),
        ratios in prop::collection::vec(0.01f64..0.99, 0..5),
        n in 2usize..300,
        radius in 0.05f64..0.5,
        k_max in 1usize..6,
    ) {
        let names = ["lambda_scan", "rho_scan", "sparsity", "dimension", "capacity", "distance"];
        let list = ratios.iter().map(|r| r.to_string()).collect::<Vec<_>>().join(", ");
        let mut text = format!("experiment = {}\ntrials = {trials}\nseed = {seed}\n", names[kind]);
        if !ratios.is_empty() {
            text += &format!("ratios = {list}\n");
        }
        text += &format!("[generator]\nkind = lerw\nn = {n}\nradius = {radius}\n[params]\nk_max = {k_max}\n");
        let cfg = ExperimentConfig::parse(&text).unwrap();
        prop_assert_eq!(&cfg.ratios, &ratios);
        prop_assert_eq!(cfg.param("k_max", 0usize).unwrap(), k_max);
        prop_assert_eq!(&ExperimentConfig::parse(&cfg.to_text()).unwrap(), &cfg);
        let params: BTreeMap<String, String> = cfg.generator.kind.params();
        prop_assert_eq!(curvatlas::generators::GeneratorKind::from_params("lerw", &params).unwrap(), cfg.generator.kind);
    }
}

/// Whether the left-column site at row `y` reaches the right column.
fn reaches_right(f: &LatticeField, y: usize) -> bool {
    let steps: [(i64, i64); 4] = [(1, 0), (0, 1), (-1, 0), (0, -1)];
    let mut seen = vec![false; f.n_sites()];
    let mut stack = vec![(0usize, y)];
    seen[f.id(0, y)] = true;
    while let Some((x, yy)) = stack.pop() {
        if x == f.width - 1 {
            return true;
        }
        for (d, (dx, dy)) in steps.iter().enumerate() {
            if f.open(x, yy, d) {
                let (nx, ny) = ((x as i64 + dx) as usize, (yy as i64 + dy) as usize);
                if !seen[f.id(nx, ny)] {
                    seen[f.id(nx, ny)] = true;
                    stack.push((nx, ny));
                }
            }
        }
    }
    false
}
