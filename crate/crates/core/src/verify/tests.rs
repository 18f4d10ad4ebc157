use alloc::vec;
use alloc::vec::Vec;

use super::*;
use crate::generators::{self, DEFAULT_VERTEX_BUDGET as B};
use crate::potential::green_table;

fn setup(dom: &crate::DomainView) -> (GreenTable, DomainGeometry) {
    (
        green_table(dom, 1e-12).unwrap(),
        DomainGeometry::new(dom).unwrap(),
    )
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs())
}

#[test]
fn params_validate() {
    let dom = generators::gen_cube_grid(2, 8, B).unwrap();
    let (_, geom) = setup(&dom);
    let p = AssumptionParams::new(&geom);
    assert_eq!(p.m, 3.0);
    assert!((p.r0 - 0.25).abs() < 1e-12);
    assert!((p.epsilon - p.r0 / 36.0).abs() < 1e-15);
    p.validate().unwrap();
    let mut bad = p.clone();
    bad.m = 2.0;
    assert!(bad.validate().is_err());
    let mut bad = p.clone();
    bad.epsilon = bad.r0;
    assert!(bad.validate().is_err());
}

#[test]
fn property_names_round_trip() {
    for name in Property::NAMES {
        let p = Property::parse(name).unwrap();
        if *name != "harnack" {
            assert_eq!(alloc::format!("{p}"), *name);
        }
    }
    assert_eq!(Property::parse("harnack_k4"), Some(Property::Harnack(4)));
    assert_eq!(Property::parse("nope"), None);
}

/// Closed-form Green function of the 5-path, interior 1..=3.
fn path_g(i: usize, j: usize) -> f64 {
    let (a, b) = (i.min(j) as f64, i.max(j) as f64);
    a * (4.0 - b) / 4.0
}

#[test]
fn path_triples_match_closed_form() {
    let dom = generators::path_domain(5).unwrap();
    let (t, geom) = setup(&dom);
    let v = Verifier::new(&t, &geom, AssumptionParams::new(&geom)).unwrap();
    // g = 1 ∧ G(·, 2) / G(2, 2) with G(2, 2) = 1
    let g = |i: usize| path_g(i, 2).min(1.0);
    let gt = |i: usize, j: usize| path_g(i, j) / (g(i) * g(j));
    let d = |i: usize, j: usize| (i as f64 - j as f64).abs();
    let (mut gen, mut strong) = (0.0f64, 0.0f64);
    let mut visited = 0;
    for x in 1..4 {
        for y in 1..4 {
            for z in 1..4 {
                if x != y && y != z && x != z {
                    visited += 1;
                    let lhs = path_g(x, z) * path_g(y, z) / path_g(x, y);
                    let rhs = g(z) / g(x) * path_g(x, z) + g(z) / g(y) * path_g(z, y);
                    gen = gen.max(lhs / rhs);
                }
                if x != y && z != y && d(z, x) <= d(z, y) {
                    strong = strong.max(gt(z, y) / gt(x, y));
                }
            }
        }
    }
    assert_eq!(visited, 6);
    let r = v.check_generalized_3g();
    assert!(r.exhaustive);
    assert_eq!(r.samples + r.skipped, 27);
    assert_eq!(r.samples, 6);
    assert!(rel(r.best, gen) < 1e-12);
    let r = v.check_strong_3g();
    assert!(r.exhaustive);
    assert!(rel(r.best, strong) < 1e-12);
    assert!(r.best >= 1.0);
}

#[test]
fn path_decay_and_near_diagonal_finite() {
    let dom = generators::path_domain(5).unwrap();
    let (t, geom) = setup(&dom);
    let v = Verifier::new(&t, &geom, AssumptionParams::new(&geom)).unwrap();
    for r in v
        .check_quasi_polynomial_decay()
        .iter()
        .chain(v.check_near_diagonal().iter())
    {
        assert!(r.best.is_finite() && r.best > 0.0, "{r:?}");
        assert!(r.exhaustive);
    }
    let r = v.check_global_3g();
    assert!(r.best.is_finite() && r.exhaustive);
    assert_eq!(v.check_quasi_symmetry().best, 1.0);
    // every vertex is admissible; the worst is g(1) = G(1, 2) = 1/2
    assert!(rel(v.check_amazing_lemma().best, 2.0) < 1e-12);
}

#[test]
fn witnesses_replay() {
    let dom = generators::gen_slit_square(8, B).unwrap();
    let (t, geom) = setup(&dom);
    let mut p = AssumptionParams::new(&geom);
    p.epsilon = 0.25;
    p.r0 = 1.0;
    p.n_samples = 20_000;
    let v = Verifier::new(&t, &geom, p).unwrap();
    let reports = v.run(&[]);
    assert!(reports.len() >= 18);
    for r in &reports {
        if r.witness.is_none() {
            continue;
        }
        let again = v.replay(r).unwrap();
        assert!(
            rel(again, r.best) < 1e-12,
            "{}: {} vs {}",
            r.property,
            again,
            r.best
        );
    }
}

#[test]
fn prefix_sweeps_match_brute_force() {
    let dom = generators::gen_slit_square(8, B).unwrap();
    let (t, geom) = setup(&dom);
    let mut p = AssumptionParams::new(&geom);
    p.r0 = 1.0;
    p.epsilon = 0.3;
    let v = Verifier::new(&t, &geom, p).unwrap();
    let n = v.len();
    let table = v.b_table();
    let (mut strong, mut carl) = (0.0f64, 0.0f64);
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x == y || z == y || geom.d(z, x) > geom.d(z, y) {
                    continue;
                }
                strong = strong.max(v.gt(z, y) / v.gt(x, y));
                if let (Some((_, a)), Some((b, _))) = (table.get(x, y), table.get(z, y)) {
                    carl = carl.max(v.gb(a) / v.gb(b));
                }
            }
        }
    }
    assert_eq!(v.check_strong_3g().best, strong);
    assert_eq!(v.check_carleson()[2].best, carl);
}

#[test]
fn ubhp_matches_brute_force() {
    let dom = generators::gen_cube_grid(2, 8, B).unwrap();
    let (t, geom) = setup(&dom);
    let mut p = AssumptionParams::new(&geom);
    p.r0 = 1.0;
    let v = Verifier::new(&t, &geom, p).unwrap();
    let n = v.len();
    let h = geom.mesh();
    let mut want = f64::NEG_INFINITY;
    for b in 0..dom.boundary().len() {
        let mut k = 1.0;
        while k * h <= 1.0 + 1e-12 {
            let r = k * h;
            let xs: Vec<usize> = (0..n)
                .filter(|&i| 3.0 * geom.d_boundary(b, i) < r)
                .collect();
            let ys: Vec<usize> = (0..n).filter(|&i| geom.d_boundary(b, i) >= r).collect();
            for &x1 in &xs {
                for &x2 in xs.iter().filter(|&&x2| x2 != x1) {
                    for &y1 in &ys {
                        for &y2 in &ys {
                            want = want.max(v.ratio_ubhp(x1, x2, y1, y2));
                        }
                    }
                }
            }
            k += 1.0;
        }
    }
    let r = v.check_ubhp();
    assert!(rel(r.best, want) < 1e-12, "{} vs {want}", r.best);
    let w = r.witness.unwrap();
    assert!(w.boundary.is_some() && w.radii.len() == 1);
}

#[test]
fn ubhp_trivial_when_x_coincide() {
    let dom = generators::gen_cube_grid(2, 8, B).unwrap();
    let (t, geom) = setup(&dom);
    let v = Verifier::new(&t, &geom, AssumptionParams::new(&geom)).unwrap();
    assert_eq!(v.ratio_ubhp(3, 3, 10, 20), 1.0);
}

#[test]
fn harnack_grid_is_monotone() {
    let dom = generators::gen_cube_grid(2, 8, B).unwrap();
    let (t, geom) = setup(&dom);
    let v = Verifier::new(&t, &geom, AssumptionParams::new(&geom)).unwrap();
    let reps = v.check_harnack();
    assert_eq!(reps.len(), 4);
    assert!(reps.windows(2).all(|w| w[0].best <= w[1].best));
    assert!(reps[0].best >= 1.0 && reps[0].best.is_finite());
    assert_eq!(v.ratio_harnack(5, 5, 20), 1.0);
}

#[test]
fn scale_invariance() {
    let dom = generators::gen_slit_square(8, B).unwrap();
    let (t, geom) = setup(&dom);
    let mut p = AssumptionParams::new(&geom);
    p.r0 = 1.0;
    let base = Verifier::new(&t, &geom, p.clone()).unwrap();
    let (u0, s0, a0) = (
        base.check_ubhp().best,
        base.check_strong_3g().best,
        base.check_alt_3g_equivalence(2000).proposition.best,
    );
    for lam in [0.5, 2.0] {
        let tl = t.rescaled(lam);
        let v = Verifier::new(&tl, &geom, p.clone()).unwrap();
        assert!(rel(v.check_ubhp().best, u0) < 1e-9);
        assert!(rel(v.check_strong_3g().best, s0) < 1e-9);
        assert!(rel(v.check_alt_3g_equivalence(2000).proposition.best, a0) < 1e-9);
    }
}

#[test]
fn sampled_brackets_exhaustive() {
    // 7 × 7 interior: 49 vertices
    let dom = generators::gen_cube_grid(2, 8, B).unwrap();
    let (t, geom) = setup(&dom);
    assert!(dom.len() <= 60);
    let mut p = AssumptionParams::new(&geom);
    let ex = Verifier::new(&t, &geom, p.clone()).unwrap();
    p.exhaustive_limit = 0;
    p.n_samples = 1_000_000;
    let sa = Verifier::new(&t, &geom, p).unwrap();
    let pairs = [
        (ex.check_strong_3g(), sa.check_strong_3g()),
        (ex.check_generalized_3g(), sa.check_generalized_3g()),
        (ex.check_global_3g(), sa.check_global_3g()),
    ];
    for (e, s) in pairs {
        assert!(e.exhaustive && !s.exhaustive);
        assert!(
            s.best <= e.best && s.best >= 0.95 * e.best,
            "{}: {} vs {}",
            e.property,
            s.best,
            e.best
        );
    }
}

#[test]
fn alt_formulations_agree() {
    let dom = generators::gen_cube_grid(2, 16, B).unwrap();
    let (t, geom) = setup(&dom);
    let v = Verifier::new(&t, &geom, AssumptionParams::new(&geom)).unwrap();
    let r = v.check_alt_3g_equivalence(10_000);
    assert_eq!(r.definition.samples, 10_000);
    assert!(r.max_discrepancy < 1e-12, "{}", r.max_discrepancy);
    assert!(rel(r.definition.best, r.proposition.best) < 1e-12);
}

#[test]
fn b_approx_far_branch_uses_basepoint() {
    let dom = generators::gen_cube_grid(2, 8, B).unwrap();
    let (t, geom) = setup(&dom);
    let mut p = AssumptionParams::new(&geom);
    p.epsilon = 1e-3;
    let v = Verifier::new(&t, &geom, p).unwrap();
    let [up, lo, spread] = v.check_b_approximation();
    let o = dom.basepoint();
    assert_eq!(up.witness.unwrap().points[2], o);
    assert_eq!(lo.witness.unwrap().points[2], o);
    assert_eq!(spread.best, 1.0);
}

#[test]
fn carleson_finite_on_slit() {
    let dom = generators::gen_slit_square(16, B).unwrap();
    let (t, geom) = setup(&dom);
    let mut p = AssumptionParams::new(&geom);
    p.r0 = 1.0;
    p.epsilon = 0.9;
    let v = Verifier::new(&t, &geom, p).unwrap();
    for r in v.check_carleson() {
        assert!(r.best.is_finite() && r.best > 0.0 && r.samples > 0, "{r:?}");
    }
}

#[test]
fn lattice_doubling() {
    let dom = generators::gen_cube_grid(2, 10, B).unwrap();
    let g = dom.graph();
    let h = g.mesh();
    let c = 5 * 11 + 5;
    assert!((volume_doubling_ratio(g, c, 1.5 * h) - 13.0 / 5.0).abs() < 1e-12);
    let r = check_volume_doubling(g, usize::MAX, 0);
    assert!(r.exhaustive && r.best >= 13.0 / 5.0);
    let w = r.witness.unwrap();
    assert!((volume_doubling_ratio(g, w.points[0], w.radii[0]) - r.best).abs() < 1e-12);
    let p = generators::path_domain(3).unwrap();
    assert!(check_volume_doubling(p.graph(), 10, 0).best >= 1.0);
}

fn powers(e: f64) -> Vec<(f64, f64)> {
    [0.1, 0.2, 0.4, 0.8, 1.6]
        .iter()
        .map(|&r: &f64| (r, r.powf(e)))
        .collect()
}

#[test]
fn scale_fits() {
    let f = fit_scale_function(&powers(2.0), 2.0).unwrap();
    assert!((f.beta - 2.0).abs() < 1e-12 && (f.beta_prime - 2.0).abs() < 1e-12);
    assert!((f.c - 1.0).abs() < 1e-12 && !f.violation);
    let pw: Vec<(f64, f64)> = [0.1, 0.2, 0.4, 0.5, 1.0, 2.0, 4.0, 8.0]
        .iter()
        .map(|&r: &f64| (r, if r < 1.0 { r * r } else { r * r * r }))
        .collect();
    let f = fit_scale_function(&pw, 2.0).unwrap();
    assert!((f.beta - 2.0).abs() < 1e-12 && (f.beta_prime - 3.0).abs() < 1e-12);
    assert!(fit_scale_function(&powers(0.5), 2.0).unwrap().violation);
    assert!(fit_scale_function(&powers(2.0)[..4], 2.0).is_err());
    let narrow: Vec<(f64, f64)> = (1..=6).map(|k| (k as f64, k as f64)).collect();
    assert!(fit_scale_function(&narrow, 2.0).is_err());
}

#[test]
fn assumption_62_examples() {
    let a = check_assumption_62(&powers(2.0), &powers(3.0), 2.0, 0.0).unwrap();
    assert!(a.feasible && (a.gamma - 1.0).abs() < 1e-12);
    assert!((a.c_lower - 1.0).abs() < 1e-12 && (a.c_upper - 1.0).abs() < 1e-12);
    let a = check_assumption_62(&powers(2.0), &powers(2.0), 2.0, 0.0).unwrap();
    assert!(!a.feasible && a.gamma.abs() < 1e-12);
    let a = check_assumption_62(&powers(2.0), &powers(5.0), 2.0, 0.0).unwrap();
    assert!(a.feasible && (a.gamma - 3.0).abs() < 1e-12);
    let shifted: Vec<(f64, f64)> = powers(3.0).iter().map(|&(r, v)| (r * 1.1, v)).collect();
    let a = check_assumption_62(&powers(2.0), &powers(2.2), 2.0, DEFAULT_GAMMA_TOL).unwrap();
    assert!(!a.feasible && (a.gamma - 0.2).abs() < 1e-12);
    assert!(check_assumption_62(&powers(2.0), &powers(3.0), 2.0, -1.0).is_err());
    assert!(check_assumption_62(&powers(2.0), &shifted, 2.0, 0.0).is_err());
}

#[test]
fn analytic_ball_global_3g() {
    let ball = AnalyticBall { dim: 3 };
    let a = check_global_3g_space(&ball, 20_000, 1).unwrap();
    let b = check_global_3g_space(&ball, 20_000, 2).unwrap();
    assert!(a.best.is_finite() && b.best.is_finite());
    assert!(a.best > 0.0 && a.best < 1.0);
    let (x, y, z) = a.witness.unwrap();
    assert_eq!(ball.global_3g_ratio(&x, &y, &z).unwrap(), a.best);
    let _ = vec![0u8; 0];
}

#[test]
fn dashboard_verdicts() {
    let dom8 = generators::gen_cube_grid(2, 8, B).unwrap();
    let dom12 = generators::gen_cube_grid(2, 12, B).unwrap();
    let suite = [DashboardDomain {
        name: "square".into(),
        levels: vec![("8".into(), dom8.clone()), ("12".into(), dom12)],
    }];
    let cfg = DashboardConfig {
        r0: Some(0.5),
        epsilon: Some(0.25),
        ..DashboardConfig::default()
    };
    let rep = equivalence_dashboard(&suite, &cfg).unwrap();
    assert_eq!(rep.rows.len(), 2);
    assert_eq!(rep.verdicts.len(), 1);
    let v = &rep.verdicts[0];
    let want = match v.stable.iter().filter(|&&s| s).count() {
        3 => Verdict::CoFinite,
        0 => Verdict::CoBlowup,
        _ => Verdict::Discordant,
    };
    assert_eq!(v.verdict, want);
    let single = [DashboardDomain {
        name: "one".into(),
        levels: vec![("8".into(), dom8)],
    }];
    assert!(equivalence_dashboard(&single, &cfg).is_err());
}
