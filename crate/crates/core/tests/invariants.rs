use proptest::prelude::*;

use potlab_core::gauge::khasminskii_check;
use potlab_core::generators::{self, DEFAULT_VERTEX_BUDGET as B};
use potlab_core::geometry::DomainGeometry;
use potlab_core::potential::green_table;
use potlab_core::verify::{AssumptionParams, Verifier};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn green_is_positive_and_symmetric(m in 3usize..9) {
        let dom = generators::gen_cube_grid(2, m, B).unwrap();
        let t = green_table(&dom, 1e-12).unwrap();
        let n = t.len();
        for i in 0..n {
            for j in 0..n {
                prop_assert!(t.raw(i, j) > 0.0);
                prop_assert_eq!(t.raw(i, j), t.raw(j, i));
            }
        }
        prop_assert!(t.symmetry_defect() < 1e-8);
    }

    #[test]
    fn normalized_green_pins_basepoint(m in 3usize..9) {
        let dom = generators::gen_cube_grid(2, m, B).unwrap();
        let t = green_table(&dom, 1e-12).unwrap();
        let o = dom.basepoint_local();
        prop_assert!((t.get(o, o) - 1.0).abs() < 1e-12);
        for i in 0..t.len() {
            prop_assert!(t.benchmark(i) <= 1.0 && t.benchmark(i) > 0.0);
        }
    }

    #[test]
    fn ratios_are_scale_free(m in 4usize..8, lam in 0.1f64..10.0, a in 0usize..1000, b in 0usize..1000, c in 0usize..1000) {
        let dom = generators::gen_slit_square(2 * m, B).unwrap();
        let t = green_table(&dom, 1e-12).unwrap();
        let geom = DomainGeometry::new(&dom).unwrap();
        let n = t.len();
        let (x, y, z) = (a % n, b % n, c % n);
        prop_assume!(x != y && y != z && x != z);
        let tl = t.rescaled(lam);
        let p = AssumptionParams::new(&geom);
        let v0 = Verifier::new(&t, &geom, p.clone()).unwrap();
        let v1 = Verifier::new(&tl, &geom, p).unwrap();
        let r0 = v0.ratio_strong_3g(x, y, z);
        let r1 = v1.ratio_strong_3g(x, y, z);
        prop_assert!((r0 - r1).abs() <= 1e-9 * r0.abs());
        prop_assert_eq!(v0.ratio_harnack(x, x, y), 1.0);
    }

    #[test]
    fn khasminskii_is_homogeneous(m in 3usize..7, lam in 0.01f64..100.0, seed in 0u64..1000) {
        let dom = generators::gen_cube_grid(2, m, B).unwrap();
        let t = green_table(&dom, 1e-12).unwrap();
        let w: Vec<f64> = (0..t.len()).map(|i| ((i as u64 * 2654435761 + seed) % 97) as f64 - 48.0).collect();
        let wl: Vec<f64> = w.iter().map(|v| lam * v).collect();
        let s = khasminskii_check(&t, &w).unwrap().s;
        let sl = khasminskii_check(&t, &wl).unwrap().s;
        prop_assert!((sl - lam * s).abs() <= 1e-12 * (lam * s).max(1.0));
    }
}
