use potlab_core::generators::{self, DEFAULT_VERTEX_BUDGET as B};
use potlab_core::geometry::{corkscrew_point, DomainGeometry, HarnackFamily};
use potlab_core::num;
use potlab_core::sampling;

#[test]
fn chain_length_grows_with_log_term_on_slit() {
    let dom = generators::gen_slit_square(32, B).unwrap();
    let geom = DomainGeometry::new(&dom).unwrap();
    let fam = HarnackFamily::new(&geom, 1.9).unwrap();
    let mut rng = sampling::rng(2024, 0);
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for _ in 0..200 {
        let (x, y) = sampling::distinct_pair(&mut rng, geom.len());
        let chain = fam.chain(x, y).unwrap();
        assert!(fam.validate(&chain, x, y));
        let t = geom.d(x, y) / geom.delta(x).min(geom.delta(y));
        xs.push(num::ln(t + 1.0));
        ys.push(chain.len() as f64);
    }
    let fit = num::linear_fit(&xs, &ys).unwrap();
    assert!(fit.slope > 1.0 && fit.r_squared > 0.6, "{fit:?}");
}

#[test]
fn corkscrews_exist_on_square_and_slit() {
    for dom in [
        generators::gen_cube_grid(2, 32, B).unwrap(),
        generators::gen_slit_square(32, B).unwrap(),
    ] {
        let geom = DomainGeometry::new(&dom).unwrap();
        for &xi in dom.boundary() {
            for r in [0.1, 0.2] {
                let res = corkscrew_point(&geom, xi, r, 3.0).unwrap();
                assert!(!res.granular);
                assert!(res.found.is_some(), "xi {xi} r {r}");
            }
        }
    }
}

#[test]
fn corkscrew_fails_at_cusp_tip() {
    let m = 32;
    let dom = generators::gen_cusp_corridor(m, 3.0, B).unwrap();
    let geom = DomainGeometry::new(&dom).unwrap();
    let tip = m * (m + 1);
    for r in [0.1, 0.2] {
        let res = corkscrew_point(&geom, tip, r, 3.0).unwrap();
        assert!(res.found.is_none(), "r {r}: {res:?}");
    }
}
