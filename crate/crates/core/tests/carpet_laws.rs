use potlab_core::generators::{self, hausdorff_dimension, DEFAULT_VERTEX_BUDGET as B};
use potlab_core::mmgraph::MetricMeasureGraph;
use potlab_core::num::linear_fit;

/// Log–log slope of `V(x, r)` from the corner cell over radii `3^j h`.
fn corner_volume_exponent(g: &MetricMeasureGraph, level: usize) -> f64 {
    let h = g.mesh();
    let (xs, ys): (Vec<f64>, Vec<f64>) = (1..=level)
        .map(|j| {
            let r = 3f64.powi(j as i32) * h;
            (r.ln(), g.ball_volume(0, r).ln())
        })
        .unzip();
    linear_fit(&xs, &ys).unwrap().slope
}

#[test]
fn carpet_volume_exponent() {
    for level in [4, 5] {
        let dom = generators::gen_carpet(2, level, 1, B).unwrap();
        let e = corner_volume_exponent(dom.graph(), level);
        assert!(
            (e - hausdorff_dimension(2)).abs() < 0.15,
            "level {level}: {e}"
        );
    }
}

#[test]
fn three_dimensional_carpet_is_connected() {
    let dom = generators::gen_carpet(3, 2, 1, B).unwrap();
    let g = dom.graph();
    assert_eq!(g.vertex_count(), 676);
    assert!((g.total_measure() - 1.0).abs() < 1e-12);
    for (u, v, c) in g.edges() {
        assert!(c > 0.0 && u != v);
        assert!(g.neighbors(v).any(|(w, cw)| w == u && cw == c));
    }
    assert_eq!(dom.len() + dom.boundary().len(), 676);
    let o = dom.interior()[0];
    let d = dom.intrinsic_distances_from(o);
    assert!(dom.interior().iter().all(|&v| d[v].is_finite()));
}
