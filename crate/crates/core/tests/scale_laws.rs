use potlab_core::generators::{self, DEFAULT_VERTEX_BUDGET as B};
use potlab_core::num::linear_fit;
use potlab_core::potential::exit_time_profile;
use potlab_core::verify::{check_assumption_62, fit_scale_function, DEFAULT_GAMMA_TOL};

type Profile = Vec<(f64, f64)>;

fn lattice_profiles(n: usize, m: usize, kmax: usize) -> (Profile, Profile) {
    let dom = generators::gen_cube_grid(n, m, B).unwrap();
    let g = dom.graph();
    let h = g.mesh();
    let o = dom.basepoint();
    let radii: Vec<f64> = (2..=kmax).map(|k| k as f64 * h).collect();
    let ex = exit_time_profile(g, &[o], &radii, 1e-10).unwrap();
    let psi: Vec<(f64, f64)> = ex
        .profile()
        .iter()
        .map(|&(r, t)| (r / h, t / (h * h)))
        .collect();
    let vol: Vec<(f64, f64)> = radii
        .iter()
        .map(|&r| (r / h, g.ball_volume(o, r) / g.measure(o)))
        .collect();
    (psi, vol)
}

#[test]
fn z3_exit_exponent() {
    let (psi, _) = lattice_profiles(3, 28, 12);
    let xs: Vec<f64> = psi.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = psi.iter().map(|p| p.1.ln()).collect();
    let beta = linear_fit(&xs, &ys).unwrap().slope;
    assert!((1.8..=2.2).contains(&beta), "{beta}");
}

#[test]
fn z3_exit_scale_window() {
    let (psi, _) = lattice_profiles(3, 44, 20);
    let fit = fit_scale_function(&psi, 2.0).unwrap();
    assert!(!fit.violation);
    assert!(fit.beta > 1.5 && fit.beta_prime < 2.5, "{fit:?}");
}

#[test]
fn assumption_62_by_dimension() {
    let (psi3, vol3) = lattice_profiles(3, 44, 20);
    let a3 = check_assumption_62(&psi3, &vol3, 2.0, DEFAULT_GAMMA_TOL).unwrap();
    let (psi2, vol2) = lattice_profiles(2, 44, 20);
    let a2 = check_assumption_62(&psi2, &vol2, 2.0, DEFAULT_GAMMA_TOL).unwrap();
    assert!(a3.feasible && a3.gamma > 0.75, "{a3:?}");
    assert!(!a2.feasible && a2.gamma.abs() < DEFAULT_GAMMA_TOL, "{a2:?}");
}
