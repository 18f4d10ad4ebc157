//! Capacities, Poincaré and exit-time profiles, and `Φ` from a scale
//! function.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::stiffness;
use crate::error::{Error, Result};
use crate::linalg::{pcg, symmetric_eigen, CsrMatrix, DenseMatrix};
use crate::mmgraph::MetricMeasureGraph;
use crate::num::{self, LinearFit};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleSample {
    pub center: usize,
    pub radius: f64,
    pub value: f64,
}

/// Per-ball values of a scale surrogate with a log–log fit over all samples.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleData {
    pub samples: Vec<ScaleSample>,
    pub fit: Option<LinearFit>,
}

impl ScaleData {
    fn new(samples: Vec<ScaleSample>) -> Self {
        let xs: Vec<f64> = samples.iter().map(|s| num::ln(s.radius)).collect();
        let ys: Vec<f64> = samples.iter().map(|s| num::ln(s.value)).collect();
        let fit = num::linear_fit(&xs, &ys);
        Self { samples, fit }
    }

    /// Geometric mean of the value at each distinct radius, ascending.
    pub fn profile(&self) -> Vec<(f64, f64)> {
        let mut radii: Vec<f64> = self.samples.iter().map(|s| s.radius).collect();
        radii.sort_by(f64::total_cmp);
        radii.dedup();
        radii
            .into_iter()
            .map(|r| {
                let logs: Vec<f64> = self
                    .samples
                    .iter()
                    .filter(|s| s.radius == r)
                    .map(|s| num::ln(s.value))
                    .collect();
                (r, num::exp(logs.iter().sum::<f64>() / logs.len() as f64))
            })
            .collect()
    }
}

fn ball(g: &MetricMeasureGraph, x: usize, r: f64) -> (Vec<usize>, Vec<u32>) {
    let d = g.distances_from(x);
    let mut local = vec![u32::MAX; g.vertex_count()];
    let mut members = Vec::new();
    for (v, dv) in d.iter().enumerate() {
        if *dv < r {
            local[v] = members.len() as u32;
            members.push(v);
        }
    }
    (members, local)
}

fn lookup(local: &[u32]) -> impl Fn(usize) -> Option<usize> + '_ {
    move |v| match local[v] {
        u32::MAX => None,
        l => Some(l as usize),
    }
}

/// Condenser capacity: `E(u, u)` for `u = 1` on `b`, `u = 0` off `shell`,
/// harmonic on `shell ∖ b`.
pub fn capacity(g: &MetricMeasureGraph, b: &[usize], shell: &[usize]) -> Result<f64> {
    let n = g.vertex_count();
    let mut in_shell = vec![false; n];
    for &v in shell {
        g.check_vertex(v)?;
        in_shell[v] = true;
    }
    let mut in_b = vec![false; n];
    for &v in b {
        g.check_vertex(v)?;
        if !in_shell[v] {
            return Err(Error::InvalidArgument(format!(
                "vertex {v} of B lies outside the shell"
            )));
        }
        in_b[v] = true;
    }
    if b.is_empty() {
        return Err(Error::Degenerate("B is empty".into()));
    }
    if in_shell.iter().all(|&s| s) {
        return Err(Error::Degenerate("shell is the whole graph".into()));
    }
    if b.iter().any(|&v| g.neighbors(v).any(|(w, _)| !in_shell[w])) {
        return Err(Error::Degenerate(
            "B touches the complement of the shell".into(),
        ));
    }
    let free: Vec<usize> = (0..n).filter(|&v| in_shell[v] && !in_b[v]).collect();
    let mut local = vec![u32::MAX; n];
    for (i, &v) in free.iter().enumerate() {
        local[v] = i as u32;
    }
    let mut u = vec![0.0; n];
    for &v in b {
        u[v] = 1.0;
    }
    if !free.is_empty() {
        let k = stiffness(g, &free, lookup(&local), None);
        let rhs: Vec<f64> = free
            .iter()
            .map(|&v| {
                g.neighbors(v)
                    .filter(|(w, _)| in_b[*w])
                    .map(|(_, c)| c)
                    .sum()
            })
            .collect();
        let sol = pcg(&k, &rhs, 1e-13, 20 * free.len() + 200)?;
        for (&v, x) in free.iter().zip(sol.x) {
            u[v] = x;
        }
    }
    Ok(super::energy(g, &u))
}

/// Mean exit time `E_x[τ_{B(x,r)}]` per `(center, radius)`: solves `L u = 1`
/// on the ball with `u = 0` outside. In this normalization the exit time
/// from the middle of a lattice interval of radius `r` is `r²/2`.
pub fn exit_time_profile(
    g: &MetricMeasureGraph,
    centers: &[usize],
    radii: &[f64],
    tol: f64,
) -> Result<ScaleData> {
    let mut samples = Vec::with_capacity(centers.len() * radii.len());
    for &x in centers {
        g.check_vertex(x)?;
        for &r in radii {
            let (members, local) = ball(g, x, r);
            if members.len() == g.vertex_count() {
                return Err(Error::Degenerate(format!(
                    "ball B({x}, {r}) covers the graph"
                )));
            }
            let k = stiffness(g, &members, lookup(&local), None);
            let rhs: Vec<f64> = members.iter().map(|&v| g.measure(v)).collect();
            let sol = pcg(&k, &rhs, tol, 20 * members.len() + 200)?;
            samples.push(ScaleSample {
                center: x,
                radius: r,
                value: sol.x[local[x] as usize],
            });
        }
    }
    Ok(ScaleData::new(samples))
}

/// Poincaré constant `Λ(B) = 1/λ₂` of the Neumann Laplacian of each ball.
pub fn poincare_profile(
    g: &MetricMeasureGraph,
    centers: &[usize],
    radii: &[f64],
    budget: usize,
) -> Result<ScaleData> {
    let mut samples = Vec::with_capacity(centers.len() * radii.len());
    for &x in centers {
        g.check_vertex(x)?;
        for &r in radii {
            let (members, local) = ball(g, x, r);
            let m = members.len();
            if m < 2 {
                return Err(Error::Degenerate(format!(
                    "ball B({x}, {r}) has one vertex"
                )));
            }
            if m > budget {
                return Err(Error::Budget {
                    what: "dense ball vertices",
                    needed: m as u64,
                    budget: budget as u64,
                });
            }
            let rows = members
                .iter()
                .enumerate()
                .map(|(i, &v)| {
                    let mut row = Vec::new();
                    let mut diag = 0.0;
                    for (w, c) in g.neighbors(v) {
                        if local[w] != u32::MAX {
                            diag += c;
                            row.push((local[w] as usize, -c));
                        }
                    }
                    row.push((i, diag));
                    row
                })
                .collect();
            let k = CsrMatrix::from_rows(rows).to_dense();
            let mut s = DenseMatrix::zeros(m);
            for i in 0..m {
                for j in 0..m {
                    s[(i, j)] =
                        k[(i, j)] / num::sqrt(g.measure(members[i]) * g.measure(members[j]));
                }
            }
            let gap = symmetric_eigen(&s).values[1];
            if !(gap > 1e-12) {
                return Err(Error::Degenerate(format!(
                    "ball B({x}, {r}) is disconnected"
                )));
            }
            samples.push(ScaleSample {
                center: x,
                radius: r,
                value: 1.0 / gap,
            });
        }
    }
    Ok(ScaleData::new(samples))
}

/// `Φ(s) = sup_{r>0} (s/r − 1/Ψ(r))` by a log-spaced scan over
/// `r ∈ [1e-8, 1e8]` refined by golden-section search.
pub fn phi_from_psi(psi: &dyn Fn(f64) -> f64, s: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "s must be positive, got {s}"
        )));
    }
    let f = |lr: f64| {
        let r = num::exp(lr);
        s / r - 1.0 / psi(r)
    };
    let (lo, hi) = (num::ln(1e-8), num::ln(1e8));
    let steps = 1600;
    let step = (hi - lo) / steps as f64;
    let mut best = 0;
    let mut best_v = f64::NEG_INFINITY;
    for k in 0..=steps {
        let v = f(lo + k as f64 * step);
        if v > best_v {
            best_v = v;
            best = k;
        }
    }
    if best == 0 || best == steps {
        return Err(Error::Degenerate(
            "supremum not attained inside the search window".into(),
        ));
    }
    let (mut a, mut b) = (lo + (best - 1) as f64 * step, lo + (best + 1) as f64 * step);
    let ratio = (num::sqrt(5.0) - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    for _ in 0..200 {
        if f(c) > f(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - ratio * (b - a);
        d = a + ratio * (b - a);
        if b - a < 1e-14 {
            break;
        }
    }
    Ok(f(0.5 * (a + b)).max(best_v))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, DEFAULT_VERTEX_BUDGET as B};
    use crate::mmgraph::MetricMode;

    #[test]
    fn path_capacity_is_one() {
        let dom = generators::path_domain(5).unwrap();
        let cap = capacity(dom.graph(), &[2], &[1, 2, 3]).unwrap();
        assert!((cap - 1.0).abs() < 1e-12);
        assert!(capacity(dom.graph(), &[1, 2], &[1, 2]).is_err());
        assert!(capacity(dom.graph(), &[2], &[0, 1, 2, 3, 4]).is_err());
        let long = generators::path_domain(7).unwrap();
        let shell = [1, 2, 3, 4, 5];
        let small = capacity(long.graph(), &[3], &shell).unwrap();
        let bigger = capacity(long.graph(), &[2, 3, 4], &shell).unwrap();
        assert!((small - 2.0 / 3.0).abs() < 1e-12 && (bigger - 1.0).abs() < 1e-12);
    }

    #[test]
    fn two_vertex_poincare() {
        let g = MetricMeasureGraph::new(
            vec![1.0, 1.0],
            &[(0, 1, 1.0)],
            1.0,
            MetricMode::Geodesic,
            0,
            vec![],
        )
        .unwrap();
        let p = poincare_profile(&g, &[0], &[1.5], 10).unwrap();
        assert!((p.samples[0].value - 0.5).abs() < 1e-12);
    }

    #[test]
    fn interval_exit_time() {
        let dom = generators::path_domain(41).unwrap();
        for r in [2.0, 5.0, 9.0] {
            let e = exit_time_profile(dom.graph(), &[20], &[r], 1e-12).unwrap();
            assert!((e.samples[0].value - r * r / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn grid_poincare_scales_quadratically() {
        let dom = generators::gen_cube_grid(2, 40, B).unwrap();
        let g = dom.graph();
        let h = g.mesh();
        let center = 20 * 41 + 20;
        let radii: Vec<f64> = [2.0, 3.0, 4.0, 6.0, 8.0].iter().map(|k| k * h).collect();
        let p = poincare_profile(g, &[center], &radii, 2_000).unwrap();
        let slope = p.fit.unwrap().slope;
        assert!((slope - 2.0).abs() < 0.2, "slope {slope}");
    }

    #[test]
    fn phi_quadratic() {
        let psi = |r: f64| r * r;
        assert!((phi_from_psi(&psi, 1.0).unwrap() - 0.25).abs() < 1e-10);
        assert!((phi_from_psi(&psi, 2.0).unwrap() - 1.0).abs() < 1e-10);
        let beta: f64 = 3.0;
        let psi3 = |r: f64| r.powf(beta);
        let s: f64 = 1.3;
        let closed = s.powf(beta / (beta - 1.0))
            * (beta.powf(-1.0 / (beta - 1.0)) - beta.powf(-beta / (beta - 1.0)));
        assert!((phi_from_psi(&psi3, s).unwrap() - closed).abs() < 1e-10);
        let mut prev = 0.0;
        for k in 1..20 {
            let v = phi_from_psi(&psi, k as f64 * 0.3).unwrap();
            assert!(v >= prev);
            prev = v;
        }
    }
}
