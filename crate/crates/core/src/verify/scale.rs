//! Volume doubling and scale-function fits.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::index;

use super::{Best, Coverage, Property, PropertyReport, Witness};
use crate::error::{Error, Result};
use crate::mmgraph::{sorted_shells, MetricMeasureGraph};
use crate::num;
use crate::sampling;

/// `V(x, 2r) / V(x, r)` in the graph metric.
pub fn volume_doubling_ratio(g: &MetricMeasureGraph, x: usize, r: f64) -> f64 {
    g.ball_volume(x, 2.0 * r) / g.ball_volume(x, r)
}

/// Best doubling constant over centers and radii `(k + ½)h`.
///
/// Every vertex is a center when `centers ≥ |V|`; otherwise `centers`
/// distinct vertices are drawn with `seed`. Radii stop once `V(x, r)` is the
/// whole graph.
pub fn check_volume_doubling(g: &MetricMeasureGraph, centers: usize, seed: u64) -> PropertyReport {
    let n = g.vertex_count();
    let chosen: Vec<usize> = if centers >= n {
        (0..n).collect()
    } else {
        let mut rng = sampling::rng(seed, 0);
        let mut v = index::sample(&mut rng, n, centers).into_vec();
        v.sort_unstable();
        v
    };
    let h = g.mesh();
    let total = g.total_measure();
    let mut best = Best::new();
    let mut cov = Coverage {
        exhaustive: centers >= n,
        ..Coverage::default()
    };
    for &x in &chosen {
        let (d, p) = sorted_shells(&g.distances_from(x), g.measures());
        let vol = |r: f64| {
            let k = d.partition_point(|&t| t < r);
            if k == 0 {
                0.0
            } else {
                p[k - 1]
            }
        };
        let mut k = 0.0;
        loop {
            let r = (k + 0.5) * h;
            let v = vol(r);
            if v >= total * (1.0 - 1e-12) {
                break;
            }
            cov.samples += 1;
            best.offer(vol(2.0 * r) / v, || Witness {
                points: alloc::vec![x],
                boundary: None,
                radii: alloc::vec![r],
            });
            k += 1.0;
        }
    }
    PropertyReport {
        property: Property::VolumeDoubling,
        best: best.value,
        witness: best.witness,
        samples: cov.samples,
        exhaustive: cov.exhaustive,
        skipped: 0,
        params: None,
        seed,
    }
}

/// Exponent window and constant of a scale function.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleFit {
    pub beta: f64,
    pub beta_prime: f64,
    pub c: f64,
    /// `β ≤ 1`.
    pub violation: bool,
}

fn check_profile(p: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    let mut p: Vec<(f64, f64)> = p.to_vec();
    p.sort_by(|a, b| a.0.total_cmp(&b.0));
    p.dedup_by(|a, b| a.0 == b.0);
    if p.len() < 5 {
        return Err(Error::InvalidArgument(format!(
            "need at least 5 radii (got {})",
            p.len()
        )));
    }
    if p.iter().any(|&(r, v)| !(r > 0.0) || !(v > 0.0)) {
        return Err(Error::InvalidArgument(
            "radii and values must be positive".into(),
        ));
    }
    if p[p.len() - 1].0 < 10.0 * p[0].0 * (1.0 - 1e-12) {
        return Err(Error::InvalidArgument(
            "radii must span at least one decade".into(),
        ));
    }
    Ok(p)
}

/// Fits `C⁻¹(R/r)^β ≤ Ψ(R)/Ψ(r) ≤ C(R/r)^β'`.
///
/// The exponents are the extreme log-slopes over pairs with `R/r ≥
/// separation`; `C` is then the smallest constant covering every pair.
pub fn fit_scale_function(profile: &[(f64, f64)], separation: f64) -> Result<ScaleFit> {
    let p = check_profile(profile)?;
    let (mut beta, mut beta_p) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let lr = num::ln(p[j].0 / p[i].0);
            if p[j].0 / p[i].0 >= separation {
                let s = num::ln(p[j].1 / p[i].1) / lr;
                beta = beta.min(s);
                beta_p = beta_p.max(s);
            }
        }
    }
    if !beta.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "no radius pair is separated by {separation}"
        )));
    }
    let mut c: f64 = 1.0;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let q = p[j].0 / p[i].0;
            let v = p[j].1 / p[i].1;
            c = c.max(num::powf(q, beta) / v).max(v / num::powf(q, beta_p));
        }
    }
    Ok(ScaleFit {
        beta,
        beta_prime: beta_p,
        c,
        violation: beta <= 1.0,
    })
}

/// Outcome of the `(Ψ, V)` compatibility test.
#[derive(Debug, Clone, PartialEq)]
pub struct Assumption62 {
    pub feasible: bool,
    /// Largest `γ` the data allow; `≤ 0` when infeasible.
    pub gamma: f64,
    /// Constant of the quadratic lower bound `C⁻¹(R/r)² ≤ Ψ(R)/Ψ(r)`.
    pub c_lower: f64,
    /// Constant of `Ψ(R)/Ψ(r) ≤ C (r/R)^γ V(R)/V(r)` at `γ ∨ 0`.
    pub c_upper: f64,
}

/// Slack on fitted exponents. Lattice corrections of order `h/r` tilt
/// log-slopes over a single decade by about 0.1.
pub const DEFAULT_GAMMA_TOL: f64 = 0.25;

/// Tests `C⁻¹(R/r)² ≤ Ψ(R)/Ψ(r) ≤ C (r/R)^γ V(R)/V(r)` on matching radii.
///
/// Over finitely many radii any `γ` gives some `C`, so feasibility is judged
/// by exponents: `γ` is the smallest log-slope of `V/Ψ` over pairs with
/// `R/r ≥ separation`, and the data are feasible when `γ > gamma_tol`.
pub fn check_assumption_62(
    psi: &[(f64, f64)],
    vol: &[(f64, f64)],
    separation: f64,
    gamma_tol: f64,
) -> Result<Assumption62> {
    if !(gamma_tol >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma_tol must be ≥ 0 (got {gamma_tol})"
        )));
    }
    let p = check_profile(psi)?;
    let v = check_profile(vol)?;
    if p.len() != v.len()
        || p.iter()
            .zip(&v)
            .any(|(a, b)| (a.0 - b.0).abs() > 1e-12 * a.0)
    {
        return Err(Error::InvalidArgument(
            "Ψ and V must be sampled at the same radii".into(),
        ));
    }
    let mut gamma = f64::INFINITY;
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            if p[j].0 / p[i].0 >= separation {
                let s = (num::ln(v[j].1 / v[i].1) - num::ln(p[j].1 / p[i].1))
                    / num::ln(p[j].0 / p[i].0);
                gamma = gamma.min(s);
            }
        }
    }
    if !gamma.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "no radius pair is separated by {separation}"
        )));
    }
    let g0 = gamma.max(0.0);
    let (mut c_lower, mut c_upper): (f64, f64) = (1.0, 1.0);
    for i in 0..p.len() {
        for j in i + 1..p.len() {
            let q = p[j].0 / p[i].0;
            let pr = p[j].1 / p[i].1;
            c_lower = c_lower.max(q * q / pr);
            c_upper = c_upper.max(pr * num::powf(q, g0) * v[i].1 / v[j].1);
        }
    }
    Ok(Assumption62 {
        feasible: gamma > gamma_tol.max(1e-12),
        gamma,
        c_lower,
        c_upper,
    })
}
