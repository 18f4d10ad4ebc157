//! Conditional gauge of a Schrödinger potential.
//!
//! All quantities use the raw Green table `G = K⁻¹`, which is the kernel of
//! `L⁻¹` with respect to `μ`: `L⁻¹f(x) = Σ_y G(x, y) f(y) μ(y)`.
//!
//! The conditioned process `E^x_y` is the Doob transform of the walk killed
//! on `∂D` by `h = G(·, y)`. Off `y` it keeps the holding rate `Σc/μ` and
//! jumps to `u` with probability `c(v,u) h(u) / (h(v) Σc)`; at `y` it is
//! killed with probability `1 / (G(y,y) Σc)` at the end of each holding
//! time. Since `h = 0` on `∂D` the transformed walk never leaves `D`.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::error::{Error, Result};
use crate::linalg::{pcg, DenseMatrix};
use crate::mmgraph::DomainView;
use crate::num;
use crate::potential::{green_table, schrodinger_green, stiffness, GreenTable};
use crate::sampling;

fn check_len(dom: &DomainView, w: &[f64]) -> Result<()> {
    if w.len() != dom.len() {
        return Err(Error::InvalidArgument(format!(
            "potential has {} entries, domain has {}",
            w.len(),
            dom.len()
        )));
    }
    if w.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("potential must be finite".into()));
    }
    Ok(())
}

/// `‖W‖ = max_x Σ_y G(x, y) |W(y)| μ(y)` on an ambient domain; `w` is
/// indexed by the ambient interior.
pub fn w_norm(ambient: &GreenTable, w: &[f64]) -> Result<f64> {
    let dom = ambient.domain();
    check_len(dom, w)?;
    let g = dom.graph();
    let wm: Vec<f64> = dom
        .interior()
        .iter()
        .zip(w)
        .map(|(&v, x)| x.abs() * g.measure(v))
        .collect();
    let n = dom.len();
    let mut best: f64 = 0.0;
    for x in 0..n {
        let s: f64 = (0..n).map(|y| ambient.raw(x, y) * wm[y]).sum();
        best = best.max(s);
    }
    Ok(best)
}

/// [`w_norm`] from a single solve `K u = |W| μ`, without the full table;
/// `‖W‖ = max u`.
pub fn w_norm_solve(ambient: &DomainView, w: &[f64], tol: f64) -> Result<f64> {
    check_len(ambient, w)?;
    let g = ambient.graph();
    let k = stiffness(g, ambient.interior(), |v| ambient.local(v), None);
    let rhs: Vec<f64> = ambient
        .interior()
        .iter()
        .zip(w)
        .map(|(&v, x)| x.abs() * g.measure(v))
        .collect();
    let sol = pcg(&k, &rhs, tol, 20 * rhs.len() + 200)?;
    Ok(sol.x.iter().copied().fold(0.0, f64::max))
}

/// Extends a potential on `D` by zero to an enclosing domain; `map` sends
/// interior positions of `D` to ambient graph vertices.
pub fn extend_potential(ambient: &DomainView, map: &[usize], w: &[f64]) -> Result<Vec<f64>> {
    if map.len() != w.len() {
        return Err(Error::InvalidArgument(
            "map and potential lengths differ".into(),
        ));
    }
    let mut out = vec![0.0; ambient.len()];
    for (&v, &x) in map.iter().zip(w) {
        out[ambient.local(v).ok_or(Error::NotInDomain(v))?] = x;
    }
    Ok(out)
}

fn weighted(green: &GreenTable, w: &[f64]) -> Result<Vec<f64>> {
    let dom = green.domain();
    check_len(dom, w)?;
    let g = dom.graph();
    Ok(dom
        .interior()
        .iter()
        .zip(w)
        .map(|(&v, x)| x.abs() * g.measure(v))
        .collect())
}

/// `E^x_y[∫₀^ζ |W(X_s)| ds] = Σ_z G(x,z) G(z,y) |W(z)| μ(z) / G(x,y)`, by
/// interior position. `z ∈ {x, y}` is included.
pub fn conditional_integral(green: &GreenTable, w: &[f64], x: usize, y: usize) -> Result<f64> {
    let wm = weighted(green, w)?;
    let n = green.len();
    if x >= n || y >= n {
        return Err(Error::VertexOutOfRange {
            vertex: x.max(y),
            count: n,
        });
    }
    if x == y {
        return Err(Error::InvalidArgument(
            "conditional integral needs x ≠ y".into(),
        ));
    }
    let s: f64 = (0..n)
        .map(|z| green.raw(x, z) * green.raw(z, y) * wm[z])
        .sum();
    Ok(s / green.raw(x, y))
}

/// `s = sup_{x≠y}` of the conditional integral and the Khasminskii bound.
#[derive(Debug, Clone, PartialEq)]
pub struct Khasminskii {
    pub s: f64,
    /// Interior positions attaining `s`.
    pub argmax: (usize, usize),
    /// `1 / (1 − s)` when `s < 1`.
    pub bound: Option<f64>,
}

/// All conditional integrals at once: `(G diag(|W|μ) G)(x,y) / G(x,y)`.
pub fn conditional_integrals(green: &GreenTable, w: &[f64]) -> Result<DenseMatrix> {
    let wm = weighted(green, w)?;
    let n = green.len();
    let mut a = DenseMatrix::zeros(n);
    let mut b = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            a[(i, j)] = green.raw(i, j) * wm[j];
            b[(i, j)] = green.raw(i, j);
        }
    }
    let mut c = a.matmul(&b);
    for i in 0..n {
        for j in 0..n {
            c[(i, j)] /= green.raw(i, j);
        }
    }
    Ok(c)
}

pub fn khasminskii_check(green: &GreenTable, w: &[f64]) -> Result<Khasminskii> {
    let c = conditional_integrals(green, w)?;
    let n = green.len();
    let mut s = 0.0;
    let mut argmax = (0, 0);
    for i in 0..n {
        for j in 0..n {
            if i != j && c[(i, j)] > s {
                s = c[(i, j)];
                argmax = (i, j);
            }
        }
    }
    Ok(Khasminskii {
        s,
        argmax,
        bound: (s < 1.0).then(|| 1.0 / (1.0 - s)),
    })
}

/// Scaling `λ*` with `s(λ* W) = 1`, by bisection on `λ` to relative `tol`.
pub fn critical_scaling(green: &GreenTable, w: &[f64], tol: f64) -> Result<f64> {
    let s1 = khasminskii_check(green, w)?.s;
    if !(s1 > 0.0) {
        return Err(Error::InvalidArgument(
            "potential vanishes; no critical scaling".into(),
        ));
    }
    let s_at = |lam: f64| -> Result<f64> {
        let scaled: Vec<f64> = w.iter().map(|v| v * lam).collect();
        Ok(khasminskii_check(green, &scaled)?.s)
    };
    let (mut lo, mut hi) = (0.0, 1.0);
    while s_at(hi)? < 1.0 {
        lo = hi;
        hi *= 2.0;
    }
    while hi - lo > tol * hi {
        let mid = 0.5 * (lo + hi);
        if s_at(mid)? < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Gauge `u(x, y) = G_{−|W|}(x, y) / G(x, y)` from two direct solves.
#[derive(Debug, Clone)]
pub struct DirectGauge {
    n: usize,
    u: Vec<f64>,
    pub sup: f64,
}

impl DirectGauge {
    #[inline]
    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.u[x * self.n + y]
    }

    pub fn values(&self) -> &[f64] {
        &self.u
    }
}

/// Fails with [`Error::Indefinite`] when `L − |W|` is not positive definite,
/// the case of an infinite gauge.
pub fn gauge_direct(green: &GreenTable, w: &[f64]) -> Result<DirectGauge> {
    let dom = green.domain();
    check_len(dom, w)?;
    let neg: Vec<f64> = w.iter().map(|v| -v.abs()).collect();
    let gw = schrodinger_green(dom, &neg, green.tolerance())?;
    let n = green.len();
    let mut u = vec![0.0; n * n];
    let mut sup: f64 = 0.0;
    for x in 0..n {
        for y in 0..n {
            let v = gw.raw(x, y) / green.raw(x, y);
            u[x * n + y] = v;
            sup = sup.max(v);
        }
    }
    Ok(DirectGauge { n, u, sup })
}

/// Convenience: [`green_table`] followed by [`gauge_direct`].
pub fn gauge_direct_on(dom: &DomainView, w: &[f64], tol: f64) -> Result<DirectGauge> {
    gauge_direct(&green_table(dom, tol)?, w)
}

/// Jump law of the conditioned walk towards `y`.
#[derive(Debug, Clone)]
pub struct ConditionedWalk {
    y: usize,
    /// Holding rate `Σc/μ` per interior position.
    rate: Vec<f64>,
    /// `|W|` per interior position.
    w: Vec<f64>,
    /// Interior targets and cumulative probabilities per position.
    targets: Vec<Vec<usize>>,
    cumulative: Vec<Vec<f64>>,
    /// Killing probability at `y`.
    kill: f64,
}

impl ConditionedWalk {
    pub fn new(green: &GreenTable, w: &[f64], y: usize) -> Result<Self> {
        let dom = green.domain();
        check_len(dom, w)?;
        let n = green.len();
        if y >= n {
            return Err(Error::VertexOutOfRange {
                vertex: y,
                count: n,
            });
        }
        let g = dom.graph();
        let mut rate = Vec::with_capacity(n);
        let mut targets = Vec::with_capacity(n);
        let mut cumulative = Vec::with_capacity(n);
        let mut kill = 0.0;
        for (i, &v) in dom.interior().iter().enumerate() {
            let csum = g.conductance_sum(v);
            rate.push(csum / g.measure(v));
            let h = green.raw(i, y);
            let mut t = Vec::new();
            let mut c = Vec::new();
            let mut acc = 0.0;
            for (u, cu) in g.neighbors(v) {
                if let Some(j) = dom.local(u) {
                    acc += cu * green.raw(j, y) / (h * csum);
                    t.push(j);
                    c.push(acc);
                }
            }
            if i == y {
                kill = 1.0 / (green.raw(y, y) * csum);
                // the jump mass and the killing mass add up to one
                if (acc + kill - 1.0).abs() > 1e-6 {
                    return Err(Error::Degenerate(format!(
                        "conditioned kernel at y sums to {}",
                        acc + kill
                    )));
                }
            } else if (acc - 1.0).abs() > 1e-6 {
                return Err(Error::Degenerate(format!(
                    "conditioned kernel at {v} sums to {acc}"
                )));
            }
            targets.push(t);
            cumulative.push(c);
        }
        Ok(Self {
            y,
            rate,
            w: w.iter().map(|v| v.abs()).collect(),
            targets,
            cumulative,
            kill,
        })
    }

    /// Next position from `v`, or `None` when the walk is killed at `y`.
    pub fn step<R: Rng>(&self, v: usize, rng: &mut R) -> Option<usize> {
        let c = &self.cumulative[v];
        let total = c.last().copied().unwrap_or(0.0) + if v == self.y { self.kill } else { 0.0 };
        let u = rng.gen::<f64>() * total;
        let k = c.partition_point(|&p| p <= u);
        if k == c.len() {
            // rounding at the top end lands on the last target off y
            return if v == self.y {
                None
            } else {
                Some(self.targets[v][c.len() - 1])
            };
        }
        Some(self.targets[v][k])
    }

    /// Jump probabilities out of `v` (interior targets) and the killing
    /// probability.
    pub fn kernel(&self, v: usize) -> (Vec<(usize, f64)>, f64) {
        let c = &self.cumulative[v];
        let mut prev = 0.0;
        let jumps = self.targets[v]
            .iter()
            .zip(c)
            .map(|(&t, &p)| {
                let q = p - prev;
                prev = p;
                (t, q)
            })
            .collect();
        (jumps, if v == self.y { self.kill } else { 0.0 })
    }
}

/// Monte Carlo estimate of `E^x_y[exp(∫₀^ζ |W(X_s)| ds)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct McEstimate {
    pub x: usize,
    pub y: usize,
    pub mean: f64,
    pub std_err: f64,
    pub n_paths: u64,
    /// Total jumps over all paths.
    pub steps: u64,
    pub seed: u64,
}

impl McEstimate {
    /// `mean ± z·std_err`.
    pub fn interval(&self, z: f64) -> (f64, f64) {
        (self.mean - z * self.std_err, self.mean + z * self.std_err)
    }
}

/// Jump cap per path before the run is declared divergent.
pub const DEFAULT_STEP_CAP: u64 = 10_000_000;

/// Runs `n_paths` conditioned walks from `x`; path `k` draws from the
/// stream `(seed, k)`, so results do not depend on evaluation order.
pub fn gauge_mc(
    green: &GreenTable,
    w: &[f64],
    x: usize,
    y: usize,
    n_paths: u64,
    seed: u64,
) -> Result<McEstimate> {
    if n_paths < 100 {
        return Err(Error::InvalidArgument(format!(
            "need at least 100 paths (got {n_paths})"
        )));
    }
    if x == y {
        return Err(Error::InvalidArgument("gauge needs x ≠ y".into()));
    }
    if x >= green.len() {
        return Err(Error::VertexOutOfRange {
            vertex: x,
            count: green.len(),
        });
    }
    let walk = ConditionedWalk::new(green, w, y)?;
    let (mut sum, mut sq) = (0.0, 0.0);
    let mut steps = 0u64;
    let check_every = (n_paths / 10).max(1);
    let mut last_mean = 0.0;
    let mut growth = 0;
    for k in 0..n_paths {
        let mut rng = sampling::rng(seed, k);
        let mut v = x;
        let mut a = 0.0;
        let mut jumps = 0u64;
        loop {
            if walk.w[v] > 0.0 {
                a += walk.w[v] * sampling::exponential(&mut rng) / walk.rate[v];
            } else {
                // keep the draw so streams stay aligned across potentials
                let _ = sampling::exponential(&mut rng);
            }
            match walk.step(v, &mut rng) {
                Some(u) => v = u,
                None => break,
            }
            jumps += 1;
            if jumps > DEFAULT_STEP_CAP {
                return Err(Error::Divergence(format!(
                    "path {k} exceeded {DEFAULT_STEP_CAP} jumps"
                )));
            }
        }
        steps += jumps;
        let f = num::exp(a);
        if !f.is_finite() {
            return Err(Error::Divergence(format!(
                "path {k} has an infinite functional"
            )));
        }
        sum += f;
        sq += f * f;
        if (k + 1) % check_every == 0 {
            // a running mean that keeps jumping by orders of magnitude
            // signals a heavy tail without finite mean
            let mean = sum / (k + 1) as f64;
            if last_mean > 0.0 && mean > 10.0 * last_mean {
                growth += 1;
                if growth >= 3 {
                    return Err(Error::Divergence("running mean keeps growing".into()));
                }
            }
            last_mean = mean;
        }
    }
    let nf = n_paths as f64;
    let mean = sum / nf;
    let var = (sq / nf - mean * mean).max(0.0) * nf / (nf - 1.0);
    Ok(McEstimate {
        x,
        y,
        mean,
        std_err: num::sqrt(var / nf),
        n_paths,
        steps,
        seed,
    })
}

/// Summary of the gauge pipeline on one domain.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugeReport {
    /// `‖W‖` on the enclosing box, when one was supplied.
    pub w_norm: Option<f64>,
    pub khasminskii: Khasminskii,
    /// `sup u`, or `None` when `L − |W|` is indefinite.
    pub direct_sup: Option<f64>,
    pub mc: Vec<McEstimate>,
    pub seed: u64,
}
