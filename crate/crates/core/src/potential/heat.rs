//! Heat kernels by uniformization and the time integral of the Dirichlet
//! kernel.

use alloc::format;
use alloc::vec::Vec;

use super::stiffness;
use crate::error::{Error, Result};
use crate::linalg::{symmetric_eigen, DenseMatrix};
use crate::mmgraph::{DomainView, MetricMeasureGraph};
use crate::num;

const MAX_TERMS: usize = 2_000_000;

/// `p(t, x, y)` on a time grid, density with respect to `μ`.
#[derive(Debug, Clone)]
pub struct HeatKernelTable {
    pub times: Vec<f64>,
    pub vertices: Vec<usize>,
    pub values: Vec<DenseMatrix>,
}

impl HeatKernelTable {
    /// `p(times[t], vertices[i], vertices[j])`.
    pub fn get(&self, t: usize, i: usize, j: usize) -> f64 {
        self.values[t][(i, j)]
    }
}

/// Dirichlet heat kernel of `dom`, indexed by interior position.
pub fn heat_kernel(dom: &DomainView, times: &[f64], budget: usize) -> Result<HeatKernelTable> {
    let (k, mu) = dense_operator(dom.graph(), dom.interior(), |v| dom.local(v), budget)?;
    let values = kernel_at(&k, &mu, times)?;
    Ok(HeatKernelTable {
        times: times.to_vec(),
        vertices: dom.interior().to_vec(),
        values,
    })
}

/// Heat kernel of the whole graph with no killing.
pub fn heat_kernel_free(
    g: &MetricMeasureGraph,
    times: &[f64],
    budget: usize,
) -> Result<HeatKernelTable> {
    let all: Vec<usize> = (0..g.vertex_count()).collect();
    let (k, mu) = dense_operator(g, &all, Some, budget)?;
    let values = kernel_at(&k, &mu, times)?;
    Ok(HeatKernelTable {
        times: times.to_vec(),
        vertices: all,
        values,
    })
}

fn dense_operator(
    g: &MetricMeasureGraph,
    vertices: &[usize],
    local: impl Fn(usize) -> Option<usize>,
    budget: usize,
) -> Result<(DenseMatrix, Vec<f64>)> {
    if vertices.len() > budget {
        return Err(Error::Budget {
            what: "dense heat-kernel vertices",
            needed: vertices.len() as u64,
            budget: budget as u64,
        });
    }
    let k = stiffness(g, vertices, local, None).to_dense();
    let mu = vertices.iter().map(|&v| g.measure(v)).collect();
    Ok((k, mu))
}

/// Rate `Λ ≥ max K_ii / μ_i` and the jump matrix `P = I − M⁻¹K / Λ`.
fn uniformize(k: &DenseMatrix, mu: &[f64]) -> (f64, DenseMatrix) {
    let n = k.dim();
    let rate = (0..n)
        .map(|i| k[(i, i)] / mu[i])
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let mut p = DenseMatrix::identity(n);
    for i in 0..n {
        for j in 0..n {
            p[(i, j)] -= k[(i, j)] / (mu[i] * rate);
        }
    }
    (rate, p)
}

fn poisson_pmf(lambda: f64, terms: usize) -> Vec<f64> {
    if lambda == 0.0 {
        let mut w = alloc::vec![0.0; terms];
        w[0] = 1.0;
        return w;
    }
    let ll = num::ln(lambda);
    (0..terms)
        .map(|k| num::exp(-lambda + k as f64 * ll - num::lgamma(k as f64 + 1.0)))
        .collect()
}

fn term_count(lambda: f64) -> Result<usize> {
    let t = num::ceil(lambda + 12.0 * num::sqrt(lambda) + 30.0) as usize;
    if t > MAX_TERMS {
        return Err(Error::Budget {
            what: "uniformization terms",
            needed: t as u64,
            budget: MAX_TERMS as u64,
        });
    }
    Ok(t)
}

fn axpy(acc: &mut DenseMatrix, w: f64, m: &DenseMatrix) {
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            acc[(i, j)] += w * m[(i, j)];
        }
    }
}

/// Runs `Σ_k weights[s][k] P^k` for every weight sequence `s`.
fn power_series(p: &DenseMatrix, weights: &[Vec<f64>]) -> Vec<DenseMatrix> {
    let n = p.dim();
    let terms = weights.iter().map(Vec::len).max().unwrap_or(0);
    let mut acc: Vec<DenseMatrix> = weights.iter().map(|_| DenseMatrix::zeros(n)).collect();
    let mut power = DenseMatrix::identity(n);
    for k in 0..terms {
        for (a, w) in acc.iter_mut().zip(weights) {
            if let Some(&wk) = w.get(k) {
                if wk != 0.0 {
                    axpy(a, wk, &power);
                }
            }
        }
        if k + 1 < terms {
            power = power.matmul(p);
        }
    }
    acc
}

fn divide_columns(m: &mut DenseMatrix, mu: &[f64]) {
    let n = m.dim();
    for i in 0..n {
        for j in 0..n {
            m[(i, j)] /= mu[j];
        }
    }
}

fn kernel_at(k: &DenseMatrix, mu: &[f64], times: &[f64]) -> Result<Vec<DenseMatrix>> {
    if times.iter().any(|t| !(*t > 0.0) || !t.is_finite()) {
        return Err(Error::InvalidArgument("times must be positive".into()));
    }
    let (rate, p) = uniformize(k, mu);
    let weights = times
        .iter()
        .map(|&t| term_count(rate * t).map(|n| poisson_pmf(rate * t, n)))
        .collect::<Result<Vec<_>>>()?;
    let mut out = power_series(&p, &weights);
    for m in out.iter_mut() {
        divide_columns(m, mu);
    }
    Ok(out)
}

/// `∫_0^T p(t, x, y) dt` on the interior of a domain.
#[derive(Debug, Clone)]
pub struct HeatGreen {
    pub t_max: f64,
    pub table: DenseMatrix,
    /// Bound on `∫_T^∞ p(t, x, y) dt`, uniform over `x, y`.
    pub tail_bound: f64,
    /// Partial integrals up to `t_max · k / n_steps`, `k = 1..=n_steps`.
    pub partial: Vec<(f64, DenseMatrix)>,
    pub lambda_min: f64,
}

/// Time integral of the Dirichlet heat kernel. Each uniformization term
/// integrates in closed form: `∫_0^T e^{−Λt}(Λt)^k/k! dt = P(N_{ΛT} > k)/Λ`.
/// The tail beyond `T` is bounded by `√(p(T,x,x) p(T,y,y)) / λ₁`.
pub fn heat_green_integral(
    dom: &DomainView,
    t_max: f64,
    n_steps: usize,
    budget: usize,
) -> Result<HeatGreen> {
    if !(t_max > 0.0) || n_steps == 0 {
        return Err(Error::InvalidArgument(format!(
            "need t_max > 0 and n_steps ≥ 1 (got {t_max}, {n_steps})"
        )));
    }
    let (k, mu) = dense_operator(dom.graph(), dom.interior(), |v| dom.local(v), budget)?;
    let n = k.dim();
    let (rate, p) = uniformize(&k, &mu);
    let mut weights = Vec::with_capacity(n_steps + 1);
    for s in 1..=n_steps {
        let lambda = rate * t_max * s as f64 / n_steps as f64;
        let terms = term_count(lambda)?;
        let pmf = poisson_pmf(lambda, terms + 1);
        // survival P(N > k), summed from the far end
        let mut surv = alloc::vec![0.0; terms];
        let mut acc = 0.0;
        for j in (0..terms).rev() {
            acc += pmf[j + 1];
            surv[j] = acc / rate;
        }
        weights.push(surv);
    }
    let lt = rate * t_max;
    weights.push(poisson_pmf(lt, term_count(lt)?));
    let mut sums = power_series(&p, &weights);
    for m in sums.iter_mut() {
        divide_columns(m, &mu);
    }
    let at_t = sums.pop().unwrap();

    let mut sym = DenseMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            sym[(i, j)] = k[(i, j)] / num::sqrt(mu[i] * mu[j]);
        }
    }
    let lambda_min = symmetric_eigen(&sym).values[0];
    if !(lambda_min > 0.0) {
        return Err(Error::Degenerate(
            "Dirichlet operator has no spectral gap".into(),
        ));
    }
    let diag_max = (0..n).map(|i| at_t[(i, i)]).fold(0.0, f64::max);
    let tail_bound = diag_max / lambda_min;

    let table = sums.last().unwrap().clone();
    let partial = sums
        .into_iter()
        .enumerate()
        .map(|(s, m)| (t_max * (s + 1) as f64 / n_steps as f64, m))
        .collect();
    Ok(HeatGreen {
        t_max,
        table,
        tail_bound,
        partial,
        lambda_min,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, DEFAULT_VERTEX_BUDGET as B};
    use crate::mmgraph::MetricMode;
    use crate::potential::green_table;

    #[test]
    fn two_vertex_closed_form() {
        let c = 1.7;
        let g = MetricMeasureGraph::new(
            alloc::vec![1.0, 1.0],
            &[(0, 1, c)],
            1.0,
            MetricMode::Geodesic,
            0,
            alloc::vec![],
        )
        .unwrap();
        let times = [0.01, 0.3, 2.0];
        let hk = heat_kernel_free(&g, &times, 10).unwrap();
        for (s, &t) in times.iter().enumerate() {
            let expect = (1.0 - num::exp(-2.0 * c * t)) / 2.0;
            assert!((hk.get(s, 0, 1) - expect).abs() < 1e-12);
            assert!((hk.get(s, 0, 0) + hk.get(s, 0, 1) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn short_time_and_chapman_kolmogorov() {
        let dom = generators::path_domain(5).unwrap();
        let hk = heat_kernel(&dom, &[1e-6, 0.1, 0.2], 100).unwrap();
        assert!((hk.get(0, 1, 1) - 1.0).abs() < 1e-5);
        let n = dom.len();
        for i in 0..n {
            for j in 0..n {
                let comp: f64 = (0..n).map(|z| hk.get(1, i, z) * hk.get(1, z, j)).sum();
                assert!((comp - hk.get(2, i, j)).abs() < 1e-8);
                assert!((hk.get(1, i, j) - hk.get(1, j, i)).abs() < 1e-12);
                assert!(hk.get(1, i, j) >= 0.0);
            }
            let mass: f64 = (0..n).map(|j| hk.get(2, i, j)).sum();
            assert!(mass <= 1.0);
        }
    }

    #[test]
    fn integral_matches_green_on_path() {
        let dom = generators::path_domain(5).unwrap();
        let t = green_table(&dom, 1e-12).unwrap();
        let hg = heat_green_integral(&dom, 40.0, 8, 100).unwrap();
        assert!(hg.tail_bound < 1e-6);
        for i in 0..3 {
            for j in 0..3 {
                assert!((hg.table[(i, j)] - t.raw(i, j)).abs() < 0.01 * t.raw(i, j));
                assert!(hg.table[(i, j)] <= t.raw(i, j) + 1e-12);
            }
        }
        for w in hg.partial.windows(2) {
            assert!(w[1].1[(1, 1)] >= w[0].1[(1, 1)]);
        }
    }

    #[test]
    fn doubling_horizon_within_tail_bound() {
        let dom = generators::gen_cube_grid(2, 5, B).unwrap();
        let a = heat_green_integral(&dom, 0.3, 1, 100).unwrap();
        let b = heat_green_integral(&dom, 0.6, 1, 100).unwrap();
        for i in 0..dom.len() {
            for j in 0..dom.len() {
                let d = b.table[(i, j)] - a.table[(i, j)];
                assert!(d >= -1e-12 && d <= a.tail_bound + 1e-12);
            }
        }
    }
}
