//! Dirichlet forms on graphs: Green tables, heat kernels, capacities and
//! scale profiles.
//!
//! The generator is `(L f)(x) = μ(x)⁻¹ Σ_y c_xy (f(x) − f(y))` and the
//! energy is `E(f, f) = Σ_edges c_xy (f(x) − f(y))²`. Green functions are
//! kernels with respect to `μ`, so on `D` the table is the inverse of the
//! stiffness matrix `K = μ L`.

mod heat;
mod profiles;

pub use heat::{heat_green_integral, heat_kernel, heat_kernel_free, HeatGreen, HeatKernelTable};
pub use profiles::{
    capacity, exit_time_profile, phi_from_psi, poincare_profile, ScaleData, ScaleSample,
};

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{pcg, CsrMatrix, DenseMatrix};
use crate::mmgraph::{DomainView, MetricMeasureGraph};
use crate::num;

pub const DEFAULT_TOL: f64 = 1e-10;
pub const DEFAULT_DENSE_BUDGET: usize = 2_500;

/// Energy `E(f, f)` of a function on all vertices.
pub fn energy(g: &MetricMeasureGraph, f: &[f64]) -> f64 {
    g.edges()
        .map(|(i, j, c)| c * (f[i] - f[j]) * (f[i] - f[j]))
        .sum()
}

/// `(L f)(x)` for every vertex.
pub fn apply_generator(g: &MetricMeasureGraph, f: &[f64]) -> Vec<f64> {
    (0..g.vertex_count())
        .map(|x| g.neighbors(x).map(|(y, c)| c * (f[x] - f[y])).sum::<f64>() / g.measure(x))
        .collect()
}

/// Stiffness matrix `K` of `vertices` with zero boundary values outside,
/// plus `extra` on the diagonal. Row `i` refers to `vertices[i]`.
pub(crate) fn stiffness(
    g: &MetricMeasureGraph,
    vertices: &[usize],
    local: impl Fn(usize) -> Option<usize>,
    extra: Option<&[f64]>,
) -> CsrMatrix {
    let rows = vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let mut row = Vec::with_capacity(g.degree(v) + 1);
            let mut diag = extra.map_or(0.0, |e| e[i]);
            for (w, c) in g.neighbors(v) {
                diag += c;
                if let Some(j) = local(w) {
                    row.push((j, -c));
                }
            }
            row.push((i, diag));
            row
        })
        .collect();
    CsrMatrix::from_rows(rows)
}

/// Green function values on `D × D`, indexed by interior position.
///
/// The raw table solves `K G(·, y) = e_y`. Checkers read the rescaled table
/// `G(x, y) / G(o, o)`, which has `G(o, o) = 1` and so a benchmark
/// `g = 1 ∧ G(·, o)` with `g(o) = 1`; ratio-type constants do not see the
/// rescaling.
#[derive(Debug, Clone)]
pub struct GreenTable {
    domain: DomainView,
    n: usize,
    raw: Vec<f64>,
    scale: f64,
    benchmark: Vec<f64>,
    tol: f64,
    max_residual: f64,
    defect: f64,
}

impl GreenTable {
    fn from_raw(domain: DomainView, raw: Vec<f64>, tol: f64, max_residual: f64) -> Self {
        let n = domain.len();
        let o = domain.basepoint_local();
        let scale = 1.0 / raw[o * n + o];
        let benchmark = (0..n).map(|i| (raw[i * n + o] * scale).min(1.0)).collect();
        Self {
            domain,
            n,
            raw,
            scale,
            benchmark,
            tol,
            max_residual,
            defect: 0.0,
        }
    }

    pub fn domain(&self) -> &DomainView {
        &self.domain
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Unscaled `G(x, y)` by interior position.
    #[inline]
    pub fn raw(&self, i: usize, j: usize) -> f64 {
        self.raw[i * self.n + j]
    }

    /// Rescaled `G(x, y)` by interior position.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.raw[i * self.n + j] * self.scale
    }

    /// Benchmark `g(x) = 1 ∧ G(x, o)`.
    #[inline]
    pub fn benchmark(&self, i: usize) -> f64 {
        self.benchmark[i]
    }

    /// `G̃(x, y) = G(x, y) / (g(x) g(y))`.
    #[inline]
    pub fn normalized(&self, i: usize, j: usize) -> f64 {
        self.get(i, j) / (self.benchmark[i] * self.benchmark[j])
    }

    /// Factor applied to the raw table, `1 / G_raw(o, o)`.
    pub fn scale_factor(&self) -> f64 {
        self.scale
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn max_residual(&self) -> f64 {
        self.max_residual
    }

    /// `max |G(x,y) − G(y,x)| / max G` of the solved columns, before the
    /// table was symmetrized.
    pub fn symmetry_defect(&self) -> f64 {
        self.defect
    }

    /// The same table with raw values multiplied by `lambda`.
    pub fn rescaled(&self, lambda: f64) -> Self {
        let raw = self.raw.iter().map(|v| v * lambda).collect();
        let mut t = Self::from_raw(self.domain.clone(), raw, self.tol, self.max_residual);
        t.defect = self.defect;
        t
    }

    /// Records the solver tolerance of a table read back from disk; later
    /// solves on the same domain reuse it.
    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    /// Builds a table from raw values, row-major by interior position.
    pub fn from_values(domain: DomainView, raw: Vec<f64>) -> Result<Self> {
        if raw.len() != domain.len() * domain.len() {
            return Err(Error::InvalidArgument(format!(
                "expected {} values, got {}",
                domain.len() * domain.len(),
                raw.len()
            )));
        }
        if raw.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(Error::InvalidArgument(
                "Green values must be positive and finite".into(),
            ));
        }
        Ok(Self::from_raw(domain, raw, 0.0, 0.0))
    }
}

/// Green table of `dom`.
///
/// Domains within [`DEFAULT_DENSE_BUDGET`] are factored densely. The
/// stiffness matrix is an M-matrix, so triangular solves against `e_y`
/// never cancel and even the `1e-20`-sized entries down a thin cusp come
/// out positive. Larger domains use one preconditioned CG solve per column,
/// which only resolves entries down to about `tol` times the column maximum.
pub fn green_table(dom: &DomainView, tol: f64) -> Result<GreenTable> {
    solve_columns(dom, None, tol)
}

/// Green table of `L + W` on `dom`; `w` is indexed by interior position.
/// Identical to [`green_table`] when `w ≡ 0`. Potentials with negative
/// entries are checked for positive definiteness by a dense factorization
/// when the domain fits the dense budget.
pub fn schrodinger_green(dom: &DomainView, w: &[f64], tol: f64) -> Result<GreenTable> {
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
    if w.iter().all(|&v| v == 0.0) {
        return solve_columns(dom, None, tol);
    }
    let g = dom.graph();
    let extra: Vec<f64> = dom
        .interior()
        .iter()
        .zip(w)
        .map(|(&v, &wv)| wv * g.measure(v))
        .collect();
    solve_columns(dom, Some(&extra), tol)
}

fn solve_columns(dom: &DomainView, extra: Option<&[f64]>, tol: f64) -> Result<GreenTable> {
    if !(tol > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let n = dom.len();
    let k = stiffness(dom.graph(), dom.interior(), |v| dom.local(v), extra);
    let mut raw = vec![0.0; n * n];
    let mut e = vec![0.0; n];
    let mut worst: f64 = 0.0;
    if n <= DEFAULT_DENSE_BUDGET {
        let chol = k.to_dense().cholesky().map_err(|_| Error::Indefinite)?;
        let mut ax = vec![0.0; n];
        for j in 0..n {
            e[j] = 1.0;
            let x = chol.solve(&e);
            k.mul_into(&x, &mut ax);
            let res = num::sqrt(
                ax.iter()
                    .zip(&e)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>(),
            );
            worst = worst.max(res);
            e[j] = 0.0;
            for (i, v) in x.into_iter().enumerate() {
                raw[i * n + j] = v;
            }
        }
    } else {
        let max_iter = 20 * n + 200;
        for j in 0..n {
            e[j] = 1.0;
            let sol = pcg(&k, &e, tol, max_iter)?;
            e[j] = 0.0;
            worst = worst.max(sol.relative_residual);
            for (i, v) in sol.x.into_iter().enumerate() {
                raw[i * n + j] = v;
            }
        }
    }
    if raw.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::Indefinite);
    }
    let defect = symmetrize(&mut raw, n);
    let mut table = GreenTable::from_raw(dom.clone(), raw, tol, worst);
    table.defect = defect;
    Ok(table)
}

/// Replaces `G` by `(G + Gᵀ)/2` and returns the relative defect it removed.
fn symmetrize(raw: &mut [f64], n: usize) -> f64 {
    let mut worst: f64 = 0.0;
    let top = raw.iter().copied().fold(0.0, f64::max);
    for i in 0..n {
        for j in i + 1..n {
            let (a, b) = (raw[i * n + j], raw[j * n + i]);
            worst = worst.max((a - b).abs());
            let m = 0.5 * (a + b);
            raw[i * n + j] = m;
            raw[j * n + i] = m;
        }
    }
    worst / top
}

/// Dense reference inverse `K⁻¹` by Cholesky, row-major by interior position.
pub fn dense_green(dom: &DomainView) -> Result<DenseMatrix> {
    if dom.len() > DEFAULT_DENSE_BUDGET {
        return Err(Error::Budget {
            what: "dense unknowns",
            needed: dom.len() as u64,
            budget: DEFAULT_DENSE_BUDGET as u64,
        });
    }
    let k = stiffness(dom.graph(), dom.interior(), |v| dom.local(v), None);
    Ok(k.to_dense().cholesky()?.inverse())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, DEFAULT_VERTEX_BUDGET as B};

    #[test]
    fn path_closed_form() {
        let dom = generators::path_domain(5).unwrap();
        let t = green_table(&dom, 1e-12).unwrap();
        for i in 1..4 {
            for j in 1..4 {
                let (a, b) = (i.min(j) as f64, i.max(j) as f64);
                assert!((t.raw(i - 1, j - 1) - a * (4.0 - b) / 4.0).abs() < 1e-12);
            }
        }
        assert_eq!(dom.basepoint(), 2);
        assert!((t.scale_factor() - 1.0).abs() < 1e-12);
        assert!((t.benchmark(1) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn matches_dense_and_is_harmonic() {
        let dom = generators::gen_cube_grid(2, 8, B).unwrap();
        let t = green_table(&dom, 1e-12).unwrap();
        let d = dense_green(&dom).unwrap();
        let n = dom.len();
        for i in 0..n {
            for j in 0..n {
                assert!((t.raw(i, j) - d[(i, j)]).abs() < 1e-9 * d[(i, j)]);
            }
        }
        assert!(t.symmetry_defect() < 1e-10);
        let g = dom.graph();
        let y = 10;
        let mut f = vec![0.0; g.vertex_count()];
        for (i, &v) in dom.interior().iter().enumerate() {
            f[v] = t.raw(i, y);
        }
        let lf = apply_generator(g, &f);
        for (i, &v) in dom.interior().iter().enumerate() {
            let expect = if i == y { 1.0 / g.measure(v) } else { 0.0 };
            assert!((lf[v] - expect).abs() < 1e-8 / g.measure(v));
        }
        assert!((0..n).all(|i| t.benchmark(i) > 0.0 && t.benchmark(i) <= 1.0));
        assert_eq!(t.benchmark(dom.basepoint_local()), 1.0);
    }

    #[test]
    fn schrodinger_zero_is_identical() {
        let dom = generators::gen_cube_grid(2, 6, B).unwrap();
        let a = green_table(&dom, 1e-10).unwrap();
        let b = schrodinger_green(&dom, &vec![0.0; dom.len()], 1e-10).unwrap();
        assert_eq!(a.raw, b.raw);
    }

    #[test]
    fn schrodinger_positive_decreases_and_negative_fails() {
        let dom = generators::gen_cube_grid(2, 6, B).unwrap();
        let a = green_table(&dom, 1e-12).unwrap();
        let b = schrodinger_green(&dom, &vec![5.0; dom.len()], 1e-12).unwrap();
        let n = dom.len();
        for i in 0..n * n {
            assert!(b.raw[i] < a.raw[i]);
        }
        let err = schrodinger_green(&dom, &vec![-1e4; dom.len()], 1e-10).unwrap_err();
        assert_eq!(err, Error::Indefinite);
    }

    #[test]
    fn domain_monotonicity() {
        let big = generators::gen_cube_grid(2, 8, B).unwrap();
        let g = big.graph_arc().clone();
        let sub: Vec<usize> = big
            .interior()
            .iter()
            .copied()
            .filter(|&v| v % 9 < 5)
            .collect();
        let small = DomainView::new(g, sub).unwrap();
        let tb = green_table(&big, 1e-12).unwrap();
        let ts = green_table(&small, 1e-12).unwrap();
        for (i, &x) in small.interior().iter().enumerate() {
            for (j, &y) in small.interior().iter().enumerate() {
                let (bi, bj) = (big.local(x).unwrap(), big.local(y).unwrap());
                assert!(ts.raw(i, j) <= tb.raw(bi, bj) + 1e-12);
            }
        }
    }

    #[test]
    fn rescaling_keeps_normalized_table() {
        let dom = generators::gen_cube_grid(2, 6, B).unwrap();
        let a = green_table(&dom, 1e-12).unwrap();
        let b = a.rescaled(7.0);
        for i in 0..a.len() {
            for j in 0..a.len() {
                assert!((a.get(i, j) - b.get(i, j)).abs() < 1e-12 * a.get(i, j));
            }
        }
    }
}
