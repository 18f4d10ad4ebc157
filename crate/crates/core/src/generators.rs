//! Example spaces: lattice boxes, slit squares, power cusps, L-shapes,
//! lattice balls and Sierpinski carpet pre-fractals, plus the classical
//! Green function of the Euclidean unit ball.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mmgraph::{DomainView, MetricMeasureGraph, MetricMode};
use crate::num;

pub const DEFAULT_VERTEX_BUDGET: usize = 200_000;

const ABSENT: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DomainKind {
    CubeGrid,
    SlitSquare,
    CuspCorridor,
    LShape,
    CarpetPrefractal,
    BallLattice,
}

/// What to generate. `resolution` is the lattice size `m` or the carpet
/// level, depending on `kind`.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainSpec {
    pub kind: DomainKind,
    pub n: usize,
    pub resolution: usize,
    /// Cusp exponent `p`.
    pub exponent: f64,
    /// Carpet cell subdivision.
    pub subdivide: usize,
    /// Carpet: use the corner copy at scale 1/9 of a level+2 carpet.
    pub subcopy: bool,
}

impl DomainSpec {
    pub fn new(kind: DomainKind, n: usize, resolution: usize) -> Self {
        Self {
            kind,
            n,
            resolution,
            exponent: 3.0,
            subdivide: 1,
            subcopy: false,
        }
    }

    pub fn generate(&self, budget: usize) -> Result<DomainView> {
        match self.kind {
            DomainKind::CubeGrid => gen_cube_grid(self.n, self.resolution, budget),
            DomainKind::SlitSquare => {
                expect_planar(self.n)?;
                gen_slit_square(self.resolution, budget)
            }
            DomainKind::CuspCorridor => {
                expect_planar(self.n)?;
                gen_cusp_corridor(self.resolution, self.exponent, budget)
            }
            DomainKind::LShape => {
                expect_planar(self.n)?;
                gen_l_shape(self.resolution, budget)
            }
            DomainKind::BallLattice => gen_ball_lattice(self.n, self.resolution, budget),
            DomainKind::CarpetPrefractal if self.subcopy => {
                gen_carpet_subcopy(self.n, self.resolution, self.subdivide, budget)
            }
            DomainKind::CarpetPrefractal => {
                gen_carpet(self.n, self.resolution, self.subdivide, budget)
            }
        }
    }
}

fn expect_planar(n: usize) -> Result<()> {
    if n == 2 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "this domain kind is planar, got n = {n}"
        )))
    }
}

fn check_budget(needed: u64, budget: usize) -> Result<()> {
    if needed > budget as u64 {
        Err(Error::Budget {
            what: "vertices",
            needed,
            budget: budget as u64,
        })
    } else {
        Ok(())
    }
}

fn checked_pow(base: u64, exp: usize) -> u64 {
    let mut acc: u64 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base);
    }
    acc
}

/// A box lattice `∏ [0, extents_i)` with a subset of kept sites.
struct Lattice {
    extents: Vec<usize>,
    ids: Vec<u32>,
}

impl Lattice {
    fn sites(&self) -> usize {
        self.extents.iter().product()
    }

    fn decode(&self, mut flat: usize, idx: &mut [usize]) {
        for (a, e) in idx.iter_mut().zip(&self.extents) {
            *a = flat % e;
            flat /= e;
        }
    }

    fn encode(&self, idx: &[usize]) -> usize {
        let mut flat = 0;
        for (a, e) in idx.iter().zip(&self.extents).rev() {
            flat = flat * e + a;
        }
        flat
    }

    fn id(&self, idx: &[usize]) -> Option<usize> {
        match self.ids[self.encode(idx)] {
            ABSENT => None,
            v => Some(v as usize),
        }
    }
}

/// Builds the face-adjacency graph of the kept lattice sites with unit
/// conductances. Coordinates are `origin + (idx + shift)·h`.
fn lattice_graph(
    extents: &[usize],
    origin: &[f64],
    shift: f64,
    h: f64,
    measure: f64,
    mode: MetricMode,
    keep: impl Fn(&[usize]) -> bool,
) -> Result<(MetricMeasureGraph, Lattice)> {
    let n = extents.len();
    let mut lat = Lattice {
        extents: extents.to_vec(),
        ids: Vec::new(),
    };
    let sites = lat.sites();
    lat.ids = vec![ABSENT; sites];
    let mut idx = vec![0usize; n];
    let mut coords = Vec::new();
    let mut count = 0u32;
    for flat in 0..sites {
        lat.decode(flat, &mut idx);
        if keep(&idx) {
            lat.ids[flat] = count;
            count += 1;
            for d in 0..n {
                coords.push(origin[d] + (idx[d] as f64 + shift) * h);
            }
        }
    }
    let mut edges = Vec::new();
    for flat in 0..sites {
        let Some(v) = lat.id_flat(flat) else { continue };
        lat.decode(flat, &mut idx);
        for d in 0..n {
            if idx[d] + 1 < extents[d] {
                idx[d] += 1;
                if let Some(w) = lat.id(&idx) {
                    edges.push((v, w, 1.0));
                }
                idx[d] -= 1;
            }
        }
    }
    let g = MetricMeasureGraph::new(vec![measure; count as usize], &edges, h, mode, n, coords)?;
    Ok((g, lat))
}

impl Lattice {
    fn id_flat(&self, flat: usize) -> Option<usize> {
        match self.ids[flat] {
            ABSENT => None,
            v => Some(v as usize),
        }
    }
}

/// `[0,1]^n` sampled at `(m+1)^n` sites, `h = 1/m`, `μ = h^n`. `D` is the
/// strict interior.
pub fn gen_cube_grid(n: usize, m: usize, budget: usize) -> Result<DomainView> {
    if n == 0 || m < 2 {
        return Err(Error::InvalidArgument(format!(
            "cube grid needs n ≥ 1, m ≥ 2 (got n={n}, m={m})"
        )));
    }
    check_budget(checked_pow(m as u64 + 1, n), budget)?;
    let h = 1.0 / m as f64;
    let extents = vec![m + 1; n];
    let origin = vec![0.0; n];
    let (g, lat) = lattice_graph(
        &extents,
        &origin,
        0.0,
        h,
        num::powi(h, n as i32),
        MetricMode::Geodesic,
        |_| true,
    )?;
    let interior = interior_sites(&lat, |idx| idx.iter().all(|&a| a > 0 && a < m));
    DomainView::new(Arc::new(g), interior)
}

fn interior_sites(lat: &Lattice, pred: impl Fn(&[usize]) -> bool) -> Vec<usize> {
    let mut idx = vec![0; lat.extents.len()];
    let mut out = Vec::new();
    for flat in 0..lat.sites() {
        if let Some(v) = lat.id_flat(flat) {
            lat.decode(flat, &mut idx);
            if pred(&idx) {
                out.push(v);
            }
        }
    }
    out
}

/// The `n`-vertex path with `h = 1`, `μ ≡ 1`, unit conductances and the two
/// endpoints as boundary.
pub fn path_domain(n: usize) -> Result<DomainView> {
    if n < 3 {
        return Err(Error::InvalidArgument(
            "path needs at least 3 vertices".into(),
        ));
    }
    let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1, 1.0)).collect();
    let coords = (0..n).map(|i| i as f64).collect();
    let g = MetricMeasureGraph::new(vec![1.0; n], &edges, 1.0, MetricMode::Geodesic, 1, coords)?;
    DomainView::new(Arc::new(g), (1..n - 1).collect())
}

/// Square lattice with `side` vertices per axis and spacing `h`; every
/// vertex off the outer shell is interior.
pub fn square_lattice(side: usize, h: f64) -> Result<DomainView> {
    let (g, lat) = lattice_graph(
        &[side, side],
        &[0.0, 0.0],
        0.0,
        h,
        h * h,
        MetricMode::Geodesic,
        |_| true,
    )?;
    let interior = interior_sites(&lat, |idx| idx.iter().all(|&a| a > 0 && a + 1 < side));
    DomainView::new(Arc::new(g), interior)
}

/// Unit square minus the horizontal slit from the center to the right
/// wall. Slit sites are doubled into an upper and a lower copy (both on
/// `∂D`); the tip at the center stays interior. Euclidean metric.
pub fn gen_slit_square(m: usize, budget: usize) -> Result<DomainView> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "slit square needs even m ≥ 4, got {m}"
        )));
    }
    let side = m + 1;
    let c = m / 2;
    let slit = c + 1..m;
    let extra = slit.len();
    check_budget((side * side + extra) as u64, budget)?;
    let h = 1.0 / m as f64;
    let id = |i: usize, j: usize| j * side + i;
    let lower = |i: usize| side * side + (i - c - 1);
    let on_slit = |i: usize| i > c && i < m;

    let mut coords = Vec::with_capacity(2 * (side * side + extra));
    for j in 0..side {
        for i in 0..side {
            coords.push(i as f64 * h);
            coords.push(j as f64 * h);
        }
    }
    for i in slit.clone() {
        coords.push(i as f64 * h);
        coords.push(c as f64 * h);
    }
    let mut edges = Vec::new();
    for j in 0..side {
        for i in 0..side {
            if i + 1 < side {
                edges.push((id(i, j), id(i + 1, j), 1.0));
            }
            if j + 1 < side {
                // the edge below a slit site attaches to its lower copy
                if j + 1 == c && on_slit(i) {
                    edges.push((id(i, j), lower(i), 1.0));
                } else {
                    edges.push((id(i, j), id(i, j + 1), 1.0));
                }
            }
        }
    }
    for i in slit.clone() {
        let left = if i == c + 1 { id(c, c) } else { lower(i - 1) };
        edges.push((left, lower(i), 1.0));
    }
    edges.push((lower(m - 1), id(m, c), 1.0));

    let count = side * side + extra;
    let g = MetricMeasureGraph::new(
        vec![h * h; count],
        &edges,
        h,
        MetricMode::Euclidean,
        2,
        coords,
    )?;
    let mut interior = Vec::new();
    for j in 1..m {
        for i in 1..m {
            if !(j == c && on_slit(i)) {
                interior.push(id(i, j));
            }
        }
    }
    DomainView::new(Arc::new(g), interior)
}

/// Power cusp `{0 < x < 1, |y| < x^p}` cut from the lattice on
/// `[0,1]×[−1,1]` with `h = 1/m`. Near the tip only the axis `y = 0`
/// survives, so the domain thins to a one-site corridor.
pub fn gen_cusp_corridor(m: usize, p: f64, budget: usize) -> Result<DomainView> {
    if m < 2 || !(p >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "cusp needs m ≥ 2 and p ≥ 1 (got m={m}, p={p})"
        )));
    }
    check_budget(((m + 1) * (2 * m + 1)) as u64, budget)?;
    let h = 1.0 / m as f64;
    let (g, lat) = lattice_graph(
        &[m + 1, 2 * m + 1],
        &[0.0, -1.0],
        0.0,
        h,
        h * h,
        MetricMode::Geodesic,
        |_| true,
    )?;
    let interior = interior_sites(&lat, |idx| {
        let x = idx[0] as f64 * h;
        let y = (idx[1] as f64 - m as f64) * h;
        idx[0] > 0 && idx[0] < m && num::abs(y) < num::powf(x, p)
    });
    DomainView::new(Arc::new(g), interior)
}

/// Unit square with the closed upper-right quarter removed.
pub fn gen_l_shape(m: usize, budget: usize) -> Result<DomainView> {
    if m < 4 || !m.is_multiple_of(2) {
        return Err(Error::InvalidArgument(format!(
            "L-shape needs even m ≥ 4, got {m}"
        )));
    }
    check_budget(((m + 1) * (m + 1)) as u64, budget)?;
    let h = 1.0 / m as f64;
    let c = m / 2;
    let (g, lat) = lattice_graph(
        &[m + 1, m + 1],
        &[0.0, 0.0],
        0.0,
        h,
        h * h,
        MetricMode::Geodesic,
        |_| true,
    )?;
    let interior = interior_sites(&lat, |idx| {
        idx.iter().all(|&a| a > 0 && a < m) && !(idx[0] >= c && idx[1] >= c)
    });
    DomainView::new(Arc::new(g), interior)
}

/// Lattice points of the open unit ball of `R^n`, `h = 1/m`.
pub fn gen_ball_lattice(n: usize, m: usize, budget: usize) -> Result<DomainView> {
    if n == 0 || m < 2 {
        return Err(Error::InvalidArgument(format!(
            "ball lattice needs n ≥ 1, m ≥ 2 (got n={n}, m={m})"
        )));
    }
    check_budget(checked_pow(2 * m as u64 + 1, n), budget)?;
    let h = 1.0 / m as f64;
    let (g, lat) = lattice_graph(
        &vec![2 * m + 1; n],
        &vec![-1.0; n],
        0.0,
        h,
        num::powi(h, n as i32),
        MetricMode::Geodesic,
        |_| true,
    )?;
    let interior = interior_sites(&lat, |idx| {
        let r2: f64 = idx
            .iter()
            .map(|&a| {
                let x = (a as f64 - m as f64) * h;
                x * x
            })
            .sum();
        r2 < 1.0 - 1e-12
    });
    DomainView::new(Arc::new(g), interior)
}

/// Whether a level-`level` cell survives the carpet construction.
fn carpet_retained(idx: &[usize], level: usize) -> bool {
    let mut scale = 1;
    for _ in 0..level {
        if idx.iter().all(|&a| (a / scale) % 3 == 1) {
            return false;
        }
        scale *= 3;
    }
    true
}

fn carpet_graph(
    n: usize,
    level: usize,
    subdivide: usize,
    budget: usize,
) -> Result<(MetricMeasureGraph, Lattice, usize)> {
    if !(2..=3).contains(&n) {
        return Err(Error::InvalidArgument(format!(
            "carpet needs n ∈ {{2, 3}}, got {n}"
        )));
    }
    if subdivide == 0 {
        return Err(Error::InvalidArgument("subdivide must be ≥ 1".into()));
    }
    let cells = checked_pow(checked_pow(3, n) - 1, level);
    check_budget(
        cells.saturating_mul(checked_pow(subdivide as u64, n)),
        budget,
    )?;
    let side = checked_pow(3, level) as usize * subdivide;
    let h = 1.0 / side as f64;
    let mu = num::powi((checked_pow(3, n) - 1) as f64, -(level as i32))
        / num::powi(subdivide as f64, n as i32);
    let (g, lat) = lattice_graph(
        &vec![side; n],
        &vec![0.0; n],
        0.5,
        h,
        mu,
        MetricMode::Geodesic,
        |idx| {
            let mut cell = [0usize; 3];
            for (c, a) in cell.iter_mut().zip(idx) {
                *c = a / subdivide;
            }
            carpet_retained(&cell[..n], level)
        },
    )?;
    Ok((g, lat, side))
}

/// Carpet pre-fractal `F_level` in `[0,1]^n`, one vertex per retained cell
/// (optionally split into `subdivide^n` subcells). `∂D` is the set of cells
/// touching the faces `{x_i = 1}`; `D` is everything else.
pub fn gen_carpet(n: usize, level: usize, subdivide: usize, budget: usize) -> Result<DomainView> {
    if level == 0 {
        return Err(Error::InvalidArgument(
            "carpet domain needs level ≥ 1".into(),
        ));
    }
    let (g, lat, side) = carpet_graph(n, level, subdivide, budget)?;
    let touches_face = |idx: &[usize]| idx.iter().any(|&a| a + 1 == side);
    let interior = interior_sites(&lat, |idx| !touches_face(idx));
    let boundary = interior_sites(&lat, touches_face);
    DomainView::with_boundary(Arc::new(g), interior, boundary)
}

/// The corner copy `[0, 1/9)^n` of a level `level + 2` carpet, so the
/// domain sits well inside the ambient carpet. `∂D` is the set of ambient
/// cells adjacent to the copy.
pub fn gen_carpet_subcopy(
    n: usize,
    level: usize,
    subdivide: usize,
    budget: usize,
) -> Result<DomainView> {
    let (g, lat, side) = carpet_graph(n, level + 2, subdivide, budget)?;
    let ninth = side / 9;
    let interior = interior_sites(&lat, |idx| idx.iter().all(|&a| a < ninth));
    DomainView::new(Arc::new(g), interior)
}

/// Hausdorff dimension `log(3^n − 1)/log 3` of the `n`-dimensional carpet.
pub fn hausdorff_dimension(n: usize) -> f64 {
    num::ln(num::powi(3.0, n as i32) - 1.0) / num::ln(3.0)
}

/// A lattice box around a lattice-embedded domain, `factor` times its
/// linear size, with the same spacing. Returns the box domain and, for
/// each interior vertex of `dom` (in interior order), the matching box
/// vertex.
pub fn enclosing_box(
    dom: &DomainView,
    factor: f64,
    budget: usize,
) -> Result<(DomainView, Vec<usize>)> {
    let g = dom.graph();
    let n = g.dim();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "enclosing box needs coordinates".into(),
        ));
    }
    if !(factor >= 1.0) {
        return Err(Error::InvalidArgument(format!(
            "enclosure factor must be ≥ 1, got {factor}"
        )));
    }
    let h = g.mesh();
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for &v in dom.interior().iter().chain(dom.boundary()) {
        for (d, &x) in g.coords(v).unwrap().iter().enumerate() {
            lo[d] = lo[d].min(x);
            hi[d] = hi[d].max(x);
        }
    }
    let width = (0..n).map(|d| hi[d] - lo[d]).fold(0.0, f64::max);
    let pad = num::ceil((factor - 1.0) * width / (2.0 * h) - 1e-9).max(1.0) as usize;
    let mut extents = Vec::with_capacity(n);
    let mut origin = Vec::with_capacity(n);
    let mut needed: u64 = 1;
    for d in 0..n {
        let cells = num::round((hi[d] - lo[d]) / h) as usize;
        let e = cells + 2 * pad + 1;
        needed = needed.saturating_mul(e as u64);
        extents.push(e);
        origin.push(lo[d] - pad as f64 * h);
    }
    check_budget(needed, budget)?;
    let (bg, lat) = lattice_graph(
        &extents,
        &origin,
        0.0,
        h,
        num::powi(h, n as i32),
        MetricMode::Geodesic,
        |_| true,
    )?;
    let interior = interior_sites(&lat, |idx| {
        idx.iter().zip(&extents).all(|(&a, &e)| a > 0 && a + 1 < e)
    });
    let mut map = Vec::with_capacity(dom.len());
    let mut idx = vec![0; n];
    for &v in dom.interior() {
        for (d, &x) in g.coords(v).unwrap().iter().enumerate() {
            let t = (x - origin[d]) / h;
            let r = num::round(t);
            if num::abs(t - r) > 1e-6 {
                return Err(Error::InvalidArgument(
                    "domain is not on a lattice of its mesh".into(),
                ));
            }
            idx[d] = r as usize;
        }
        map.push(lat.id(&idx).unwrap());
    }
    Ok((DomainView::new(Arc::new(bg), interior)?, map))
}

/// Green function of the unit ball in `R^n`, `n ≥ 3`, normalized so that
/// `−Δ G(·, y) = δ_y`.
pub fn analytic_ball_green(n: usize, x: &[f64], y: &[f64]) -> Result<f64> {
    if n < 3 || x.len() != n || y.len() != n {
        return Err(Error::InvalidArgument(format!(
            "ball Green function needs n ≥ 3 and points in R^{n}"
        )));
    }
    let norm = |v: &[f64]| num::sqrt(v.iter().map(|a| a * a).sum());
    let (nx, ny) = (norm(x), norm(y));
    if nx > 1.0 || ny > 1.0 {
        return Err(Error::InvalidArgument(
            "point outside the closed unit ball".into(),
        ));
    }
    let dxy = num::sqrt(x.iter().zip(y).map(|(a, b)| (a - b) * (a - b)).sum());
    if dxy == 0.0 {
        return Err(Error::InvalidArgument("x = y".into()));
    }
    let e = 2.0 - n as f64;
    let cn = 1.0 / (n as f64 * (n as f64 - 2.0) * num::unit_ball_volume(n));
    if ny == 0.0 {
        return Ok(cn * (num::powf(nx, e) - 1.0));
    }
    let inv = 1.0 / (ny * ny);
    let reflected = num::sqrt(
        x.iter()
            .zip(y)
            .map(|(a, b)| (a - b * inv) * (a - b * inv))
            .sum(),
    );
    Ok(cn * (num::powf(dxy, e) - num::powf(ny * reflected, e)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampling;

    const B: usize = DEFAULT_VERTEX_BUDGET;

    #[test]
    fn cube_grid_counts() {
        let d1 = gen_cube_grid(1, 4, B).unwrap();
        assert_eq!(d1.interior(), &[1, 2, 3]);
        assert_eq!(d1.boundary(), &[0, 4]);
        let d2 = gen_cube_grid(2, 4, B).unwrap();
        assert_eq!((d2.graph().vertex_count(), d2.len()), (25, 9));
        let d3 = gen_cube_grid(3, 4, B).unwrap();
        assert_eq!((d3.graph().vertex_count(), d3.len()), (125, 27));
        assert!(matches!(
            gen_cube_grid(3, 100, B),
            Err(Error::Budget { .. })
        ));
    }

    #[test]
    fn grid_center_boundary_distance() {
        let d = gen_cube_grid(2, 16, B).unwrap();
        let center = 8 * 17 + 8;
        assert!((d.boundary_distance(center).unwrap() - 0.5).abs() < 1e-15);
        assert_eq!(d.basepoint(), center);
    }

    #[test]
    fn carpet_counts() {
        assert_eq!(gen_carpet(2, 1, 1, B).unwrap().graph().vertex_count(), 8);
        assert_eq!(gen_carpet(2, 2, 1, B).unwrap().graph().vertex_count(), 64);
        let d3 = gen_carpet(3, 2, 1, B).unwrap();
        assert_eq!(d3.graph().vertex_count(), 676);
        assert_eq!(gen_carpet(2, 2, 2, B).unwrap().graph().vertex_count(), 256);
        let total: f64 = gen_carpet(2, 3, 1, B).unwrap().graph().total_measure();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn carpet_subcopy_is_small_corner() {
        let d = gen_carpet_subcopy(2, 1, 1, B).unwrap();
        assert_eq!(d.graph().vertex_count(), 512);
        assert_eq!(d.len(), 8);
    }

    #[test]
    fn hausdorff_values() {
        assert!((hausdorff_dimension(2) - 1.892789).abs() < 1e-6);
        assert!((hausdorff_dimension(3) - 2.965647).abs() < 1e-6);
        assert!(hausdorff_dimension(3) > hausdorff_dimension(2));
    }

    #[test]
    fn slit_straddling_ratio() {
        let m = 16;
        let d = gen_slit_square(m, B).unwrap();
        let side = m + 1;
        let c = m / 2;
        let above = (c + 1) * side + (c + 4);
        let below = (c - 1) * side + (c + 4);
        let di = d.intrinsic_distance(above, below).unwrap();
        let de = d.graph().distance(above, below);
        assert!(di / de > 2.0, "{di} / {de}");
        // the tip is interior and touches the boundary
        assert!(d.contains(c * side + c));
    }

    #[test]
    fn slit_boundary_linear() {
        let b16 = gen_slit_square(16, B).unwrap().boundary().len();
        let b32 = gen_slit_square(32, B).unwrap().boundary().len();
        // the wall site at the slit mouth only touches slit copies
        assert_eq!(b16, 4 * 15 - 1 + 2 * 7);
        assert_eq!(b32, 4 * 31 - 1 + 2 * 15);
    }

    #[test]
    fn cusp_tip_is_corridor() {
        let m = 32;
        let d = gen_cusp_corridor(m, 3.0, B).unwrap();
        let id = |i: usize, j: usize| j * (m + 1) + i;
        assert!(d.contains(id(1, m)));
        assert!(!d.contains(id(1, m + 1)));
        assert!(d.contains(id(m - 1, m + m / 2)));
    }

    #[test]
    fn analytic_ball_anchor() {
        let x = [0.5, 0.0, 0.0];
        let o = [0.0; 3];
        let v = analytic_ball_green(3, &x, &o).unwrap();
        assert!((v - 1.0 / (4.0 * num::PI)).abs() < 1e-12);
        let mut prev = f64::INFINITY;
        for k in 1..100 {
            let r = k as f64 / 100.0;
            let v = analytic_ball_green(3, &[r, 0.0, 0.0], &o).unwrap();
            assert!(v < prev && v > 0.0);
            prev = v;
        }
        assert!(analytic_ball_green(3, &[1.0, 0.0, 0.0], &o).unwrap().abs() < 1e-15);
        assert!(analytic_ball_green(3, &x, &x).is_err());
        assert!(analytic_ball_green(3, &[1.5, 0.0, 0.0], &o).is_err());
    }

    #[test]
    fn analytic_ball_symmetric() {
        let mut r = sampling::rng(11, 0);
        let (mut a, mut b) = ([0.0; 3], [0.0; 3]);
        for _ in 0..10 {
            sampling::point_in_unit_ball(&mut r, 3, &mut a);
            sampling::point_in_unit_ball(&mut r, 3, &mut b);
            let gab = analytic_ball_green(3, &a, &b).unwrap();
            let gba = analytic_ball_green(3, &b, &a).unwrap();
            assert!((gab - gba).abs() <= 1e-12 * gab.max(1.0));
            assert!(gab > 0.0);
        }
    }

    #[test]
    fn enclosing_box_maps_interior() {
        let d = gen_cube_grid(2, 8, B).unwrap();
        let (bx, map) = enclosing_box(&d, 3.0, B).unwrap();
        assert_eq!(map.len(), d.len());
        assert_eq!(bx.graph().vertex_count(), 25 * 25);
        for (l, &v) in d.interior().iter().enumerate() {
            assert_eq!(d.graph().coords(v), bx.graph().coords(map[l]));
        }
    }
}
