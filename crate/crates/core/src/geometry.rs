//! Inner-uniform curves, corkscrew points, the reference sets `B(x, y)`,
//! Harnack chains and relatively connected annuli.
//!
//! Everything here measures distance with the intrinsic metric `d_i` of the
//! domain (shortest paths through `D`) and `δ = d_i(·, ∂D)`.

use alloc::collections::{BinaryHeap, VecDeque};
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::mmgraph::{sorted_shells, DomainView, HeapItem, MetricMeasureGraph};
use crate::num;
use crate::sampling;

/// Upper limit on `|D|² + |D|·|∂D|` stored distances.
pub const DEFAULT_PAIR_BUDGET: u64 = 40_000_000;

/// All intrinsic distances of a domain, indexed by interior position.
#[derive(Debug, Clone)]
pub struct DomainGeometry {
    dom: DomainView,
    n: usize,
    dist: Vec<f64>,
    bdist: Vec<f64>,
    delta: Vec<f64>,
}

impl DomainGeometry {
    pub fn new(dom: &DomainView) -> Result<Self> {
        Self::with_budget(dom, DEFAULT_PAIR_BUDGET)
    }

    pub fn with_budget(dom: &DomainView, budget: u64) -> Result<Self> {
        let n = dom.len();
        let nb = dom.boundary().len();
        let needed = (n as u64) * (n + nb) as u64;
        if needed > budget {
            return Err(Error::Budget {
                what: "stored intrinsic distances",
                needed,
                budget,
            });
        }
        let mut dist = vec![0.0; n * n];
        let mut bdist = vec![0.0; nb * n];
        for (i, &x) in dom.interior().iter().enumerate() {
            let row = dom.intrinsic_distances_from(x);
            for (j, &y) in dom.interior().iter().enumerate() {
                dist[i * n + j] = row[y];
            }
            for (b, &xi) in dom.boundary().iter().enumerate() {
                bdist[b * n + i] = row[xi];
            }
        }
        let delta = (0..n)
            .map(|i| {
                (0..nb)
                    .map(|b| bdist[b * n + i])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect();
        Ok(Self {
            dom: dom.clone(),
            n,
            dist,
            bdist,
            delta,
        })
    }

    pub fn domain(&self) -> &DomainView {
        &self.dom
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn mesh(&self) -> f64 {
        self.dom.graph().mesh()
    }

    /// `d_i` between interior positions.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    /// `d_i` from the `b`-th boundary vertex to interior position `i`.
    #[inline]
    pub fn d_boundary(&self, b: usize, i: usize) -> f64 {
        self.bdist[b * self.n + i]
    }

    /// Intrinsic `δ(x)` by interior position.
    #[inline]
    pub fn delta(&self, i: usize) -> f64 {
        self.delta[i]
    }

    pub fn deltas(&self) -> &[f64] {
        &self.delta
    }

    /// `r(x, y) = δ(x) ∨ δ(y) ∨ d_i(x, y)`.
    #[inline]
    pub fn rxy(&self, i: usize, j: usize) -> f64 {
        self.delta[i].max(self.delta[j]).max(self.d(i, j))
    }

    pub fn basepoint(&self) -> usize {
        self.dom.basepoint_local()
    }

    /// Sorted ball shells for `V(x, r)` over `D ∪ ∂D`.
    pub fn volume_index(&self) -> VolumeIndex {
        let g = self.dom.graph();
        let nb = self.dom.boundary().len();
        let measure: Vec<f64> = self
            .dom
            .interior()
            .iter()
            .chain(self.dom.boundary())
            .map(|&v| g.measure(v))
            .collect();
        let mut dists = Vec::with_capacity(self.n);
        let mut prefix = Vec::with_capacity(self.n);
        let mut row = vec![0.0; self.n + nb];
        for i in 0..self.n {
            for j in 0..self.n {
                row[j] = self.d(i, j);
            }
            for b in 0..nb {
                row[self.n + b] = self.d_boundary(b, i);
            }
            let (d, p) = sorted_shells(&row, &measure);
            dists.push(d);
            prefix.push(p);
        }
        VolumeIndex { dists, prefix }
    }
}

/// `V(x, r)` in the intrinsic metric for every interior `x`.
#[derive(Debug, Clone)]
pub struct VolumeIndex {
    dists: Vec<Vec<f64>>,
    prefix: Vec<Vec<f64>>,
}

impl VolumeIndex {
    /// Measure of the open ball `{d_i(x, ·) < r}` around interior position `i`.
    pub fn volume(&self, i: usize, r: f64) -> f64 {
        let k = self.dists[i].partition_point(|&d| d < r);
        if k == 0 {
            0.0
        } else {
            self.prefix[i][k - 1]
        }
    }
}

/// A path through `D` with its achieved inner-uniformity constants.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveRecord {
    pub x: usize,
    pub y: usize,
    pub path: Vec<usize>,
    pub length: f64,
    pub intrinsic: f64,
    /// `min δ(γ_k) / (d_i(x, γ_k) ∧ d_i(γ_k, y))` over inner vertices.
    pub c: f64,
    /// `L(γ) / d_i(x, y)`.
    pub big_c: f64,
}

/// Trade-off weights for the clearance-penalized path sweep.
pub fn default_curve_weights() -> Vec<f64> {
    let mut w = vec![0.0];
    w.extend((0..9).map(|k| num::powf(10.0, -2.0 + 0.5 * k as f64)));
    w
}

/// Best curve from `x` to `y` over a sweep of clearance weights. Each
/// candidate is a shortest path for the edge cost
/// `len · (1 + w · δ_max / (δ(u) ∧ δ(v)))`; the candidate with the largest
/// `c` wins, ties going to the smaller `C`. `deltas` is the intrinsic `δ`.
pub fn find_inner_uniform_curve(
    dom: &DomainView,
    deltas: &[f64],
    x: usize,
    y: usize,
) -> Result<CurveRecord> {
    dom.local(x).ok_or(Error::NotInDomain(x))?;
    dom.local(y).ok_or(Error::NotInDomain(y))?;
    if deltas.len() != dom.len() {
        return Err(Error::InvalidArgument(
            "deltas must cover the interior".into(),
        ));
    }
    if x == y {
        return Ok(CurveRecord {
            x,
            y,
            path: vec![x],
            length: 0.0,
            intrinsic: 0.0,
            c: f64::INFINITY,
            big_c: 1.0,
        });
    }
    let from_x = dom.intrinsic_distances_from(x);
    let from_y = dom.intrinsic_distances_from(y);
    let di = from_x[y];
    let dmax = deltas.iter().copied().fold(0.0, f64::max);
    let mut best: Option<CurveRecord> = None;
    for w in default_curve_weights() {
        let path = weighted_path(dom, deltas, dmax, w, x, y);
        let g = dom.graph();
        let length: f64 = path.windows(2).map(|p| g.edge_length(p[0], p[1])).sum();
        let c = path[1..path.len() - 1]
            .iter()
            .map(|&v| deltas[dom.local(v).unwrap()] / from_x[v].min(from_y[v]))
            .fold(f64::INFINITY, f64::min);
        let rec = CurveRecord {
            x,
            y,
            path,
            length,
            intrinsic: di,
            c,
            big_c: length / di,
        };
        let better = match &best {
            None => true,
            Some(b) => rec.c > b.c || (rec.c == b.c && rec.big_c < b.big_c),
        };
        if better {
            best = Some(rec);
        }
    }
    Ok(best.unwrap())
}

fn weighted_path(
    dom: &DomainView,
    deltas: &[f64],
    dmax: f64,
    w: f64,
    x: usize,
    y: usize,
) -> Vec<usize> {
    let g = dom.graph();
    let n = g.vertex_count();
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    let mut heap = BinaryHeap::new();
    dist[x] = 0.0;
    heap.push(HeapItem(0.0, x));
    while let Some(HeapItem(d, v)) = heap.pop() {
        if d > dist[v] {
            continue;
        }
        if v == y {
            break;
        }
        let dv = deltas[dom.local(v).unwrap()];
        for (u, _) in g.neighbors(v) {
            let Some(lu) = dom.local(u) else { continue };
            let clearance = dv.min(deltas[lu]);
            let cost = g.edge_length(v, u) * (1.0 + w * dmax / clearance);
            if d + cost < dist[u] {
                dist[u] = d + cost;
                prev[u] = v;
                heap.push(HeapItem(d + cost, u));
            }
        }
    }
    let mut path = vec![y];
    let mut v = y;
    while v != x {
        v = prev[v];
        path.push(v);
    }
    path.reverse();
    path
}

/// Worst achieved constants over sampled pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct InnerUniformCertificate {
    pub c: f64,
    pub big_c: f64,
    pub worst_c: (usize, usize),
    pub worst_big_c: (usize, usize),
    pub records: Vec<CurveRecord>,
    pub seed: u64,
}

pub fn certify_inner_uniformity(
    dom: &DomainView,
    n_samples: usize,
    seed: u64,
) -> Result<InnerUniformCertificate> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("n_samples must be ≥ 1".into()));
    }
    if dom.len() < 2 {
        return Err(Error::Degenerate("domain has a single vertex".into()));
    }
    let deltas = dom.intrinsic_deltas();
    let mut rng = sampling::rng(seed, 0);
    let mut records = Vec::with_capacity(n_samples);
    for _ in 0..n_samples {
        let (a, b) = sampling::distinct_pair(&mut rng, dom.len());
        records.push(find_inner_uniform_curve(
            dom,
            &deltas,
            dom.interior()[a],
            dom.interior()[b],
        )?);
    }
    Ok(summarize_curves(records, seed))
}

/// Certificate over given pairs of graph vertices.
pub fn certify_pairs(
    dom: &DomainView,
    pairs: &[(usize, usize)],
) -> Result<InnerUniformCertificate> {
    let deltas = dom.intrinsic_deltas();
    let records = pairs
        .iter()
        .map(|&(x, y)| find_inner_uniform_curve(dom, &deltas, x, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(summarize_curves(records, 0))
}

fn summarize_curves(records: Vec<CurveRecord>, seed: u64) -> InnerUniformCertificate {
    let mut c = f64::INFINITY;
    let mut big_c: f64 = 1.0;
    let mut worst_c = (records[0].x, records[0].y);
    let mut worst_big_c = worst_c;
    for r in &records {
        if r.c < c {
            c = r.c;
            worst_c = (r.x, r.y);
        }
        if r.big_c > big_c {
            big_c = r.big_c;
            worst_big_c = (r.x, r.y);
        }
    }
    InnerUniformCertificate {
        c,
        big_c,
        worst_c,
        worst_big_c,
        records,
        seed,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorkscrewResult {
    pub xi: usize,
    pub r: f64,
    pub m: f64,
    /// Interior vertex of largest `δ` in the ball, when it clears `r/M`.
    pub found: Option<usize>,
    pub best_delta: f64,
    /// `r < 2h`: the lattice cannot resolve the scale.
    pub granular: bool,
}

/// Exhaustive search of `{v ∈ D : d_i(v, ξ) < r}` for `δ(v) > r/M`.
pub fn corkscrew_point(
    geom: &DomainGeometry,
    xi: usize,
    r: f64,
    m: f64,
) -> Result<CorkscrewResult> {
    let dom = geom.domain();
    let b = dom
        .boundary()
        .binary_search(&xi)
        .map_err(|_| Error::InvalidArgument(format!("vertex {xi} is not a boundary vertex")))?;
    if !(r > 0.0) || !(m > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need r > 0 and M > 0 (got {r}, {m})"
        )));
    }
    let mut best: Option<usize> = None;
    let mut best_delta = 0.0;
    for i in 0..geom.len() {
        if geom.d_boundary(b, i) < r && geom.delta(i) > best_delta {
            best_delta = geom.delta(i);
            best = Some(i);
        }
    }
    let found = best
        .filter(|_| best_delta > r / m)
        .map(|i| dom.interior()[i]);
    Ok(CorkscrewResult {
        xi,
        r,
        m,
        found,
        best_delta,
        granular: r < 2.0 * geom.mesh(),
    })
}

/// Corkscrew set `A_ρ(ξ) = {A ∈ D : d_i(A, ξ) < ρ, δ(A) > ρ/M}` as interior
/// positions; `b` indexes `∂D`.
pub fn corkscrew_set(geom: &DomainGeometry, b: usize, rho: f64, m: f64) -> Vec<usize> {
    (0..geom.len())
        .filter(|&i| geom.d_boundary(b, i) < rho && geom.delta(i) > rho / m)
        .collect()
}

/// `B(x, y)` by interior position.
#[derive(Debug, Clone, PartialEq)]
pub struct BSet {
    pub members: Vec<usize>,
    /// `r(x, y) ≥ ε`, so `B(x, y) = {o}`.
    pub far: bool,
}

impl BSet {
    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// `B(x, y) = {A : δ(A) > r/M, d(x, A) ∨ d(y, A) < 5r}` when `r = r(x, y) < ε`,
/// and `{o}` otherwise. Arguments are interior positions.
pub fn b_set(geom: &DomainGeometry, x: usize, y: usize, m: f64, eps: f64) -> BSet {
    let r = geom.rxy(x, y);
    if r >= eps {
        return BSet {
            members: vec![geom.basepoint()],
            far: true,
        };
    }
    let members = (0..geom.len())
        .filter(|&a| geom.delta(a) > r / m && geom.d(x, a).max(geom.d(y, a)) < 5.0 * r)
        .collect();
    BSet {
        members,
        far: false,
    }
}

/// Chain of balls `B(v, δ(v))` joining two points.
#[derive(Debug, Clone, PartialEq)]
pub struct HarnackChain {
    /// `(center, radius)` with centers as interior positions.
    pub balls: Vec<(usize, f64)>,
    pub m: f64,
}

impl HarnackChain {
    pub fn len(&self) -> usize {
        self.balls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.balls.is_empty()
    }
}

/// The canonical ball family `B(v, δ(v))` and its overlap graph: balls
/// `u, v` are linked when their `M`-shrunk copies meet in the length-space
/// sense, `d_i(u, v) < (δ(u) + δ(v)) / M`. Open balls of radius `δ` stay in
/// `D`; with radius `δ/2` a vertex next to the boundary would lie in no
/// shrunk ball but its own, and two such balls could never overlap.
#[derive(Debug, Clone)]
pub struct HarnackFamily<'a> {
    geom: &'a DomainGeometry,
    m: f64,
    adj: Vec<Vec<u32>>,
}

impl<'a> HarnackFamily<'a> {
    pub fn new(geom: &'a DomainGeometry, m: f64) -> Result<Self> {
        if !(m > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "chain parameter must exceed 1, got {m}"
            )));
        }
        let n = geom.len();
        let adj = (0..n)
            .map(|u| {
                (0..n)
                    .filter(|&v| v != u && geom.d(u, v) < (geom.delta(u) + geom.delta(v)) / m)
                    .map(|v| v as u32)
                    .collect()
            })
            .collect();
        Ok(Self { geom, m, adj })
    }

    fn contains_shrunk(&self, v: usize, x: usize) -> bool {
        self.geom.d(x, v) < self.geom.delta(v) / self.m
    }

    /// Shortest chain from interior position `x` to `y`.
    pub fn chain(&self, x: usize, y: usize) -> Result<HarnackChain> {
        let n = self.geom.len();
        let mut prev = vec![u32::MAX; n];
        let mut seen = vec![false; n];
        let mut queue = VecDeque::new();
        for v in 0..n {
            if self.contains_shrunk(v, x) {
                seen[v] = true;
                queue.push_back(v);
            }
        }
        while let Some(u) = queue.pop_front() {
            if self.contains_shrunk(u, y) {
                let mut balls = vec![];
                let mut v = u;
                loop {
                    balls.push((v, self.geom.delta(v)));
                    if prev[v] == u32::MAX {
                        break;
                    }
                    v = prev[v] as usize;
                }
                balls.reverse();
                return Ok(HarnackChain { balls, m: self.m });
            }
            for &w in &self.adj[u] {
                let w = w as usize;
                if !seen[w] {
                    seen[w] = true;
                    prev[w] = u as u32;
                    queue.push_back(w);
                }
            }
        }
        Err(Error::Degenerate(format!(
            "no Harnack chain between positions {x} and {y}"
        )))
    }

    /// Checks the chain conditions independently of the search.
    pub fn validate(&self, chain: &HarnackChain, x: usize, y: usize) -> bool {
        let g = self.geom;
        let Some(&(first, _)) = chain.balls.first() else {
            return false;
        };
        let &(last, _) = chain.balls.last().unwrap();
        let inside = chain.balls.iter().all(|&(v, r)| r <= g.delta(v));
        let linked = chain
            .balls
            .windows(2)
            .all(|p| g.d(p[0].0, p[1].0) < (p[0].1 + p[1].1) / self.m);
        inside
            && linked
            && g.d(x, first) < chain.balls[0].1 / self.m
            && g.d(y, last) < chain.balls.last().unwrap().1 / self.m
    }
}

/// Shortest chain between interior positions `x` and `y`.
pub fn harnack_chain(geom: &DomainGeometry, x: usize, y: usize, m: f64) -> Result<HarnackChain> {
    HarnackFamily::new(geom, m)?.chain(x, y)
}

/// Outcome of a relatively-connected-annulus test.
#[derive(Debug, Clone, PartialEq)]
pub struct RcaResult {
    pub connected: bool,
    /// Component label per vertex of `B(o,R) ∖ B̄(o,R/κ)`, `u32::MAX` elsewhere.
    pub components: Vec<u32>,
    pub component_count: usize,
}

/// Whether `B(o,R) ∖ B̄(o,R/2)` lies in one component of
/// `B(o,R) ∖ B̄(o,R/κ)`, in the graph metric.
pub fn check_rca(g: &MetricMeasureGraph, o: usize, r: f64, kappa: f64) -> Result<RcaResult> {
    g.check_vertex(o)?;
    if !(kappa >= 2.0) || !(r > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "need κ ≥ 2 and R > 0 (got {kappa}, {r})"
        )));
    }
    let d = g.distances_from(o);
    let n = g.vertex_count();
    let in_big = |v: usize| d[v] > r / kappa && d[v] < r;
    let outer: Vec<usize> = (0..n).filter(|&v| d[v] > r / 2.0 && d[v] < r).collect();
    if outer.is_empty() {
        return Err(Error::Degenerate(format!(
            "annulus around {o} at R = {r} is empty"
        )));
    }
    let mut comp = vec![u32::MAX; n];
    let mut count = 0u32;
    for s in 0..n {
        if !in_big(s) || comp[s] != u32::MAX {
            continue;
        }
        comp[s] = count;
        let mut stack = vec![s];
        while let Some(v) = stack.pop() {
            for (w, _) in g.neighbors(v) {
                if in_big(w) && comp[w] == u32::MAX {
                    comp[w] = count;
                    stack.push(w);
                }
            }
        }
        count += 1;
    }
    let first = comp[outer[0]];
    Ok(RcaResult {
        connected: outer.iter().all(|&v| comp[v] == first),
        components: comp,
        component_count: count as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{self, DEFAULT_VERTEX_BUDGET as B};
    use crate::mmgraph::MetricMode;

    #[test]
    fn convex_square_intrinsic_equals_graph_metric() {
        let dom = generators::gen_cube_grid(2, 10, B).unwrap();
        let geom = DomainGeometry::new(&dom).unwrap();
        for i in (0..geom.len()).step_by(7) {
            for j in (0..geom.len()).step_by(5) {
                let (x, y) = (dom.interior()[i], dom.interior()[j]);
                assert_eq!(geom.d(i, j), dom.graph().distance(x, y));
            }
            assert_eq!(geom.delta(i), dom.deltas()[i]);
        }
    }

    #[test]
    fn curve_on_square_is_geodesic() {
        let dom = generators::gen_cube_grid(2, 16, B).unwrap();
        let cert = certify_inner_uniformity(&dom, 30, 5).unwrap();
        // the sweep keeps the clearest curve, which may trade some length
        assert!(cert.big_c <= 2.0, "C = {}", cert.big_c);
        assert!(cert.c > 0.2, "c = {}", cert.c);
        for r in &cert.records {
            let g = dom.graph();
            assert!(r.path.iter().all(|&v| dom.contains(v)));
            assert!(r
                .path
                .windows(2)
                .all(|p| g.neighbors(p[0]).any(|(w, _)| w == p[1])));
        }
        let again = certify_inner_uniformity(&dom, 30, 5).unwrap();
        assert_eq!(cert, again);
    }

    #[test]
    fn single_vertex_curve() {
        let dom = generators::gen_cube_grid(2, 6, B).unwrap();
        let d = dom.intrinsic_deltas();
        let v = dom.interior()[3];
        let rec = find_inner_uniform_curve(&dom, &d, v, v).unwrap();
        assert_eq!((rec.path.len(), rec.big_c), (1, 1.0));
    }

    #[test]
    fn corkscrew_on_square_edge() {
        let m = 16;
        let dom = generators::gen_cube_grid(2, m, B).unwrap();
        let geom = DomainGeometry::new(&dom).unwrap();
        let xi = m / 2; // bottom edge midpoint (i = 8, j = 0)
        let res = corkscrew_point(&geom, xi, 0.25, 3.0).unwrap();
        let a = res.found.unwrap();
        assert!(dom.boundary_distance(a).unwrap() > 0.25 / 3.0);
        assert!(!res.granular);
        let tiny = corkscrew_point(&geom, xi, 0.1, 3.0).unwrap();
        assert!(tiny.granular);
    }

    #[test]
    fn b_set_far_branch() {
        let dom = generators::gen_cube_grid(2, 8, B).unwrap();
        let geom = DomainGeometry::new(&dom).unwrap();
        let s = b_set(&geom, 0, 20, 3.0, 1e-3);
        assert!(s.far);
        assert_eq!(s.members, vec![geom.basepoint()]);
    }

    #[test]
    fn chain_trivial_and_valid() {
        let dom = generators::gen_cube_grid(2, 16, B).unwrap();
        let geom = DomainGeometry::new(&dom).unwrap();
        let fam = HarnackFamily::new(&geom, 1.5).unwrap();
        let o = geom.basepoint();
        assert_eq!(fam.chain(o, o).unwrap().len(), 1);
        let far = fam.chain(0, geom.len() - 1).unwrap();
        assert!(far.len() > 3);
        assert!(fam.validate(&far, 0, geom.len() - 1));
    }

    #[test]
    fn rca_grid_and_bridge() {
        let dom = generators::gen_cube_grid(2, 20, B).unwrap();
        let g = dom.graph();
        let o = 10 * 21 + 10;
        for kappa in [2.0, 3.0, 5.0] {
            assert!(check_rca(g, o, 6.0 * g.mesh(), kappa).unwrap().connected);
        }
        // two 7x7 grids joined by one edge
        let side = 7;
        let mut edges = Vec::new();
        for copy in 0..2 {
            let base = copy * side * side;
            for j in 0..side {
                for i in 0..side {
                    let v = base + j * side + i;
                    if i + 1 < side {
                        edges.push((v, v + 1, 1.0));
                    }
                    if j + 1 < side {
                        edges.push((v, v + side, 1.0));
                    }
                }
            }
        }
        let right_mid = 3 * side + 6;
        let left_mid = side * side + 3 * side;
        edges.push((right_mid, left_mid, 1.0));
        let g = MetricMeasureGraph::new(
            vec![1.0; 2 * side * side],
            &edges,
            1.0,
            MetricMode::Geodesic,
            0,
            vec![],
        )
        .unwrap();
        let o = 3 * side + 3;
        let res = check_rca(&g, o, 9.0, 2.0).unwrap();
        assert!(!res.connected);
    }
}
