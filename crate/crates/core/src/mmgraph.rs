//! Discrete metric measure spaces and domains inside them.
//!
//! A [`MetricMeasureGraph`] carries symmetric conductances, a positive
//! measure per vertex and a metric that is either the hop metric scaled by
//! the mesh `h` or the Euclidean metric of an embedding. A [`DomainView`]
//! selects a connected interior `D` and a boundary set `∂D`.

use alloc::collections::BinaryHeap;
use alloc::collections::VecDeque;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::error::{Error, Result};
use crate::num;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricMode {
    /// Hop count times the mesh `h`.
    Geodesic,
    /// Euclidean distance between vertex coordinates.
    Euclidean,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricMeasureGraph {
    dim: usize,
    coords: Vec<f64>,
    offsets: Vec<usize>,
    neighbors: Vec<usize>,
    conductances: Vec<f64>,
    measure: Vec<f64>,
    mesh: f64,
    mode: MetricMode,
}

impl MetricMeasureGraph {
    /// Validates and builds a graph. `coords` holds `dim` reals per vertex
    /// (pass `dim = 0` and an empty vector for no embedding).
    pub fn new(
        measure: Vec<f64>,
        edges: &[(usize, usize, f64)],
        mesh: f64,
        mode: MetricMode,
        dim: usize,
        coords: Vec<f64>,
    ) -> Result<Self> {
        let n = measure.len();
        if n == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        if !(mesh > 0.0) || !mesh.is_finite() {
            return Err(Error::InvalidGraph(format!(
                "mesh must be positive, got {mesh}"
            )));
        }
        if let Some((v, m)) = measure
            .iter()
            .enumerate()
            .find(|(_, m)| !(**m > 0.0) || !m.is_finite())
        {
            return Err(Error::InvalidGraph(format!("measure of vertex {v} is {m}")));
        }
        if coords.len() != n * dim {
            return Err(Error::InvalidGraph(format!(
                "expected {} coordinates, got {}",
                n * dim,
                coords.len()
            )));
        }
        if mode == MetricMode::Euclidean && dim == 0 {
            return Err(Error::InvalidGraph(
                "euclidean mode needs coordinates".into(),
            ));
        }
        let mut lists: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
        for &(i, j, c) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph(format!("edge ({i},{j}) out of range")));
            }
            if i == j {
                return Err(Error::InvalidGraph(format!("self loop at {i}")));
            }
            if !(c > 0.0) || !c.is_finite() {
                return Err(Error::InvalidGraph(format!(
                    "conductance of ({i},{j}) is {c}"
                )));
            }
            lists[i].push((j, c));
            lists[j].push((i, c));
        }
        let mut offsets = Vec::with_capacity(n + 1);
        let mut neighbors = Vec::with_capacity(2 * edges.len());
        let mut conductances = Vec::with_capacity(2 * edges.len());
        offsets.push(0);
        for (v, mut l) in lists.into_iter().enumerate() {
            l.sort_by_key(|&(w, _)| w);
            if l.windows(2).any(|p| p[0].0 == p[1].0) {
                return Err(Error::InvalidGraph(format!("duplicate edge at vertex {v}")));
            }
            for (w, c) in l {
                neighbors.push(w);
                conductances.push(c);
            }
            offsets.push(neighbors.len());
        }
        let g = Self {
            dim,
            coords,
            offsets,
            neighbors,
            conductances,
            measure,
            mesh,
            mode,
        };
        if g.hops_from(0).contains(&u32::MAX) {
            return Err(Error::InvalidGraph("graph is not connected".into()));
        }
        Ok(g)
    }

    pub fn vertex_count(&self) -> usize {
        self.measure.len()
    }

    pub fn mesh(&self) -> f64 {
        self.mesh
    }

    pub fn mode(&self) -> MetricMode {
        self.mode
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn measure(&self, v: usize) -> f64 {
        self.measure[v]
    }

    pub fn measures(&self) -> &[f64] {
        &self.measure
    }

    pub fn coords(&self, v: usize) -> Option<&[f64]> {
        if self.dim == 0 {
            None
        } else {
            Some(&self.coords[v * self.dim..(v + 1) * self.dim])
        }
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.offsets[v], self.offsets[v + 1]);
        self.neighbors[a..b]
            .iter()
            .copied()
            .zip(self.conductances[a..b].iter().copied())
    }

    pub fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    /// Total conductance at `v`.
    pub fn conductance_sum(&self, v: usize) -> f64 {
        self.conductances[self.offsets[v]..self.offsets[v + 1]]
            .iter()
            .sum()
    }

    /// Edges `(i, j, c)` with `i < j`, in vertex order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.vertex_count()).flat_map(move |i| {
            self.neighbors(i)
                .filter(move |&(j, _)| j > i)
                .map(move |(j, c)| (i, j, c))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.neighbors.len() / 2
    }

    pub fn check_vertex(&self, v: usize) -> Result<()> {
        if v < self.vertex_count() {
            Ok(())
        } else {
            Err(Error::VertexOutOfRange {
                vertex: v,
                count: self.vertex_count(),
            })
        }
    }

    /// BFS hop counts from `x`; `u32::MAX` marks unreachable vertices.
    pub fn hops_from(&self, x: usize) -> Vec<u32> {
        let mut hops = vec![u32::MAX; self.vertex_count()];
        let mut queue = VecDeque::new();
        hops[x] = 0;
        queue.push_back(x);
        while let Some(v) = queue.pop_front() {
            for (w, _) in self.neighbors(v) {
                if hops[w] == u32::MAX {
                    hops[w] = hops[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        hops
    }

    fn euclid(&self, x: usize, y: usize) -> f64 {
        let (a, b) = (self.coords(x).unwrap(), self.coords(y).unwrap());
        num::sqrt(a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum())
    }

    /// The metric `d(x, y)`.
    pub fn distance(&self, x: usize, y: usize) -> f64 {
        if x == y {
            return 0.0;
        }
        match self.mode {
            MetricMode::Geodesic => self.hops_from(x)[y] as f64 * self.mesh,
            MetricMode::Euclidean => self.euclid(x, y),
        }
    }

    /// `d(x, ·)` for every vertex.
    pub fn distances_from(&self, x: usize) -> Vec<f64> {
        match self.mode {
            MetricMode::Geodesic => self
                .hops_from(x)
                .into_iter()
                .map(|h| h as f64 * self.mesh)
                .collect(),
            MetricMode::Euclidean => (0..self.vertex_count())
                .map(|y| if y == x { 0.0 } else { self.euclid(x, y) })
                .collect(),
        }
    }

    /// Length of the edge `u–v` measured in the metric, in units of `h`,
    /// snapped to an integer when within `1e-9` of one.
    fn edge_units(&self, u: usize, v: usize) -> f64 {
        match self.mode {
            MetricMode::Geodesic => 1.0,
            MetricMode::Euclidean => {
                let units = self.euclid(u, v) / self.mesh;
                let r = num::round(units);
                if num::abs(units - r) < 1e-9 {
                    r
                } else {
                    units
                }
            }
        }
    }

    /// `V(x, r) = μ(B(x, r))` for the open ball.
    pub fn ball_volume(&self, x: usize, r: f64) -> f64 {
        self.distances_from(x)
            .iter()
            .zip(&self.measure)
            .filter(|(d, _)| **d < r)
            .map(|(_, m)| m)
            .sum()
    }

    pub fn total_measure(&self) -> f64 {
        self.measure.iter().sum()
    }

    pub fn ball_index(&self, centers: &[usize]) -> BallIndex {
        BallIndex::new(self, centers)
    }

    /// Shortest path lengths from `source` using only paths whose interior
    /// vertices satisfy `passable`. Unreachable vertices get `f64::INFINITY`.
    pub fn constrained_distances(
        &self,
        source: usize,
        passable: impl Fn(usize) -> bool,
    ) -> Vec<f64> {
        self.constrained_distances_multi(&[source], passable)
    }

    /// As [`constrained_distances`](Self::constrained_distances) from the
    /// nearest of several sources. Sources always expand.
    pub fn constrained_distances_multi(
        &self,
        sources: &[usize],
        passable: impl Fn(usize) -> bool,
    ) -> Vec<f64> {
        let n = self.vertex_count();
        let mut dist = vec![f64::INFINITY; n];
        let mut is_source = vec![false; n];
        for &s in sources {
            dist[s] = 0.0;
            is_source[s] = true;
        }
        if self.mode == MetricMode::Geodesic {
            let mut queue: VecDeque<usize> = sources.iter().copied().collect();
            while let Some(v) = queue.pop_front() {
                if !is_source[v] && !passable(v) {
                    continue;
                }
                for (w, _) in self.neighbors(v) {
                    if dist[w].is_infinite() {
                        dist[w] = dist[v] + 1.0;
                        queue.push_back(w);
                    }
                }
            }
        } else {
            let mut heap: BinaryHeap<HeapItem> =
                sources.iter().map(|&s| HeapItem(0.0, s)).collect();
            let mut done = vec![false; n];
            while let Some(HeapItem(d, v)) = heap.pop() {
                if done[v] {
                    continue;
                }
                done[v] = true;
                if !is_source[v] && !passable(v) {
                    continue;
                }
                for (w, _) in self.neighbors(v) {
                    let nd = d + self.edge_units(v, w);
                    if nd < dist[w] {
                        dist[w] = nd;
                        heap.push(HeapItem(nd, w));
                    }
                }
            }
        }
        for d in dist.iter_mut() {
            *d *= self.mesh;
        }
        dist
    }

    /// Metric length of the edge `u–v`, snapped to the lattice spacing.
    pub fn edge_length(&self, u: usize, v: usize) -> f64 {
        self.edge_units(u, v) * self.mesh
    }
}

#[derive(PartialEq)]
pub(crate) struct HeapItem(pub f64, pub usize);

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .0
            .total_cmp(&self.0)
            .then_with(|| other.1.cmp(&self.1))
    }
}

/// Sorted distance shells around a set of centers for fast `V(x, r)`.
#[derive(Debug, Clone)]
pub struct BallIndex {
    centers: Vec<usize>,
    // per center: ascending distances and prefix measure sums
    dists: Vec<Vec<f64>>,
    prefix: Vec<Vec<f64>>,
}

impl BallIndex {
    pub fn new(g: &MetricMeasureGraph, centers: &[usize]) -> Self {
        let mut dists = Vec::with_capacity(centers.len());
        let mut prefix = Vec::with_capacity(centers.len());
        for &c in centers {
            let d = g.distances_from(c);
            let (ds, ps) = sorted_shells(&d, g.measures());
            dists.push(ds);
            prefix.push(ps);
        }
        Self {
            centers: centers.to_vec(),
            dists,
            prefix,
        }
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    /// `V(c, r)` for the `i`-th center.
    pub fn volume(&self, i: usize, r: f64) -> f64 {
        let k = self.dists[i].partition_point(|&d| d < r);
        if k == 0 {
            0.0
        } else {
            self.prefix[i][k - 1]
        }
    }
}

/// Sorts finite distances and returns them with running measure sums.
pub(crate) fn sorted_shells(dist: &[f64], measure: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let mut pairs: Vec<(f64, f64)> = dist
        .iter()
        .zip(measure)
        .filter(|(d, _)| d.is_finite())
        .map(|(&d, &m)| (d, m))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut acc = 0.0;
    let mut ds = Vec::with_capacity(pairs.len());
    let mut ps = Vec::with_capacity(pairs.len());
    for (d, m) in pairs {
        acc += m;
        ds.push(d);
        ps.push(acc);
    }
    (ds, ps)
}

const NOT_IN_D: u32 = u32::MAX;

/// A connected interior vertex set with its boundary.
#[derive(Debug, Clone)]
pub struct DomainView {
    graph: Arc<MetricMeasureGraph>,
    interior: Vec<usize>,
    boundary: Vec<usize>,
    local: Vec<u32>,
    is_boundary: Vec<bool>,
    delta: Vec<f64>,
    basepoint: usize,
}

impl DomainView {
    /// Domain whose boundary is every outside vertex adjacent to `interior`.
    pub fn new(graph: Arc<MetricMeasureGraph>, interior: Vec<usize>) -> Result<Self> {
        let n = graph.vertex_count();
        let mut inside = vec![false; n];
        for &v in &interior {
            graph.check_vertex(v)?;
            inside[v] = true;
        }
        let mut is_b = vec![false; n];
        for &v in &interior {
            for (w, _) in graph.neighbors(v) {
                if !inside[w] {
                    is_b[w] = true;
                }
            }
        }
        let boundary = (0..n).filter(|&v| is_b[v]).collect();
        Self::with_boundary(graph, interior, boundary)
    }

    /// Domain with an explicitly designated boundary set.
    pub fn with_boundary(
        graph: Arc<MetricMeasureGraph>,
        mut interior: Vec<usize>,
        mut boundary: Vec<usize>,
    ) -> Result<Self> {
        let n = graph.vertex_count();
        interior.sort_unstable();
        interior.dedup();
        boundary.sort_unstable();
        boundary.dedup();
        if interior.is_empty() {
            return Err(Error::InvalidDomain("interior is empty".into()));
        }
        if boundary.is_empty() {
            return Err(Error::InvalidDomain("boundary is empty".into()));
        }
        let mut local = vec![NOT_IN_D; n];
        for (i, &v) in interior.iter().enumerate() {
            graph.check_vertex(v)?;
            local[v] = i as u32;
        }
        let mut is_boundary = vec![false; n];
        for &b in &boundary {
            graph.check_vertex(b)?;
            if local[b] != NOT_IN_D {
                return Err(Error::InvalidDomain(format!(
                    "vertex {b} is both interior and boundary"
                )));
            }
            is_boundary[b] = true;
        }
        // connectivity through edges inside D
        let mut seen = vec![false; n];
        let mut stack = vec![interior[0]];
        seen[interior[0]] = true;
        let mut count = 1;
        while let Some(v) = stack.pop() {
            for (w, _) in graph.neighbors(v) {
                if local[w] != NOT_IN_D && !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        if count != interior.len() {
            return Err(Error::InvalidDomain("interior is not connected".into()));
        }
        let delta = boundary_distances(&graph, &interior, &boundary);
        if delta.iter().any(|d| !(*d > 0.0) || !d.is_finite()) {
            return Err(Error::InvalidDomain(
                "boundary distance not positive everywhere".into(),
            ));
        }
        let mut basepoint = 0;
        for i in 1..interior.len() {
            if delta[i] > delta[basepoint] {
                basepoint = i;
            }
        }
        Ok(Self {
            graph,
            interior,
            boundary,
            local,
            is_boundary,
            delta,
            basepoint,
        })
    }

    pub fn graph(&self) -> &MetricMeasureGraph {
        &self.graph
    }

    pub fn graph_arc(&self) -> &Arc<MetricMeasureGraph> {
        &self.graph
    }

    /// Interior vertices, ascending.
    pub fn interior(&self) -> &[usize] {
        &self.interior
    }

    pub fn boundary(&self) -> &[usize] {
        &self.boundary
    }

    pub fn len(&self) -> usize {
        self.interior.len()
    }

    pub fn is_empty(&self) -> bool {
        self.interior.is_empty()
    }

    /// Position of `v` in [`interior`](Self::interior).
    pub fn local(&self, v: usize) -> Option<usize> {
        match self.local.get(v) {
            Some(&l) if l != NOT_IN_D => Some(l as usize),
            _ => None,
        }
    }

    pub fn contains(&self, v: usize) -> bool {
        self.local(v).is_some()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.is_boundary.get(v).copied().unwrap_or(false)
    }

    fn require(&self, v: usize) -> Result<usize> {
        self.local(v).ok_or(Error::NotInDomain(v))
    }

    /// `δ` per interior vertex, in interior order.
    pub fn deltas(&self) -> &[f64] {
        &self.delta
    }

    /// Basepoint `o` as a graph vertex: maximal `δ`, lowest index on ties.
    pub fn basepoint(&self) -> usize {
        self.interior[self.basepoint]
    }

    pub fn basepoint_local(&self) -> usize {
        self.basepoint
    }

    /// `δ(x) = d(x, ∂D)`.
    pub fn boundary_distance(&self, x: usize) -> Result<f64> {
        Ok(self.delta[self.require(x)?])
    }

    /// Distances from `x` along paths that stay inside `D` (boundary
    /// vertices are reachable as endpoints only).
    pub fn intrinsic_distances_from(&self, x: usize) -> Vec<f64> {
        self.graph
            .constrained_distances(x, |v| self.local[v] != NOT_IN_D)
    }

    /// Intrinsic boundary distance per interior vertex, in interior order:
    /// the shortest path to `∂D` through `D`.
    pub fn intrinsic_deltas(&self) -> Vec<f64> {
        let d = self
            .graph
            .constrained_distances_multi(&self.boundary, |v| self.local[v] != NOT_IN_D);
        self.interior.iter().map(|&v| d[v]).collect()
    }

    /// `d_i(x, y)`.
    pub fn intrinsic_distance(&self, x: usize, y: usize) -> Result<f64> {
        self.require(x)?;
        self.require(y)?;
        if x == y {
            return Ok(0.0);
        }
        Ok(self.intrinsic_distances_from(x)[y])
    }

    /// `r(x, y) = max(δ(x), δ(y), d(x, y))`.
    pub fn rxy(&self, x: usize, y: usize) -> Result<f64> {
        let dx = self.boundary_distance(x)?;
        let dy = self.boundary_distance(y)?;
        Ok(dx.max(dy).max(self.graph.distance(x, y)))
    }

    /// Splits `D` into the open half ball `B(y) = B(y, δ(y)/2) ∩ D` and
    /// `D(y) = D ∖ B(y)`.
    pub fn half_ball_split(&self, y: usize) -> Result<(Vec<usize>, Vec<usize>)> {
        let radius = self.boundary_distance(y)? / 2.0;
        let d = self.graph.distances_from(y);
        Ok(self.interior.iter().partition(|&&v| d[v] < radius))
    }
}

fn boundary_distances(g: &MetricMeasureGraph, interior: &[usize], boundary: &[usize]) -> Vec<f64> {
    match g.mode() {
        MetricMode::Geodesic => {
            let n = g.vertex_count();
            let mut hops = vec![u32::MAX; n];
            let mut queue = VecDeque::new();
            for &b in boundary {
                hops[b] = 0;
                queue.push_back(b);
            }
            while let Some(v) = queue.pop_front() {
                for (w, _) in g.neighbors(v) {
                    if hops[w] == u32::MAX {
                        hops[w] = hops[v] + 1;
                        queue.push_back(w);
                    }
                }
            }
            interior
                .iter()
                .map(|&v| hops[v] as f64 * g.mesh())
                .collect()
        }
        MetricMode::Euclidean => interior
            .iter()
            .map(|&v| {
                boundary
                    .iter()
                    .map(|&b| g.euclid(v, b))
                    .fold(f64::INFINITY, f64::min)
            })
            .collect(),
    }
}
