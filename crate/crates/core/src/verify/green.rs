//! Sweeps over a Green table.

use alloc::vec;
use alloc::vec::Vec;

use rand::Rng;

use crate::num;

use super::{Best, Coverage, Property, PropertyReport, Verifier, Witness};

// Sampling streams, one per property, so reports do not share draws.
const S_SYM: u64 = 1;
const S_DECAY: u64 = 2;
const S_HARNACK: u64 = 3;
const S_GEN3G: u64 = 4;
const S_STRONG: u64 = 5;
const S_ALT: u64 = 6;
const S_BAPPROX: u64 = 7;
const S_NEAR: u64 = 8;
const S_CARL3: u64 = 9;
const S_GLOBAL: u64 = 10;
const S_ASSV: u64 = 11;

/// Both formulations of the generalized 3G ratio over the same triples.
#[derive(Debug, Clone, PartialEq)]
pub struct AltReport {
    /// Largest relative difference between the two ratios on one triple.
    pub max_discrepancy: f64,
    pub definition: PropertyReport,
    pub proposition: PropertyReport,
}

/// Extremes of `g` over each `B(x, y)`, by interior position.
pub(crate) struct BTable {
    n: usize,
    // (argmin g, argmax g); u32::MAX marks an empty set
    ext: Vec<(u32, u32)>,
}

impl BTable {
    #[inline]
    pub(crate) fn get(&self, x: usize, y: usize) -> Option<(usize, usize)> {
        let (a, b) = self.ext[x * self.n + y];
        (a != u32::MAX).then_some((a as usize, b as usize))
    }
}

impl<'a> Verifier<'a> {
    pub fn ratio_symmetry(&self, x: usize, y: usize) -> f64 {
        self.gr(x, y) / self.gr(y, x)
    }

    pub fn ratio_decay_upper(&self, x: usize, y: usize) -> f64 {
        self.gr(x, y) / self.scale(x, y)
    }

    pub fn ratio_decay_lower(&self, x: usize, y: usize) -> f64 {
        self.scale(x, y) / self.gr(x, y)
    }

    pub fn ratio_harnack(&self, x1: usize, x2: usize, y: usize) -> f64 {
        self.gr(x1, y) / self.gr(x2, y)
    }

    pub fn ratio_ubhp(&self, x1: usize, x2: usize, y1: usize, y2: usize) -> f64 {
        (self.gr(x1, y1) / self.gr(x2, y1)) / (self.gr(x1, y2) / self.gr(x2, y2))
    }

    pub fn ratio_generalized_3g(&self, x: usize, y: usize, z: usize) -> f64 {
        let lhs = self.gr(x, z) * self.gr(y, z) / self.gr(x, y);
        let gz = self.gb(z);
        lhs / (gz / self.gb(x) * self.gr(x, z) + gz / self.gb(y) * self.gr(z, y))
    }

    pub fn ratio_alt_3g(&self, x: usize, y: usize, z: usize) -> f64 {
        (1.0 / self.gt(x, y)) / (1.0 / self.gt(x, z) + 1.0 / self.gt(z, y))
    }

    pub fn ratio_strong_3g(&self, x: usize, y: usize, z: usize) -> f64 {
        self.gt(z, y) / self.gt(x, y)
    }

    pub fn ratio_global_3g(&self, x: usize, y: usize, z: usize) -> f64 {
        let lhs = self.gr(x, z) * self.gr(y, z) / self.gr(x, y);
        lhs / (self.scale(x, z) + self.scale(y, z))
    }

    pub fn ratio_assumption_v(&self, x: usize, y: usize, z: usize) -> f64 {
        let (dxy, dyz) = (self.geom.d(x, y), self.geom.d(y, z));
        (self.psi(dyz) / self.psi(dxy)) * (self.vol(x, dxy) / self.vol(z, dyz))
    }

    pub fn ratio_b_upper(&self, x: usize, y: usize, a: usize) -> f64 {
        let ga = self.gb(a);
        self.gt(x, y) * ga * ga / self.scale(x, y)
    }

    pub fn ratio_b_lower(&self, x: usize, y: usize, a: usize) -> f64 {
        1.0 / self.ratio_b_upper(x, y, a)
    }

    fn distinct(x: usize, y: usize, z: usize) -> bool {
        x != y && y != z && x != z
    }

    /// Quasi-symmetry: `G(x, y) ≤ C G(y, x)`.
    pub fn check_quasi_symmetry(&self) -> PropertyReport {
        let (b, c) = self.sweep_pairs(S_SYM, |x, y| (x != y).then(|| self.ratio_symmetry(x, y)));
        self.report(Property::QuasiSymmetry, b, c)
    }

    /// Quasi-polynomial decay: the upper bound `G ≤ C Ψ(d)/V(x, d)` for
    /// `x ≠ y` and the lower bound on `x ∈ B̄(y, δ(y)/2)`.
    pub fn check_quasi_polynomial_decay(&self) -> [PropertyReport; 2] {
        let (b, c) = self.sweep_pairs(S_DECAY, |x, y| {
            (x != y).then(|| self.ratio_decay_upper(x, y))
        });
        let upper = self.report(Property::DecayUpper, b, c);
        let (b, c) = self.sweep_pairs(S_DECAY + 100, |x, y| {
            (x != y && self.geom.d(x, y) <= 0.5 * self.geom.delta(y))
                .then(|| self.ratio_decay_lower(x, y))
        });
        [upper, self.report(Property::DecayLower, b, c)]
    }

    /// Harnack: `G(x₁, y) ≤ C(k) G(x₂, y)` for `x₁, x₂ ∈ D(y)` with
    /// `d(x₁, x₂) ≤ k (δ(x₁) ∧ δ(x₂))`. One report per `k`, nondecreasing.
    pub fn check_harnack(&self) -> Vec<PropertyReport> {
        let mut ks = self.params.k_grid.clone();
        ks.sort_unstable();
        ks.dedup();
        let kmax = *ks.last().unwrap() as f64;
        let n = self.len();
        let mut bests: Vec<Best> = ks.iter().map(|_| Best::new()).collect();
        let mut cov = Coverage::default();
        let visit = |x1: usize, x2: usize, y: usize, bests: &mut [Best], cov: &mut Coverage| {
            let half = 0.5 * self.geom.delta(y);
            let d = self.geom.d(x1, x2);
            let md = self.geom.delta(x1).min(self.geom.delta(x2));
            if self.geom.d(x1, y) < half || self.geom.d(x2, y) < half || d > kmax * md {
                cov.skipped += 1;
                return;
            }
            cov.samples += 1;
            let idx = ks.iter().position(|&k| d <= k as f64 * md).unwrap();
            let v = self.ratio_harnack(x1, x2, y);
            bests[idx].offer(v, || self.witness(&[x1, x2, y]));
        };
        if (n as u64).pow(3) <= self.params.exhaustive_limit {
            cov.exhaustive = true;
            for y in 0..n {
                for x1 in 0..n {
                    for x2 in 0..n {
                        visit(x1, x2, y, &mut bests, &mut cov);
                    }
                }
            }
        } else {
            let mut rng = self.rng(S_HARNACK);
            for _ in 0..self.params.n_samples {
                let (x1, x2, y) = (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                );
                visit(x1, x2, y, &mut bests, &mut cov);
            }
        }
        let mut out = Vec::with_capacity(ks.len());
        let mut acc = Best::new();
        for (k, b) in ks.iter().zip(bests) {
            if let Some(w) = b.witness {
                acc.offer(b.value, || w);
            }
            out.push(self.report(Property::Harnack(*k), acc.clone(), cov));
        }
        out
    }

    /// Uniform boundary Harnack principle.
    ///
    /// For each `ξ ∈ ∂D` the sets `X_r = {M d(x, ξ) < r}` and
    /// `Y_r = {d(y, ξ) ≥ r}` only change at finitely many `r`; for every
    /// distinct `X_r` the smallest admissible `r` (a multiple of `h`, at most
    /// `r₀`) gives the largest `Y_r`, and the ratio of ratios over
    /// `Y_r × Y_r` is `max_y R(y) / min_y R(y)` with `R = G(x₁,·)/G(x₂,·)`.
    /// The sweep is exact over `x₁, x₂, y₁, y₂`.
    pub fn check_ubhp(&self) -> PropertyReport {
        let n = self.len();
        let h = self.geom.mesh();
        let (m, r0) = (self.params.m, self.params.r0);
        let mut best = Best::new();
        let mut cov = Coverage {
            exhaustive: true,
            ..Coverage::default()
        };
        let mut levels: Vec<f64> = Vec::new();
        let mut xs: Vec<usize> = Vec::new();
        let mut ys: Vec<usize> = Vec::new();
        for (b, &xi) in self.geom.domain().boundary().iter().enumerate() {
            levels.clear();
            levels.extend((0..n).map(|i| self.geom.d_boundary(b, i)));
            levels.sort_by(f64::total_cmp);
            levels.dedup();
            let mut last_r = 0.0;
            for &dk in &levels {
                // smallest multiple of h strictly above M·d_k
                let r = (num::floor(m * dk / h) + 1.0) * h;
                if r > r0 * (1.0 + 1e-12) {
                    break;
                }
                if r == last_r {
                    continue;
                }
                last_r = r;
                xs.clear();
                ys.clear();
                for i in 0..n {
                    let d = self.geom.d_boundary(b, i);
                    if m * d < r {
                        xs.push(i);
                    } else if d >= r {
                        ys.push(i);
                    }
                }
                if xs.len() < 2 || ys.is_empty() {
                    cov.skipped += 1;
                    continue;
                }
                for (ia, &x1) in xs.iter().enumerate() {
                    for &x2 in &xs[ia + 1..] {
                        let (mut hi, mut lo) = (f64::NEG_INFINITY, f64::INFINITY);
                        let (mut yh, mut yl) = (0, 0);
                        for &y in &ys {
                            let q = self.gr(x1, y) / self.gr(x2, y);
                            if q > hi {
                                hi = q;
                                yh = y;
                            }
                            if q < lo {
                                lo = q;
                                yl = y;
                            }
                        }
                        cov.samples += (ys.len() * ys.len()) as u64;
                        let v = self.ratio_ubhp(x1, x2, yh, yl);
                        best.offer(v, || Witness {
                            points: [x1, x2, yh, yl].iter().map(|&i| self.vertex(i)).collect(),
                            boundary: Some(xi),
                            radii: vec![r],
                        });
                    }
                }
            }
        }
        self.report(Property::Ubhp, best, cov)
    }

    /// Generalized 3G over pairwise distinct triples.
    pub fn check_generalized_3g(&self) -> PropertyReport {
        let (b, c) = self.sweep_triples(S_GEN3G, |x, y, z| {
            Self::distinct(x, y, z).then(|| self.ratio_generalized_3g(x, y, z))
        });
        self.report(Property::Generalized3g, b, c)
    }

    /// Strong generalized 3G: `G̃(z, y) ≤ C G̃(x, y)` whenever
    /// `d(z, x) ≤ d(z, y)`. `x = z` is allowed and contributes 1.
    pub fn check_strong_3g(&self) -> PropertyReport {
        let n = self.len();
        if (n as u64).pow(3) <= self.params.exhaustive_limit {
            let vals: Vec<f64> = (0..n * n).map(|k| self.gt(k / n, k % n)).collect();
            let mut best = Best::new();
            let cov = self.ball_prefix_sweep(&vals, true, |z, y, x| {
                best.offer(self.ratio_strong_3g(x, y, z), || self.witness(&[x, y, z]));
            });
            return self.report(Property::Strong3g, best, cov);
        }
        let (b, c) = self.sweep_triples(S_STRONG, |x, y, z| {
            (x != y && z != y && self.geom.d(z, x) <= self.geom.d(z, y))
                .then(|| self.ratio_strong_3g(x, y, z))
        });
        self.report(Property::Strong3g, b, c)
    }

    /// Exhaustive reduction over triples `(x, y, z)` with `x ≠ y ≠ z` and
    /// `d(z, x) ≤ d(z, y)`: for every `(z, y)` finds the `x` extremizing
    /// `vals[x·n + y]` (minimum when `lower`) and hands it to `visit(z, y, x)`.
    /// Infinite entries mark excluded pairs.
    ///
    /// Visiting `x` in order of distance from `z` turns the inner loop into
    /// a running extremum over contiguous rows, `O(n³)` with a small constant.
    fn ball_prefix_sweep(
        &self,
        vals: &[f64],
        lower: bool,
        mut visit: impl FnMut(usize, usize, usize),
    ) -> Coverage {
        let n = self.len();
        let sentinel = if lower {
            f64::INFINITY
        } else {
            f64::NEG_INFINITY
        };
        let mut cov = Coverage {
            exhaustive: true,
            ..Coverage::default()
        };
        let mut order: Vec<usize> = (0..n).collect();
        let mut run = vec![sentinel; n];
        let mut arg = vec![usize::MAX; n];
        for z in 0..n {
            order.sort_by(|&a, &b| {
                self.geom
                    .d(z, a)
                    .total_cmp(&self.geom.d(z, b))
                    .then(a.cmp(&b))
            });
            run.iter_mut().for_each(|v| *v = sentinel);
            arg.iter_mut().for_each(|v| *v = usize::MAX);
            let mut k = 0;
            while k < n {
                let dk = self.geom.d(z, order[k]);
                let mut e = k;
                while e < n && self.geom.d(z, order[e]) == dk {
                    e += 1;
                }
                for &x in &order[k..e] {
                    let row = &vals[x * n..(x + 1) * n];
                    for y in (0..x).chain(x + 1..n) {
                        let v = row[y];
                        if (lower && v < run[y]) || (!lower && v > run[y]) {
                            run[y] = v;
                            arg[y] = x;
                        }
                    }
                }
                for &y in &order[k..e] {
                    if y == z {
                        continue;
                    }
                    // every x in the ball except y itself
                    cov.samples += (e - 1) as u64;
                    if arg[y] != usize::MAX {
                        visit(z, y, arg[y]);
                    }
                }
                k = e;
            }
        }
        cov.skipped = (n as u64).pow(3) - cov.samples;
        cov
    }

    /// Evaluates both generalized 3G ratios on `samples` random distinct
    /// triples. They agree up to rounding because the table is symmetric.
    pub fn check_alt_3g_equivalence(&self, samples: u64) -> AltReport {
        let n = self.len();
        let mut rng = self.rng(S_ALT);
        let (mut bd, mut bp) = (Best::new(), Best::new());
        let mut cov = Coverage::default();
        let mut worst: f64 = 0.0;
        if n >= 3 {
            while cov.samples < samples {
                let (x, y, z) = (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                );
                if !Self::distinct(x, y, z) {
                    cov.skipped += 1;
                    continue;
                }
                cov.samples += 1;
                let a = self.ratio_generalized_3g(x, y, z);
                let p = self.ratio_alt_3g(x, y, z);
                worst = worst.max((a - p).abs() / a.max(p));
                bd.offer(a, || self.witness(&[x, y, z]));
                bp.offer(p, || self.witness(&[x, y, z]));
            }
        }
        AltReport {
            max_discrepancy: worst,
            definition: self.report(Property::Generalized3g, bd, cov),
            proposition: self.report(Property::Alt3g, bp, cov),
        }
    }

    pub(crate) fn b_table(&self) -> BTable {
        let n = self.len();
        let (m, eps) = (self.params.m, self.params.epsilon);
        let o = self.geom.domain().local(self.params.basepoint).unwrap() as u32;
        let mut ext = vec![(o, o); n * n];
        for x in 0..n {
            if self.geom.delta(x) >= eps {
                continue;
            }
            for y in x..n {
                let r = self.geom.rxy(x, y);
                if r >= eps {
                    continue;
                }
                let (mut lo, mut hi) = (u32::MAX, u32::MAX);
                for a in 0..n {
                    if self.geom.delta(a) > r / m
                        && self.geom.d(x, a).max(self.geom.d(y, a)) < 5.0 * r
                    {
                        let ga = self.gb(a);
                        if lo == u32::MAX || ga < self.gb(lo as usize) {
                            lo = a as u32;
                        }
                        if hi == u32::MAX || ga > self.gb(hi as usize) {
                            hi = a as u32;
                        }
                    }
                }
                ext[x * n + y] = (lo, hi);
                ext[y * n + x] = (lo, hi);
            }
        }
        BTable { n, ext }
    }

    /// B-approximation. Returns the upper constant `C`, the lower constant
    /// as `1/c`, and the spread `max g / min g` over each `B(x, y)`.
    pub fn check_b_approximation(&self) -> [PropertyReport; 3] {
        let table = self.b_table();
        let (mut up, mut lo, mut spread) = (Best::new(), Best::new(), Best::new());
        let (_, cov) = self.sweep_pairs(S_BAPPROX, |x, y| {
            if x == y {
                return None;
            }
            let (amin, amax) = table.get(x, y)?;
            up.offer(self.ratio_b_upper(x, y, amax), || {
                self.witness(&[x, y, amax])
            });
            lo.offer(self.ratio_b_lower(x, y, amin), || {
                self.witness(&[x, y, amin])
            });
            spread.offer(self.gb(amax) / self.gb(amin), || {
                self.witness(&[amax, amin])
            });
            Some(0.0)
        });
        [
            self.report(Property::BApproxUpper, up, cov),
            self.report(Property::BApproxLower, lo, cov),
            self.report(Property::BSetSpread, spread, cov),
        ]
    }

    /// `g ≍ 1` on `{δ ≥ ε/(8M³)}`, reported as `sup 1/g`.
    pub fn check_amazing_lemma(&self) -> PropertyReport {
        let m3 = num::powi(self.params.m, 3);
        let floor = self.params.epsilon / (8.0 * m3);
        let mut best = Best::new();
        let mut cov = Coverage {
            exhaustive: true,
            ..Coverage::default()
        };
        for x in 0..self.len() {
            if self.geom.delta(x) >= floor {
                cov.samples += 1;
                best.offer(1.0 / self.gb(x), || self.witness(&[x]));
            } else {
                cov.skipped += 1;
            }
        }
        self.report(Property::AmazingLemma, best, cov)
    }

    /// `G(x, y) ≍ Ψ(d)/V(x, d)` when `d(x, y) ≤ (8M³/ε)(δ(x) ∧ δ(y))`.
    pub fn check_near_diagonal(&self) -> [PropertyReport; 2] {
        let k = 8.0 * num::powi(self.params.m, 3) / self.params.epsilon;
        let near = |x: usize, y: usize| {
            x != y && self.geom.d(x, y) <= k * self.geom.delta(x).min(self.geom.delta(y))
        };
        let (b, c) = self.sweep_pairs(S_NEAR, |x, y| {
            near(x, y).then(|| self.ratio_decay_upper(x, y))
        });
        let upper = self.report(Property::NearDiagonalUpper, b, c);
        let (b, c) = self.sweep_pairs(S_NEAR, |x, y| {
            near(x, y).then(|| self.ratio_decay_lower(x, y))
        });
        [upper, self.report(Property::NearDiagonalLower, b, c)]
    }

    /// Generalized Carleson estimate, parts (i), (ii) and (iii).
    ///
    /// Radii run over positive multiples of `h` below `ε`.
    pub fn check_carleson(&self) -> [PropertyReport; 3] {
        let n = self.len();
        let h = self.geom.mesh();
        let (m, eps) = (self.params.m, self.params.epsilon);
        let mut radii = Vec::new();
        let mut k = 1.0;
        while k * h < eps {
            radii.push(k * h);
            k += 1.0;
        }
        let argext = |keep: &dyn Fn(usize) -> bool| {
            let (mut lo, mut hi) = (None::<usize>, None::<usize>);
            for i in 0..n {
                if keep(i) {
                    if lo.is_none_or(|l| self.gb(i) < self.gb(l)) {
                        lo = Some(i);
                    }
                    if hi.is_none_or(|l| self.gb(i) > self.gb(l)) {
                        hi = Some(i);
                    }
                }
            }
            lo.zip(hi)
        };
        let (mut b1, mut b2) = (Best::new(), Best::new());
        let (mut c1, mut c2) = (
            Coverage {
                exhaustive: true,
                ..Coverage::default()
            },
            Coverage {
                exhaustive: true,
                ..Coverage::default()
            },
        );
        for (b, &xi) in self.geom.domain().boundary().iter().enumerate() {
            let db = |i: usize| self.geom.d_boundary(b, i);
            for &r in &radii {
                let rho = r / m;
                let s_set = argext(&|i| db(i) < rho);
                let a_set = argext(&|i| db(i) < rho && self.geom.delta(i) > rho / m);
                match (s_set, a_set) {
                    (Some((_, x)), Some((a, _))) => {
                        c1.samples += 1;
                        b1.offer(self.gb(x) / self.gb(a), || Witness {
                            points: vec![self.vertex(x), self.vertex(a)],
                            boundary: Some(xi),
                            radii: vec![r],
                        });
                    }
                    _ => c1.skipped += 1,
                }
                let a_set = argext(&|i| db(i) < r && self.geom.delta(i) > r / m);
                for &s in radii.iter().take_while(|&&s| s <= r) {
                    let x_set = argext(&|i| db(i) < m * s && self.geom.delta(i) > s / m);
                    match (x_set, a_set) {
                        (Some((_, x)), Some((a, _))) => {
                            c2.samples += 1;
                            b2.offer(self.gb(x) / self.gb(a), || Witness {
                                points: vec![self.vertex(x), self.vertex(a)],
                                boundary: Some(xi),
                                radii: vec![r, s],
                            });
                        }
                        _ => c2.skipped += 1,
                    }
                }
            }
        }
        let table = self.b_table();
        let mut b3 = Best::new();
        if (n as u64).pow(3) <= self.params.exhaustive_limit {
            let vals: Vec<f64> = (0..n * n)
                .map(|k| {
                    table
                        .get(k / n, k % n)
                        .map_or(f64::NEG_INFINITY, |(_, a)| self.gb(a))
                })
                .collect();
            let c3 = self.ball_prefix_sweep(&vals, false, |z, y, x| {
                if let (Some((_, a)), Some((bb, _))) = (table.get(x, y), table.get(z, y)) {
                    b3.offer(self.gb(a) / self.gb(bb), || self.witness(&[x, y, z, a, bb]));
                }
            });
            return [
                self.report(Property::CarlesonI, b1, c1),
                self.report(Property::CarlesonII, b2, c2),
                self.report(Property::CarlesonIII, b3, c3),
            ];
        }
        let (_, c3) = self.sweep_triples(S_CARL3, |x, y, z| {
            if x == y || z == y || self.geom.d(z, x) > self.geom.d(z, y) {
                return None;
            }
            let (_, a) = table.get(x, y)?;
            let (bb, _) = table.get(z, y)?;
            b3.offer(self.gb(a) / self.gb(bb), || self.witness(&[x, y, z, a, bb]));
            Some(0.0)
        });
        [
            self.report(Property::CarlesonI, b1, c1),
            self.report(Property::CarlesonII, b2, c2),
            self.report(Property::CarlesonIII, b3, c3),
        ]
    }

    /// Global 3G: `G(x,z)G(y,z)/G(x,y) ≤ C (Ψ/V at (x,z) + Ψ/V at (y,z))`
    /// over pairwise distinct triples.
    pub fn check_global_3g(&self) -> PropertyReport {
        let (b, c) = self.sweep_triples(S_GLOBAL, |x, y, z| {
            Self::distinct(x, y, z).then(|| self.ratio_global_3g(x, y, z))
        });
        self.report(Property::Global3g, b, c)
    }

    /// Standing assumption (v) over distinct triples with `d(x,y) ≤ d(y,z)`.
    pub fn check_assumption_v(&self) -> PropertyReport {
        let (b, c) = self.sweep_triples(S_ASSV, |x, y, z| {
            (Self::distinct(x, y, z) && self.geom.d(x, y) <= self.geom.d(y, z))
                .then(|| self.ratio_assumption_v(x, y, z))
        });
        self.report(Property::AssumptionV, b, c)
    }

    /// Runs the checkers named in `select` (all when empty).
    pub fn run(&self, select: &[Property]) -> Vec<PropertyReport> {
        use Property::*;
        let want = |p: Property| select.is_empty() || select.contains(&p);
        let mut out = Vec::new();
        if want(AssumptionV) {
            out.push(self.check_assumption_v());
        }
        if want(QuasiSymmetry) {
            out.push(self.check_quasi_symmetry());
        }
        if want(DecayUpper) || want(DecayLower) {
            out.extend(
                self.check_quasi_polynomial_decay()
                    .into_iter()
                    .filter(|r| want(r.property)),
            );
        }
        if select.is_empty() || select.iter().any(|p| matches!(p, Harnack(_))) {
            out.extend(self.check_harnack().into_iter().filter(|r| {
                select.is_empty() || select.contains(&Harnack(0)) || select.contains(&r.property)
            }));
        }
        if want(Ubhp) {
            out.push(self.check_ubhp());
        }
        if want(Generalized3g) {
            out.push(self.check_generalized_3g());
        }
        if want(Strong3g) {
            out.push(self.check_strong_3g());
        }
        if want(Alt3g) {
            out.push(
                self.check_alt_3g_equivalence(self.params.n_samples.min(10_000))
                    .proposition,
            );
        }
        if want(BApproxUpper) || want(BApproxLower) || want(BSetSpread) {
            out.extend(
                self.check_b_approximation()
                    .into_iter()
                    .filter(|r| want(r.property)),
            );
        }
        if want(AmazingLemma) {
            out.push(self.check_amazing_lemma());
        }
        if want(NearDiagonalUpper) || want(NearDiagonalLower) {
            out.extend(
                self.check_near_diagonal()
                    .into_iter()
                    .filter(|r| want(r.property)),
            );
        }
        if want(CarlesonI) || want(CarlesonII) || want(CarlesonIII) {
            out.extend(
                self.check_carleson()
                    .into_iter()
                    .filter(|r| want(r.property)),
            );
        }
        if want(Global3g) {
            out.push(self.check_global_3g());
        }
        out
    }
}
