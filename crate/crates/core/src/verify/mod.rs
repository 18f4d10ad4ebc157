//! Best-constant sweeps for the boundary Harnack, 3G, B-approximation,
//! Carleson and scale hypotheses.
//!
//! Every checker returns a [`PropertyReport`]: the supremum of the tested
//! ratio over the tuples it visited, one witness tuple attaining it, and how
//! the tuples were chosen. Tuple spaces up to `exhaustive_limit` are
//! enumerated; larger ones are sampled with a fixed seed.
//!
//! Green-function checks run on interior positions of a [`GreenTable`] and
//! measure distances with the intrinsic metric of the domain.

mod dashboard;
mod global;
mod green;
mod scale;

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::{DomainGeometry, VolumeIndex};
use crate::num;
use crate::potential::GreenTable;
use crate::sampling;

pub use dashboard::{
    dashboard_row, domain_verdict, equivalence_dashboard, DashboardConfig, DashboardDomain,
    DashboardReport, DashboardRow, DomainVerdict, Verdict,
};
pub use global::{check_global_3g_space, AnalyticBall, GreenSpace, SpaceReport};
pub use green::AltReport;
pub use scale::{
    check_assumption_62, check_volume_doubling, fit_scale_function, volume_doubling_ratio,
    Assumption62, ScaleFit, DEFAULT_GAMMA_TOL,
};

pub const EXHAUSTIVE_LIMIT: u64 = 1_000_000;
pub const DEFAULT_SAMPLES: u64 = 1_000_000;

/// Default Harnack-chain ball ratio; must stay below 2.
pub const DEFAULT_CHAIN_M: f64 = 1.9;

/// Constants of the standing assumption.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionParams {
    pub m: f64,
    pub r0: f64,
    pub epsilon: f64,
    /// Basepoint as a graph vertex.
    pub basepoint: usize,
    pub chain_m: f64,
    pub k_grid: Vec<u32>,
    /// Exponent of `Ψ(r) = r^β`.
    pub psi_beta: f64,
    pub n_samples: u64,
    pub exhaustive_limit: u64,
    pub seed: u64,
}

impl AssumptionParams {
    /// `M = 3`, `r₀` half the largest `δ`, `ε = r₀/(12M)`, `Ψ(r) = r²`.
    pub fn new(geom: &DomainGeometry) -> Self {
        let m = 3.0;
        let r0 = 0.5 * geom.deltas().iter().copied().fold(0.0, f64::max);
        Self {
            m,
            r0,
            epsilon: r0 / (12.0 * m),
            basepoint: geom.domain().basepoint(),
            chain_m: DEFAULT_CHAIN_M,
            k_grid: alloc::vec![1, 2, 4, 8],
            psi_beta: 2.0,
            n_samples: DEFAULT_SAMPLES,
            exhaustive_limit: EXHAUSTIVE_LIMIT,
            seed: 0,
        }
    }

    /// Sets `r₀` and the derived `ε = r₀/(12M)`.
    pub fn with_r0(mut self, r0: f64) -> Self {
        self.r0 = r0;
        self.epsilon = r0 / (12.0 * self.m);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m >= 3.0) {
            return Err(Error::InvalidArgument(format!(
                "M must be at least 3 (got {})",
                self.m
            )));
        }
        if !(self.r0 > 0.0) || !(self.epsilon > 0.0) || !(self.epsilon < self.r0) {
            return Err(Error::InvalidArgument(format!(
                "need 0 < eps < r0 (got eps = {}, r0 = {})",
                self.epsilon, self.r0
            )));
        }
        if !(self.chain_m > 1.0) || !(self.psi_beta > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "need chain_M > 1 and beta > 0 (got {}, {})",
                self.chain_m, self.psi_beta
            )));
        }
        if self.k_grid.is_empty() || self.k_grid.contains(&0) {
            return Err(Error::InvalidArgument(
                "k grid must be nonempty and positive".into(),
            ));
        }
        if self.n_samples == 0 {
            return Err(Error::InvalidArgument(
                "sample budget must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Inequalities the checkers know about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    VolumeDoubling,
    AssumptionV,
    QuasiSymmetry,
    DecayUpper,
    DecayLower,
    Harnack(u32),
    Ubhp,
    Generalized3g,
    Strong3g,
    Alt3g,
    BApproxUpper,
    BApproxLower,
    BSetSpread,
    AmazingLemma,
    NearDiagonalUpper,
    NearDiagonalLower,
    CarlesonI,
    CarlesonII,
    CarlesonIII,
    Global3g,
}

impl Property {
    /// Selection keys accepted by [`Property::parse`].
    pub const NAMES: &'static [&'static str] = &[
        "volume_doubling",
        "assumption_v",
        "quasi_symmetry",
        "decay_upper",
        "decay_lower",
        "harnack",
        "ubhp",
        "generalized_3g",
        "strong_3g",
        "alt_3g",
        "b_approx_upper",
        "b_approx_lower",
        "b_set_spread",
        "amazing_lemma",
        "near_diagonal_upper",
        "near_diagonal_lower",
        "carleson_i",
        "carleson_ii",
        "carleson_iii",
        "global_3g",
    ];

    /// Parses a selection key. `harnack` stands for the whole k-grid.
    pub fn parse(s: &str) -> Option<Self> {
        use Property::*;
        Some(match s {
            "volume_doubling" => VolumeDoubling,
            "assumption_v" => AssumptionV,
            "quasi_symmetry" => QuasiSymmetry,
            "decay_upper" => DecayUpper,
            "decay_lower" => DecayLower,
            "harnack" => Harnack(0),
            "ubhp" => Ubhp,
            "generalized_3g" => Generalized3g,
            "strong_3g" => Strong3g,
            "alt_3g" => Alt3g,
            "b_approx_upper" => BApproxUpper,
            "b_approx_lower" => BApproxLower,
            "b_set_spread" => BSetSpread,
            "amazing_lemma" => AmazingLemma,
            "near_diagonal_upper" => NearDiagonalUpper,
            "near_diagonal_lower" => NearDiagonalLower,
            "carleson_i" => CarlesonI,
            "carleson_ii" => CarlesonII,
            "carleson_iii" => CarlesonIII,
            "global_3g" => Global3g,
            _ => {
                return s
                    .strip_prefix("harnack_k")
                    .and_then(|k| k.parse().ok())
                    .map(Harnack)
            }
        })
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Property::Harnack(k) => write!(f, "harnack_k{k}"),
            other => {
                let i = match other {
                    Property::VolumeDoubling => 0,
                    Property::AssumptionV => 1,
                    Property::QuasiSymmetry => 2,
                    Property::DecayUpper => 3,
                    Property::DecayLower => 4,
                    Property::Ubhp => 6,
                    Property::Generalized3g => 7,
                    Property::Strong3g => 8,
                    Property::Alt3g => 9,
                    Property::BApproxUpper => 10,
                    Property::BApproxLower => 11,
                    Property::BSetSpread => 12,
                    Property::AmazingLemma => 13,
                    Property::NearDiagonalUpper => 14,
                    Property::NearDiagonalLower => 15,
                    Property::CarlesonI => 16,
                    Property::CarlesonII => 17,
                    Property::CarlesonIII => 18,
                    Property::Global3g => 19,
                    Property::Harnack(_) => unreachable!(),
                };
                f.write_str(Self::NAMES[i])
            }
        }
    }
}

/// A tuple attaining a reported constant. Points are graph vertices in the
/// argument order of the tested ratio.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Witness {
    pub points: Vec<usize>,
    pub boundary: Option<usize>,
    pub radii: Vec<f64>,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        let mut sep = |f: &mut fmt::Formatter<'_>| {
            let s = if first { "" } else { " " };
            first = false;
            f.write_str(s)
        };
        if let Some(b) = self.boundary {
            sep(f)?;
            write!(f, "xi={b}")?;
        }
        for r in &self.radii {
            sep(f)?;
            write!(f, "r={r}")?;
        }
        for p in &self.points {
            sep(f)?;
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyReport {
    pub property: Property,
    /// Supremum of the tested ratio over the visited tuples. Lower-bound
    /// constants are reported through the reciprocal ratio, so every
    /// `best` is a "C" with `C ≥ 1` meaning the same thing.
    pub best: f64,
    pub witness: Option<Witness>,
    pub samples: u64,
    pub exhaustive: bool,
    /// Tuples excluded as degenerate or below the lattice resolution.
    pub skipped: u64,
    /// `None` for graph-level checks that do not use the assumption constants.
    pub params: Option<AssumptionParams>,
    pub seed: u64,
}

/// Running maximum with its first witness.
#[derive(Debug, Clone)]
pub(crate) struct Best {
    pub value: f64,
    pub witness: Option<Witness>,
}

impl Best {
    pub fn new() -> Self {
        Self {
            value: f64::NEG_INFINITY,
            witness: None,
        }
    }

    #[inline]
    pub fn offer(&mut self, value: f64, witness: impl FnOnce() -> Witness) {
        if value > self.value {
            self.value = value;
            self.witness = Some(witness());
        }
    }
}

/// How a tuple space was covered.
#[derive(Debug, Clone, Copy, Default)]
pub(crate) struct Coverage {
    pub samples: u64,
    pub skipped: u64,
    pub exhaustive: bool,
}

/// Green table, geometry and parameters bundled for the checkers.
pub struct Verifier<'a> {
    green: &'a GreenTable,
    geom: &'a DomainGeometry,
    vols: VolumeIndex,
    params: AssumptionParams,
}

impl<'a> Verifier<'a> {
    pub fn new(
        green: &'a GreenTable,
        geom: &'a DomainGeometry,
        params: AssumptionParams,
    ) -> Result<Self> {
        params.validate()?;
        if green.len() != geom.len() || green.domain().interior() != geom.domain().interior() {
            return Err(Error::InvalidArgument(
                "green table and geometry describe different domains".into(),
            ));
        }
        if geom.domain().local(params.basepoint).is_none() {
            return Err(Error::NotInDomain(params.basepoint));
        }
        Ok(Self {
            green,
            geom,
            vols: geom.volume_index(),
            params,
        })
    }

    pub fn params(&self) -> &AssumptionParams {
        &self.params
    }

    pub fn green(&self) -> &GreenTable {
        self.green
    }

    pub fn geometry(&self) -> &DomainGeometry {
        self.geom
    }

    pub fn len(&self) -> usize {
        self.green.len()
    }

    pub fn is_empty(&self) -> bool {
        self.green.is_empty()
    }

    #[inline]
    pub(crate) fn psi(&self, r: f64) -> f64 {
        num::powf(r, self.params.psi_beta)
    }

    #[inline]
    pub(crate) fn vol(&self, i: usize, r: f64) -> f64 {
        self.vols.volume(i, r)
    }

    /// `Ψ(d(x, y)) / V(x, d(x, y))`.
    #[inline]
    pub(crate) fn scale(&self, x: usize, y: usize) -> f64 {
        let d = self.geom.d(x, y);
        self.psi(d) / self.vol(x, d)
    }

    #[inline]
    pub(crate) fn gr(&self, x: usize, y: usize) -> f64 {
        self.green.get(x, y)
    }

    #[inline]
    pub(crate) fn gb(&self, x: usize) -> f64 {
        self.green.benchmark(x)
    }

    #[inline]
    pub(crate) fn gt(&self, x: usize, y: usize) -> f64 {
        self.green.normalized(x, y)
    }

    pub(crate) fn vertex(&self, i: usize) -> usize {
        self.geom.domain().interior()[i]
    }

    pub(crate) fn witness(&self, pts: &[usize]) -> Witness {
        Witness {
            points: pts.iter().map(|&i| self.vertex(i)).collect(),
            boundary: None,
            radii: Vec::new(),
        }
    }

    pub(crate) fn rng(&self, stream: u64) -> ChaCha8Rng {
        sampling::rng(self.params.seed, stream)
    }

    pub(crate) fn report(&self, property: Property, best: Best, cov: Coverage) -> PropertyReport {
        PropertyReport {
            property,
            best: if best.witness.is_some() {
                best.value
            } else {
                f64::NAN
            },
            witness: best.witness,
            samples: cov.samples,
            exhaustive: cov.exhaustive,
            skipped: cov.skipped,
            params: Some(self.params.clone()),
            seed: self.params.seed,
        }
    }

    /// Visits every ordered pair, or `n_samples` uniform pairs when there are
    /// more than `exhaustive_limit`. `f` returns `None` for excluded tuples.
    pub(crate) fn sweep_pairs(
        &self,
        stream: u64,
        mut f: impl FnMut(usize, usize) -> Option<f64>,
    ) -> (Best, Coverage) {
        let n = self.len();
        let mut best = Best::new();
        let mut cov = Coverage::default();
        let mut visit = |x: usize, y: usize, best: &mut Best, cov: &mut Coverage| match f(x, y) {
            Some(v) => {
                cov.samples += 1;
                best.offer(v, || self.witness(&[x, y]));
            }
            None => cov.skipped += 1,
        };
        if (n as u64).pow(2) <= self.params.exhaustive_limit {
            cov.exhaustive = true;
            for x in 0..n {
                for y in 0..n {
                    visit(x, y, &mut best, &mut cov);
                }
            }
        } else {
            let mut rng = self.rng(stream);
            for _ in 0..self.params.n_samples {
                let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
                visit(x, y, &mut best, &mut cov);
            }
        }
        (best, cov)
    }

    /// Triple version of [`Verifier::sweep_pairs`].
    pub(crate) fn sweep_triples(
        &self,
        stream: u64,
        mut f: impl FnMut(usize, usize, usize) -> Option<f64>,
    ) -> (Best, Coverage) {
        let n = self.len();
        let mut best = Best::new();
        let mut cov = Coverage::default();
        let mut visit =
            |x: usize, y: usize, z: usize, best: &mut Best, cov: &mut Coverage| match f(x, y, z) {
                Some(v) => {
                    cov.samples += 1;
                    best.offer(v, || self.witness(&[x, y, z]));
                }
                None => cov.skipped += 1,
            };
        if (n as u64).pow(3) <= self.params.exhaustive_limit {
            cov.exhaustive = true;
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        visit(x, y, z, &mut best, &mut cov);
                    }
                }
            }
        } else {
            let mut rng = self.rng(stream);
            for _ in 0..self.params.n_samples {
                let (x, y, z) = (
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                    rng.gen_range(0..n),
                );
                visit(x, y, z, &mut best, &mut cov);
            }
        }
        (best, cov)
    }

    fn locals(&self, w: &Witness, k: usize) -> Result<Vec<usize>> {
        if w.points.len() != k {
            return Err(Error::InvalidArgument(format!("witness needs {k} points")));
        }
        let dom = self.geom.domain();
        w.points
            .iter()
            .map(|&v| dom.local(v).ok_or(Error::NotInDomain(v)))
            .collect()
    }

    fn boundary_index(&self, w: &Witness) -> Result<usize> {
        let xi = w
            .boundary
            .ok_or_else(|| Error::InvalidArgument("witness lacks a boundary point".into()))?;
        self.geom
            .domain()
            .boundary()
            .binary_search(&xi)
            .map_err(|_| Error::InvalidArgument(format!("vertex {xi} is not a boundary vertex")))
    }

    /// Re-evaluates the ratio of `report` at its witness.
    pub fn replay(&self, report: &PropertyReport) -> Result<f64> {
        use Property::*;
        let w = report
            .witness
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument(String::from("report has no witness")))?;
        let k = match report.property {
            QuasiSymmetry | DecayUpper | DecayLower | NearDiagonalUpper | NearDiagonalLower
            | BSetSpread => 2,
            AmazingLemma => 1,
            Harnack(_) | Generalized3g | Strong3g | Alt3g | Global3g | AssumptionV => 3,
            BApproxUpper | BApproxLower => 3,
            Ubhp => 4,
            CarlesonI | CarlesonII => 2,
            CarlesonIII => 5,
            VolumeDoubling => {
                return Err(Error::InvalidArgument(
                    "volume doubling is a graph check; use volume_doubling_ratio".into(),
                ))
            }
        };
        let p = self.locals(w, k)?;
        Ok(match report.property {
            QuasiSymmetry => self.ratio_symmetry(p[0], p[1]),
            DecayUpper | NearDiagonalUpper => self.ratio_decay_upper(p[0], p[1]),
            DecayLower | NearDiagonalLower => self.ratio_decay_lower(p[0], p[1]),
            BSetSpread => self.gb(p[0]) / self.gb(p[1]),
            AmazingLemma => 1.0 / self.gb(p[0]),
            Harnack(_) => self.ratio_harnack(p[0], p[1], p[2]),
            Generalized3g => self.ratio_generalized_3g(p[0], p[1], p[2]),
            Alt3g => self.ratio_alt_3g(p[0], p[1], p[2]),
            Strong3g => self.ratio_strong_3g(p[0], p[1], p[2]),
            Global3g => self.ratio_global_3g(p[0], p[1], p[2]),
            AssumptionV => self.ratio_assumption_v(p[0], p[1], p[2]),
            BApproxUpper => self.ratio_b_upper(p[0], p[1], p[2]),
            BApproxLower => self.ratio_b_lower(p[0], p[1], p[2]),
            Ubhp => {
                self.boundary_index(w)?;
                self.ratio_ubhp(p[0], p[1], p[2], p[3])
            }
            CarlesonI | CarlesonII => {
                self.boundary_index(w)?;
                self.gb(p[0]) / self.gb(p[1])
            }
            CarlesonIII => self.gb(p[3]) / self.gb(p[4]),
            VolumeDoubling => unreachable!(),
        })
    }
}

#[cfg(test)]
mod tests;
