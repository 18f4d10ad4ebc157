//! Joint UBHP / strong 3G / B-approximation table across refinements.

use alloc::string::String;
use alloc::vec::Vec;

use super::{
    AssumptionParams, PropertyReport, Verifier, DEFAULT_CHAIN_M, DEFAULT_SAMPLES, EXHAUSTIVE_LIMIT,
};
use crate::error::{Error, Result};
use crate::geometry::DomainGeometry;
use crate::mmgraph::DomainView;
use crate::potential::{green_table, GreenTable, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq)]
pub struct DashboardConfig {
    pub m: f64,
    /// Overrides the per-domain default `r₀ = max δ / 2`.
    pub r0: Option<f64>,
    /// Overrides `ε = r₀/(12M)`.
    pub epsilon: Option<f64>,
    pub exhaustive_limit: u64,
    pub n_samples: u64,
    pub seed: u64,
    /// Consecutive refinements whose constants differ by less than this
    /// factor count as stable.
    pub stability: f64,
    pub tol: f64,
}

impl Default for DashboardConfig {
    fn default() -> Self {
        Self {
            m: 3.0,
            r0: None,
            epsilon: None,
            exhaustive_limit: EXHAUSTIVE_LIMIT,
            n_samples: DEFAULT_SAMPLES,
            seed: 0,
            stability: 2.0,
            tol: DEFAULT_TOL,
        }
    }
}

impl DashboardConfig {
    /// Assumption constants for one refinement level.
    pub fn params(&self, geom: &DomainGeometry) -> AssumptionParams {
        let mut p = AssumptionParams::new(geom);
        p.m = self.m;
        let r0 = self.r0.unwrap_or(p.r0);
        p = p.with_r0(r0);
        if let Some(e) = self.epsilon {
            p.epsilon = e;
        }
        p.chain_m = DEFAULT_CHAIN_M;
        p.exhaustive_limit = self.exhaustive_limit;
        p.n_samples = self.n_samples;
        p.seed = self.seed;
        p
    }
}

/// One domain family, coarsest level first.
#[derive(Debug, Clone)]
pub struct DashboardDomain {
    pub name: String,
    pub levels: Vec<(String, DomainView)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DashboardRow {
    pub domain: String,
    pub level: String,
    pub vertices: usize,
    pub ubhp: PropertyReport,
    pub strong_3g: PropertyReport,
    pub b_upper: PropertyReport,
    pub b_lower: PropertyReport,
}

impl DashboardRow {
    fn constants(&self) -> [f64; 4] {
        [
            self.ubhp.best,
            self.strong_3g.best,
            self.b_upper.best,
            self.b_lower.best,
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    /// Every constant is stable across refinements.
    CoFinite,
    /// Every property has a constant that keeps growing.
    CoBlowup,
    /// Some properties stay bounded while others blow up.
    Discordant,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::CoFinite => "CO-FINITE",
            Verdict::CoBlowup => "CO-BLOWUP",
            Verdict::Discordant => "DISCORDANT",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DomainVerdict {
    pub domain: String,
    /// Stability of UBHP, strong 3G and B-approximation (both constants).
    pub stable: [bool; 3],
    pub verdict: Verdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DashboardReport {
    pub rows: Vec<DashboardRow>,
    pub verdicts: Vec<DomainVerdict>,
}

fn stable(values: &[f64], factor: f64) -> bool {
    values.windows(2).all(|w| {
        let (a, b) = (w[0], w[1]);
        a.is_finite() && b.is_finite() && a.max(b) < factor * a.min(b)
    })
}

/// Dashboard constants of one refinement level.
pub fn dashboard_row(
    domain: &str,
    level: &str,
    green: &GreenTable,
    geom: &DomainGeometry,
    cfg: &DashboardConfig,
) -> Result<DashboardRow> {
    let v = Verifier::new(green, geom, cfg.params(geom))?;
    let [b_upper, b_lower, _] = v.check_b_approximation();
    Ok(DashboardRow {
        domain: domain.into(),
        level: level.into(),
        vertices: green.len(),
        ubhp: v.check_ubhp(),
        strong_3g: v.check_strong_3g(),
        b_upper,
        b_lower,
    })
}

/// Verdict from the rows of one domain, coarsest level first.
pub fn domain_verdict(
    domain: &str,
    rows: &[DashboardRow],
    stability: f64,
) -> Result<DomainVerdict> {
    if rows.len() < 2 {
        return Err(Error::InvalidArgument(alloc::format!(
            "domain {domain} needs at least two refinement levels"
        )));
    }
    let series = |k: usize| rows.iter().map(|r| r.constants()[k]).collect::<Vec<_>>();
    let s = [
        stable(&series(0), stability),
        stable(&series(1), stability),
        stable(&series(2), stability) && stable(&series(3), stability),
    ];
    let verdict = match s.iter().filter(|&&b| b).count() {
        3 => Verdict::CoFinite,
        0 => Verdict::CoBlowup,
        _ => Verdict::Discordant,
    };
    Ok(DomainVerdict {
        domain: domain.into(),
        stable: s,
        verdict,
    })
}

/// Runs the three equivalent properties on every level of every domain.
pub fn equivalence_dashboard(
    suite: &[DashboardDomain],
    cfg: &DashboardConfig,
) -> Result<DashboardReport> {
    let mut rows = Vec::new();
    let mut verdicts = Vec::new();
    for dom in suite {
        if dom.levels.len() < 2 {
            return Err(Error::InvalidArgument(alloc::format!(
                "domain {} needs at least two refinement levels",
                dom.name
            )));
        }
        let first = rows.len();
        for (label, view) in &dom.levels {
            let green = green_table(view, cfg.tol)?;
            let geom = DomainGeometry::new(view)?;
            rows.push(dashboard_row(&dom.name, label, &green, &geom, cfg)?);
        }
        verdicts.push(domain_verdict(&dom.name, &rows[first..], cfg.stability)?);
    }
    Ok(DashboardReport { rows, verdicts })
}
