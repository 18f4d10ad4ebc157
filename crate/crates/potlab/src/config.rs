//! Run configuration: one TOML file with flat dotted keys.
//!
//! [`REFERENCE`] lists every key with its default.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use potlab_core::generators::{DomainKind, DomainSpec, DEFAULT_VERTEX_BUDGET};
use potlab_core::verify::{Property, DEFAULT_CHAIN_M, DEFAULT_SAMPLES, EXHAUSTIVE_LIMIT};
use potlab_core::DomainView;

use crate::error::{Error, Result};

/// The documented defaults, as a config file.
pub const REFERENCE: &str = include_str!("../defaults.toml");

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub out: PathBuf,
    pub budget_vertices: usize,
    pub select: Vec<String>,
    pub solver: SolverConfig,
    pub params: Params,
    pub dashboard: DashboardSection,
    pub gauge: GaugeSection,
    pub domain: Vec<DomainEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverConfig {
    pub tol: f64,
    /// Also write `green/<label>.csv` with g and G̃ for every pair.
    pub export_csv: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Params {
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(rename = "chain_M")]
    pub chain_m: f64,
    pub k_grid: Vec<u32>,
    pub psi_beta: f64,
    pub n_samples: u64,
    pub exhaustive_limit: u64,
    pub alt_samples: u64,
    pub doubling_centers: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DashboardSection {
    pub enabled: bool,
    pub stability: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r0: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaugeSection {
    pub enabled: bool,
    pub domain: String,
    pub level: usize,
    pub amplitude: f64,
    pub radius: f64,
    pub lambdas: Vec<f64>,
    pub enclosure: f64,
    pub mc_paths: u64,
    pub mc_pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainEntry {
    pub name: String,
    pub kind: String,
    #[serde(default = "two")]
    pub n: usize,
    pub levels: Vec<usize>,
    #[serde(default = "three")]
    pub exponent: f64,
    #[serde(default = "one")]
    pub subdivide: usize,
    #[serde(default)]
    pub subcopy: bool,
}

fn one() -> usize {
    1
}
fn two() -> usize {
    2
}
fn three() -> f64 {
    3.0
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            export_csv: false,
        }
    }
}

impl Default for Params {
    fn default() -> Self {
        Self {
            m: 3.0,
            r0: None,
            epsilon: None,
            chain_m: DEFAULT_CHAIN_M,
            k_grid: vec![1, 2, 4, 8],
            psi_beta: 2.0,
            n_samples: DEFAULT_SAMPLES,
            exhaustive_limit: EXHAUSTIVE_LIMIT,
            alt_samples: 10_000,
            doubling_centers: 1_000_000,
        }
    }
}

impl Default for DashboardSection {
    fn default() -> Self {
        Self {
            enabled: true,
            stability: 2.0,
            epsilon: Some(0.125),
            r0: None,
        }
    }
}

impl Default for GaugeSection {
    fn default() -> Self {
        Self {
            enabled: true,
            domain: "square".into(),
            level: 16,
            amplitude: 20.0,
            radius: 0.25,
            lambdas: vec![0.25, 0.5, 1.0, 2.0],
            enclosure: 3.0,
            mc_paths: 10_000,
            mc_pairs: 5,
        }
    }
}

impl DomainEntry {
    fn family(name: &str, kind: &str) -> Self {
        Self {
            name: name.into(),
            kind: kind.into(),
            n: 2,
            levels: vec![16, 32],
            exponent: 3.0,
            subdivide: 1,
            subcopy: false,
        }
    }

    pub fn kind(&self) -> Option<DomainKind> {
        Some(match self.kind.as_str() {
            "cube" => DomainKind::CubeGrid,
            "slit" => DomainKind::SlitSquare,
            "cusp" => DomainKind::CuspCorridor,
            "l_shape" => DomainKind::LShape,
            "ball" => DomainKind::BallLattice,
            "carpet" => DomainKind::CarpetPrefractal,
            _ => return None,
        })
    }

    pub fn spec(&self, level: usize) -> DomainSpec {
        let mut s = DomainSpec::new(self.kind().expect("validated"), self.n, level);
        s.exponent = self.exponent;
        s.subdivide = self.subdivide;
        s.subcopy = self.subcopy;
        s
    }

    pub fn generate(&self, level: usize, budget: usize) -> Result<DomainView> {
        Ok(self.spec(level).generate(budget)?)
    }

    /// File stem of one level, e.g. `slit32`.
    pub fn label(&self, level: usize) -> String {
        format!("{}{level}", self.name)
    }
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            out: PathBuf::from("potlab-out"),
            budget_vertices: DEFAULT_VERTEX_BUDGET,
            select: Property::NAMES.iter().map(|s| s.to_string()).collect(),
            solver: SolverConfig::default(),
            params: Params::default(),
            dashboard: DashboardSection::default(),
            gauge: GaugeSection::default(),
            domain: vec![
                DomainEntry::family("square", "cube"),
                DomainEntry::family("slit", "slit"),
                DomainEntry::family("cusp", "cusp"),
            ],
        }
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::config(key, format!("must be positive, got {v}")))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| Error::config("<file>", e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn validate(&self) -> Result<()> {
        if self.budget_vertices == 0 {
            return Err(Error::config("budget_vertices", "must be positive"));
        }
        for (i, s) in self.select.iter().enumerate() {
            if Property::parse(s).is_none() {
                return Err(Error::config(
                    format!("select[{i}]"),
                    format!("unknown property {s:?}"),
                ));
            }
        }
        positive("solver.tol", self.solver.tol)?;
        let p = &self.params;
        if !(3.0..f64::INFINITY).contains(&p.m) {
            return Err(Error::config(
                "params.M",
                format!("must be ≥ 3, got {}", p.m),
            ));
        }
        if let Some(r0) = p.r0 {
            positive("params.r0", r0)?;
        }
        if let Some(e) = p.epsilon {
            positive("params.epsilon", e)?;
        }
        if !(p.chain_m > 1.0 && p.chain_m < 2.0) {
            return Err(Error::config(
                "params.chain_M",
                format!("must lie in (1, 2), got {}", p.chain_m),
            ));
        }
        if p.k_grid.is_empty() || p.k_grid.contains(&0) {
            return Err(Error::config(
                "params.k_grid",
                "needs at least one positive entry",
            ));
        }
        positive("params.psi_beta", p.psi_beta)?;
        for (key, v) in [
            ("params.n_samples", p.n_samples),
            ("params.alt_samples", p.alt_samples),
            ("params.doubling_centers", p.doubling_centers as u64),
        ] {
            if v == 0 {
                return Err(Error::config(key, "must be positive"));
            }
        }
        let d = &self.dashboard;
        if d.stability.is_nan() || d.stability <= 1.0 {
            return Err(Error::config(
                "dashboard.stability",
                format!("must exceed 1, got {}", d.stability),
            ));
        }
        if let Some(e) = d.epsilon {
            positive("dashboard.epsilon", e)?;
        }
        if let Some(r0) = d.r0 {
            positive("dashboard.r0", r0)?;
        }
        let mut names = std::collections::BTreeSet::new();
        for (i, e) in self.domain.iter().enumerate() {
            let key = |k: &str| format!("domain[{i}].{k}");
            if e.name.is_empty()
                || !e
                    .name
                    .chars()
                    .all(|c| c.is_ascii_alphanumeric() || c == '_')
            {
                return Err(Error::config(
                    key("name"),
                    format!("must be a nonempty [A-Za-z0-9_] word, got {:?}", e.name),
                ));
            }
            if !names.insert(e.name.as_str()) {
                return Err(Error::config(
                    key("name"),
                    format!("duplicate domain {:?}", e.name),
                ));
            }
            if e.kind().is_none() {
                return Err(Error::config(
                    key("kind"),
                    format!("unknown kind {:?}", e.kind),
                ));
            }
            if e.levels.is_empty() || e.levels.contains(&0) {
                return Err(Error::config(
                    key("levels"),
                    "needs at least one positive level",
                ));
            }
            positive(&key("exponent"), e.exponent)?;
            if e.subdivide == 0 {
                return Err(Error::config(key("subdivide"), "must be positive"));
            }
        }
        let g = &self.gauge;
        if g.enabled {
            match self.domain.iter().find(|e| e.name == g.domain) {
                None => {
                    return Err(Error::config(
                        "gauge.domain",
                        format!("no domain named {:?}", g.domain),
                    ))
                }
                Some(e) if !e.levels.contains(&g.level) => {
                    return Err(Error::config(
                        "gauge.level",
                        format!("{} has no level {}", g.domain, g.level),
                    ))
                }
                _ => {}
            }
            positive("gauge.amplitude", g.amplitude)?;
            positive("gauge.radius", g.radius)?;
            if g.enclosure.is_nan() || g.enclosure < 1.0 {
                return Err(Error::config(
                    "gauge.enclosure",
                    format!("must be ≥ 1, got {}", g.enclosure),
                ));
            }
            for (i, &l) in g.lambdas.iter().enumerate() {
                positive(&format!("gauge.lambdas[{i}]"), l)?;
            }
            if g.mc_paths < 100 {
                return Err(Error::config("gauge.mc_paths", "needs at least 100 paths"));
            }
        }
        Ok(())
    }

    /// Selected properties, in selection order.
    pub fn properties(&self) -> Vec<Property> {
        self.select
            .iter()
            .filter_map(|s| Property::parse(s))
            .collect()
    }

    /// Canonical TOML of the effective configuration.
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// First 16 hex digits of the SHA-256 of [`Self::canonical`], with the
    /// output directory left out so a moved run hashes the same.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = PathBuf::new();
        let d = Sha256::digest(c.canonical().as_bytes());
        hex::encode(&d[..8])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_page_matches_defaults() {
        assert_eq!(RunConfig::parse(REFERENCE).unwrap(), RunConfig::default());
        assert_eq!(RunConfig::parse("").unwrap(), RunConfig::default());
    }

    #[test]
    fn dotted_keys() {
        let c = RunConfig::parse("params.M = 4\nparams.r0 = 0.5\nseed = 7\n").unwrap();
        assert_eq!(c.params.m, 4.0);
        assert_eq!(c.params.r0, Some(0.5));
        assert_eq!(c.seed, 7);
    }

    #[test]
    fn errors_name_the_key() {
        let msg = |t: &str| RunConfig::parse(t).unwrap_err().to_string();
        assert!(msg("params.M = 2").contains("params.M"));
        assert!(msg("select = [\"ubhp\", \"nope\"]").contains("select[1]"));
        assert!(msg("params.chain_M = 2.5").contains("params.chain_M"));
        assert!(
            msg("[[domain]]\nname = \"a\"\nkind = \"torus\"\nlevels = [4]")
                .contains("domain[0].kind")
        );
        assert!(msg("gauge.domain = \"none\"").contains("gauge.domain"));
        assert!(msg("params.bogus = 1").contains("bogus"));
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(a.hash(), b.hash());
        b.out = PathBuf::from("elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
        assert_eq!(a.hash().len(), 16);
        assert_eq!(RunConfig::parse(&a.canonical()).unwrap(), a);
    }
}
