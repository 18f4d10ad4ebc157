//! The five commands. Each is a pure function of the configuration and the
//! cache; outputs carry the seed and config hash.

use std::cell::RefCell;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use potlab_core::gauge::{
    critical_scaling, extend_potential, gauge_direct, gauge_mc, khasminskii_check, w_norm,
    w_norm_solve, GaugeReport,
};
use potlab_core::generators::enclosing_box;
use potlab_core::geometry::DomainGeometry;
use potlab_core::potential::{green_table, GreenTable};
use potlab_core::sampling;
use potlab_core::verify::{
    check_volume_doubling, dashboard_row, domain_verdict, AssumptionParams, DashboardConfig,
    DashboardRow, Property, PropertyReport, Verifier,
};
use potlab_core::{DomainView, Error as CoreError};

use crate::cache::{write_atomic, GreenCache};
use crate::config::{DomainEntry, RunConfig};
use crate::error::{Error, Result};
use crate::format::{real, write_domain, write_graph, write_green};

type Notify<'a> = Box<dyn FnMut(&str) + 'a>;

/// A configuration with its hash, plus where messages go.
pub struct Run<'a> {
    pub cfg: RunConfig,
    pub hash: String,
    notices: RefCell<Notify<'a>>,
}

/// One generated refinement level.
pub struct Level<'e> {
    pub entry: &'e DomainEntry,
    pub level: usize,
    pub label: String,
    pub dom: DomainView,
}

/// Comma-separated text with a header row and `seed,config_hash` leading
/// every row.
struct Csv {
    text: String,
    prefix: String,
}

impl Csv {
    fn new(run: &Run, cols: &[&str]) -> Self {
        let mut text = String::from("seed,config_hash");
        for c in cols {
            text.push(',');
            text.push_str(c);
        }
        text.push('\n');
        Self {
            text,
            prefix: format!("{},{}", run.cfg.seed, run.hash),
        }
    }

    fn row(&mut self, fields: &[String]) {
        self.text.push_str(&self.prefix);
        for f in fields {
            debug_assert!(!f.contains([',', '\n']));
            self.text.push(',');
            self.text.push_str(f);
        }
        self.text.push('\n');
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

impl<'a> Run<'a> {
    pub fn new(cfg: RunConfig) -> Result<Self> {
        cfg.validate()?;
        let hash = cfg.hash();
        Ok(Self {
            cfg,
            hash,
            notices: RefCell::new(Box::new(|m| eprintln!("{m}"))),
        })
    }

    /// Sends notices somewhere other than stderr.
    pub fn with_notices(mut self, f: impl FnMut(&str) + 'a) -> Self {
        self.notices = RefCell::new(Box::new(f));
        self
    }

    fn notice(&self, msg: &str) {
        (self.notices.borrow_mut())(msg)
    }

    pub fn out(&self) -> &Path {
        &self.cfg.out
    }

    fn stamp(&self) -> String {
        format!("# seed {} config_hash {}\n", self.cfg.seed, self.hash)
    }

    fn write(&self, rel: impl AsRef<Path>, text: &str) -> Result<PathBuf> {
        let path = self.out().join(rel);
        write_atomic(&path, text)?;
        Ok(path)
    }

    fn cache(&self) -> GreenCache {
        GreenCache::new(self.out().join("cache"))
    }

    /// Every configured domain level, in file order.
    pub fn levels(&self) -> Result<Vec<Level<'_>>> {
        let mut out = Vec::new();
        for e in &self.cfg.domain {
            for &l in &e.levels {
                out.push(Level {
                    entry: e,
                    level: l,
                    label: e.label(l),
                    dom: e.generate(l, self.cfg.budget_vertices)?,
                });
            }
        }
        Ok(out)
    }

    fn green(&self, dom: &DomainView) -> Result<GreenTable> {
        Ok(self.cache().get(dom, self.cfg.solver.tol)?.0)
    }

    pub fn params(&self, geom: &DomainGeometry) -> AssumptionParams {
        let p = &self.cfg.params;
        let mut a = AssumptionParams::new(geom);
        a.m = p.m;
        let r0 = p.r0.unwrap_or(a.r0);
        a = a.with_r0(r0);
        if let Some(e) = p.epsilon {
            a.epsilon = e;
        }
        a.chain_m = p.chain_m;
        a.k_grid = p.k_grid.clone();
        a.psi_beta = p.psi_beta;
        a.n_samples = p.n_samples;
        a.exhaustive_limit = p.exhaustive_limit;
        a.seed = self.cfg.seed;
        a
    }

    pub fn dashboard_config(&self) -> DashboardConfig {
        let p = &self.cfg.params;
        let d = &self.cfg.dashboard;
        DashboardConfig {
            m: p.m,
            r0: d.r0.or(p.r0),
            epsilon: d.epsilon.or(p.epsilon),
            exhaustive_limit: p.exhaustive_limit,
            n_samples: p.n_samples,
            seed: self.cfg.seed,
            stability: d.stability,
            tol: self.cfg.solver.tol,
        }
    }

    /// `gen`: one edge-list graph and one domain sidecar per level.
    pub fn cmd_gen(&mut self) -> Result<Vec<PathBuf>> {
        let mut files = Vec::new();
        for l in self.levels()? {
            let stamp = self.stamp();
            files.push(self.write(
                format!("graphs/{}.graph", l.label),
                &(stamp.clone() + &write_graph(l.dom.graph())),
            )?);
            files.push(self.write(
                format!("graphs/{}.domain", l.label),
                &(stamp + &write_domain(&l.dom)),
            )?);
        }
        Ok(files)
    }

    /// `green`: Green tables through the cache.
    pub fn cmd_green(&mut self) -> Result<Vec<PathBuf>> {
        let mut files = Vec::new();
        for l in self.levels()? {
            let (t, hit) = self.cache().get(&l.dom, self.cfg.solver.tol)?;
            let msg = format!(
                "{}: {} vertices, {}",
                l.label,
                l.dom.len(),
                if hit { "cached" } else { "solved" }
            );
            files.push(self.write(
                format!("green/{}.green", l.label),
                &(self.stamp() + &write_green(&t)),
            )?);
            if self.cfg.solver.export_csv {
                files.push(self.write(format!("green/{}.csv", l.label), &self.pair_csv(&t))?);
            }
            self.notice(&msg);
        }
        Ok(files)
    }

    fn pair_csv(&self, t: &GreenTable) -> String {
        let cols = ["x", "y", "vertex_x", "vertex_y", "g_x", "g_y", "gt"];
        let mut csv = Csv::new(self, &cols);
        let ids = t.domain().interior();
        for x in 0..t.len() {
            for y in 0..t.len() {
                csv.row(&[
                    x.to_string(),
                    y.to_string(),
                    ids[x].to_string(),
                    ids[y].to_string(),
                    real(t.benchmark(x)),
                    real(t.benchmark(y)),
                    real(t.normalized(x, y)),
                ]);
            }
        }
        csv.text
    }

    /// `verify`: selected property sweeps on every level, then the
    /// dashboard.
    pub fn cmd_verify(&mut self) -> Result<Vec<PathBuf>> {
        let props = self.cfg.properties();
        let dash_on = self.cfg.dashboard.enabled;
        if props.is_empty() && !dash_on {
            self.notice(
                "nothing to verify: the property selection is empty and the dashboard is disabled",
            );
            return Ok(Vec::new());
        }
        if props.is_empty() {
            self.notice("property selection is empty; running the dashboard only");
        }
        let cols = [
            "domain",
            "level",
            "vertices",
            "property",
            "best",
            "samples",
            "skipped",
            "exhaustive",
            "witness",
        ];
        let mut csv = Csv::new(self, &cols);
        let mut doc = self.stamp();
        let mut rows: Vec<DashboardRow> = Vec::new();
        let dcfg = self.dashboard_config();
        let levels = self.levels()?;
        for l in &levels {
            let green = self.green(&l.dom)?;
            let geom = DomainGeometry::new(&l.dom)?;
            if !props.is_empty() {
                let reports = self.sweep(&props, &green, &geom)?;
                writeln!(doc, "[{}]", l.label).unwrap();
                for r in &reports {
                    csv.row(&[
                        l.entry.name.clone(),
                        l.level.to_string(),
                        l.dom.len().to_string(),
                        r.property.to_string(),
                        real(r.best),
                        r.samples.to_string(),
                        r.skipped.to_string(),
                        r.exhaustive.to_string(),
                        r.witness
                            .as_ref()
                            .map(|w| w.to_string())
                            .unwrap_or_default(),
                    ]);
                    writeln!(
                        doc,
                        "{} = {}  # samples {} skipped {} exhaustive {}",
                        r.property,
                        real(r.best),
                        r.samples,
                        r.skipped,
                        r.exhaustive
                    )
                    .unwrap();
                }
                doc.push('\n');
            }
            if dash_on {
                rows.push(dashboard_row(
                    &l.entry.name,
                    &l.level.to_string(),
                    &green,
                    &geom,
                    &dcfg,
                )?);
            }
            let msg = format!("{}: verified", l.label);
            self.notice(&msg);
        }
        let mut files = Vec::new();
        if !props.is_empty() {
            files.push(self.write("verify.csv", &csv.text)?);
            files.push(self.write("verify.txt", &doc)?);
        }
        if dash_on {
            files.extend(self.write_dashboard(&rows, dcfg.stability)?);
        }
        Ok(files)
    }

    fn sweep(
        &self,
        props: &[Property],
        green: &GreenTable,
        geom: &DomainGeometry,
    ) -> Result<Vec<PropertyReport>> {
        let v = Verifier::new(green, geom, self.params(geom))?;
        let mut out = Vec::new();
        if props.contains(&Property::VolumeDoubling) {
            out.push(check_volume_doubling(
                geom.domain().graph(),
                self.cfg.params.doubling_centers,
                self.cfg.seed,
            ));
        }
        let rest: Vec<Property> = props
            .iter()
            .copied()
            .filter(|p| !matches!(p, Property::VolumeDoubling | Property::Alt3g))
            .collect();
        if !rest.is_empty() {
            out.extend(v.run(&rest));
        }
        if props.contains(&Property::Alt3g) {
            out.push(
                v.check_alt_3g_equivalence(self.cfg.params.alt_samples)
                    .proposition,
            );
        }
        Ok(out)
    }

    fn write_dashboard(&mut self, rows: &[DashboardRow], stability: f64) -> Result<Vec<PathBuf>> {
        let cols = [
            "domain",
            "level",
            "vertices",
            "ubhp",
            "strong_3g",
            "b_upper",
            "b_lower",
            "exhaustive",
        ];
        let mut csv = Csv::new(self, &cols);
        for r in rows {
            let ex = [&r.ubhp, &r.strong_3g, &r.b_upper, &r.b_lower]
                .iter()
                .all(|p| p.exhaustive);
            csv.row(&[
                r.domain.clone(),
                r.level.clone(),
                r.vertices.to_string(),
                real(r.ubhp.best),
                real(r.strong_3g.best),
                real(r.b_upper.best),
                real(r.b_lower.best),
                ex.to_string(),
            ]);
        }
        let mut vcsv = Csv::new(
            self,
            &[
                "domain",
                "verdict",
                "ubhp_stable",
                "strong_3g_stable",
                "b_approx_stable",
            ],
        );
        let mut start = 0;
        while start < rows.len() {
            let name = &rows[start].domain;
            let end = start
                + rows[start..]
                    .iter()
                    .take_while(|r| &r.domain == name)
                    .count();
            if end - start < 2 {
                let msg = format!("dashboard: {name} has a single level, no verdict");
                self.notice(&msg);
            } else {
                let v = domain_verdict(name, &rows[start..end], stability)?;
                vcsv.row(&[
                    v.domain.clone(),
                    v.verdict.as_str().into(),
                    v.stable[0].to_string(),
                    v.stable[1].to_string(),
                    v.stable[2].to_string(),
                ]);
            }
            start = end;
        }
        Ok(vec![
            self.write("dashboard.csv", &csv.text)?,
            self.write("verdicts.csv", &vcsv.text)?,
        ])
    }

    /// The configured potential `W`: `amplitude` on the ball of `radius`
    /// around the basepoint, by interior position.
    pub fn potential(&self, dom: &DomainView) -> Vec<f64> {
        let g = &self.cfg.gauge;
        let d = dom.intrinsic_distances_from(dom.basepoint());
        dom.interior()
            .iter()
            .map(|&v| if d[v] < g.radius { g.amplitude } else { 0.0 })
            .collect()
    }

    /// Gauge pipeline for one multiplier `λ`.
    pub fn gauge_report(
        &self,
        green: &GreenTable,
        ambient: Option<(&GreenTable, &[usize])>,
        lambda: f64,
    ) -> Result<GaugeReport> {
        let g = &self.cfg.gauge;
        let w: Vec<f64> = self
            .potential(green.domain())
            .iter()
            .map(|v| lambda * v)
            .collect();
        let norm = match ambient {
            Some((amb, map)) => Some(w_norm(amb, &extend_potential(amb.domain(), map, &w)?)?),
            None => None,
        };
        let kh = khasminskii_check(green, &w)?;
        let direct = match gauge_direct(green, &w) {
            Ok(d) => Some(d),
            Err(CoreError::Indefinite) => None,
            Err(e) => return Err(e.into()),
        };
        let mut mc = Vec::new();
        if direct.is_some() {
            let mut rng = sampling::rng(self.cfg.seed, u64::MAX);
            for k in 0..g.mc_pairs {
                let (x, y) = sampling::distinct_pair(&mut rng, green.len());
                mc.push(gauge_mc(
                    green,
                    &w,
                    x,
                    y,
                    g.mc_paths,
                    self.cfg.seed.wrapping_add(k as u64),
                )?);
            }
        }
        Ok(GaugeReport {
            w_norm: norm,
            khasminskii: kh,
            direct_sup: direct.as_ref().map(|d| d.sup),
            mc,
            seed: self.cfg.seed,
        })
    }

    /// `gauge`: the λ-sweep on the configured domain, plus the critical
    /// multiplier.
    pub fn cmd_gauge(&mut self) -> Result<Vec<PathBuf>> {
        let g = self.cfg.gauge.clone();
        if !g.enabled {
            self.notice("gauge disabled");
            return Ok(Vec::new());
        }
        let entry = self
            .cfg
            .domain
            .iter()
            .find(|e| e.name == g.domain)
            .expect("validated")
            .clone();
        let dom = entry.generate(g.level, self.cfg.budget_vertices)?;
        let green = self.green(&dom)?;
        let (boxed, map) = enclosing_box(&dom, g.enclosure, self.cfg.budget_vertices)?;
        let amb = green_table(&boxed, self.cfg.solver.tol)?;
        // Sensitivity of ‖W‖ to the box: one solve on a box 4/3 as wide.
        let wide_factor = g.enclosure * 4.0 / 3.0;
        let wide = match enclosing_box(&dom, wide_factor, self.cfg.budget_vertices) {
            Ok((wbox, wmap)) => {
                let w = extend_potential(&wbox, &wmap, &self.potential(&dom))?;
                Some(w_norm_solve(&wbox, &w, self.cfg.solver.tol)?)
            }
            Err(e) => {
                self.notice(&format!("wide enclosure skipped: {e}"));
                None
            }
        };
        let cols = [
            "domain",
            "level",
            "lambda",
            "w_norm",
            "w_norm_wide",
            "s",
            "bound",
            "direct_sup",
            "x",
            "y",
            "direct",
            "mc_mean",
            "mc_se",
            "mc_paths",
        ];
        let mut csv = Csv::new(self, &cols);
        let label = entry.label(g.level);
        let mut doc = self.stamp();
        for &lambda in &g.lambdas {
            let rep = self.gauge_report(&green, Some((&amb, &map)), lambda)?;
            let direct = if rep.direct_sup.is_some() {
                let w: Vec<f64> = self.potential(&dom).iter().map(|v| lambda * v).collect();
                Some(gauge_direct(&green, &w)?)
            } else {
                None
            };
            let head = vec![
                entry.name.clone(),
                g.level.to_string(),
                real(lambda),
                opt(rep.w_norm),
                opt(wide.map(|n| lambda * n)),
                real(rep.khasminskii.s),
                opt(rep.khasminskii.bound),
                opt(rep.direct_sup),
            ];
            if rep.mc.is_empty() {
                let mut row = head.clone();
                row.extend(std::iter::repeat_n(String::new(), 6));
                csv.row(&row);
            }
            for m in &rep.mc {
                let mut row = head.clone();
                row.extend([
                    m.x.to_string(),
                    m.y.to_string(),
                    opt(direct.as_ref().map(|d| d.get(m.x, m.y))),
                    real(m.mean),
                    real(m.std_err),
                    m.n_paths.to_string(),
                ]);
                csv.row(&row);
            }
            writeln!(
                doc,
                "[{label} lambda={}]\nw_norm = {}\nw_norm_wide = {}  # enclosure {}\ns = {}\nbound = {}\ndirect_sup = {}\n",
                real(lambda),
                opt(rep.w_norm),
                opt(wide.map(|n| lambda * n)),
                real(wide_factor),
                real(rep.khasminskii.s),
                opt(rep.khasminskii.bound),
                opt(rep.direct_sup)
            )
            .unwrap();
        }
        let w = self.potential(&dom);
        let star = critical_scaling(&green, &w, 1e-10)?;
        writeln!(
            doc,
            "[{label} critical]\nlambda_star = {}  # s(lambda_star W) = 1",
            real(star)
        )
        .unwrap();
        let mut crit = Csv::new(self, &["domain", "level", "lambda_star"]);
        crit.row(&[entry.name.clone(), g.level.to_string(), real(star)]);
        let files = vec![
            self.write("gauge.csv", &csv.text)?,
            self.write("gauge_scaling.csv", &crit.text)?,
            self.write("gauge.txt", &doc)?,
        ];
        self.notice(&format!("{label}: gauge done"));
        Ok(files)
    }

    /// `report`: every CSV in the output directory, merged into one long
    /// table, plus a summary.
    pub fn cmd_report(&mut self) -> Result<Vec<PathBuf>> {
        const SOURCES: [&str; 5] = ["verify", "dashboard", "verdicts", "gauge", "gauge_scaling"];
        let mut merged = Csv::new(self, &["source", "row", "column", "value"]);
        let mut summary = format!(
            "# potlab report\n\nseed {}, config hash `{}`\n",
            self.cfg.seed, self.hash
        );
        let mut found = 0;
        for src in SOURCES {
            let path = self.out().join(format!("{src}.csv"));
            let text = match fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) if e.kind() == std::io::ErrorKind::NotFound => continue,
                Err(e) => return Err(Error::io(&path, e)),
            };
            found += 1;
            let mut lines = text.lines();
            let header: Vec<&str> = lines.next().unwrap_or_default().split(',').collect();
            let body: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
            for (i, row) in body.iter().enumerate() {
                if row.len() != header.len() || row[1] != self.hash {
                    let msg = format!(
                        "{src}.csv row {} is from another configuration; skipped",
                        i + 1
                    );
                    self.notice(&msg);
                    continue;
                }
                for (c, v) in header.iter().zip(row).skip(2) {
                    merged.row(&[
                        src.into(),
                        (i + 1).to_string(),
                        c.to_string(),
                        v.to_string(),
                    ]);
                }
            }
            if matches!(src, "dashboard" | "verdicts" | "gauge_scaling") {
                write!(summary, "\n## {src}\n\n| {} |\n|", header[2..].join(" | ")).unwrap();
                summary.push_str(&" --- |".repeat(header.len() - 2));
                summary.push('\n');
                for row in body
                    .iter()
                    .filter(|r| r.len() == header.len() && r[1] == self.hash)
                {
                    let cells: Vec<String> = row[2..].iter().map(|v| short(v)).collect();
                    writeln!(summary, "| {} |", cells.join(" | ")).unwrap();
                }
            }
        }
        if found == 0 {
            self.notice("no reports found; run verify or gauge first");
            return Ok(Vec::new());
        }
        Ok(vec![
            self.write("report.csv", &merged.text)?,
            self.write("summary.md", &summary)?,
        ])
    }
}

/// Four significant digits for the summary table.
fn short(v: &str) -> String {
    match v.parse::<f64>() {
        Ok(x) if v.contains('e') => format!("{x:.4e}"),
        _ => v.to_string(),
    }
}
