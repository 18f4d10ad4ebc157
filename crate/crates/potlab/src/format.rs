//! Plain-text graph, domain and Green table files.
//!
//! Graph files:
//!
//! ```text
//! vertices N mesh H mode geodesic|euclidean
//! v i x1 ... xk m
//! e i j c
//! ```
//!
//! Reals are written with 17 significant digits, so a write/read cycle is
//! exact. Lines starting with `#` are comments.

use std::fmt::Write as _;
use std::sync::Arc;

use potlab_core::potential::GreenTable;
use potlab_core::{DomainView, MetricMeasureGraph, MetricMode};

use crate::error::{Error, Result};

/// A real with 17 significant digits.
pub fn real(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_graph(g: &MetricMeasureGraph) -> String {
    let mut s = String::new();
    let mode = match g.mode() {
        MetricMode::Geodesic => "geodesic",
        MetricMode::Euclidean => "euclidean",
    };
    writeln!(
        s,
        "vertices {} mesh {} mode {mode}",
        g.vertex_count(),
        real(g.mesh())
    )
    .unwrap();
    for v in 0..g.vertex_count() {
        write!(s, "v {v}").unwrap();
        for x in g.coords(v).unwrap_or(&[]) {
            write!(s, " {}", real(*x)).unwrap();
        }
        writeln!(s, " {}", real(g.measure(v))).unwrap();
    }
    for (i, j, c) in g.edges() {
        writeln!(s, "e {i} {j} {}", real(c)).unwrap();
    }
    s
}

struct Lines<'a> {
    what: &'a str,
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    line: usize,
}

impl<'a> Lines<'a> {
    fn new(what: &'a str, text: &'a str) -> Self {
        Self {
            what,
            inner: text.lines().enumerate(),
            line: 0,
        }
    }

    fn err(&self, msg: impl Into<String>) -> Error {
        Error::Parse {
            what: self.what.into(),
            line: self.line,
            msg: msg.into(),
        }
    }

    fn next(&mut self) -> Option<Vec<&'a str>> {
        for (i, l) in self.inner.by_ref() {
            let l = l.trim();
            if l.is_empty() || l.starts_with('#') {
                continue;
            }
            self.line = i + 1;
            return Some(l.split_whitespace().collect());
        }
        None
    }

    fn num<T: std::str::FromStr>(&self, tok: &str) -> Result<T> {
        tok.parse()
            .map_err(|_| self.err(format!("bad number {tok:?}")))
    }
}

pub fn read_graph(text: &str) -> Result<MetricMeasureGraph> {
    let mut it = Lines::new("graph", text);
    let head = it.next().ok_or_else(|| it.err("empty file"))?;
    if head.len() != 6 || head[0] != "vertices" || head[2] != "mesh" || head[4] != "mode" {
        return Err(it.err("expected `vertices N mesh H mode M`"));
    }
    let n: usize = it.num(head[1])?;
    let mesh: f64 = it.num(head[3])?;
    let mode = match head[5] {
        "geodesic" => MetricMode::Geodesic,
        "euclidean" => MetricMode::Euclidean,
        m => return Err(it.err(format!("unknown mode {m:?}"))),
    };
    let mut measure = Vec::with_capacity(n);
    let mut coords = Vec::new();
    let mut dim = None;
    let mut edges = Vec::new();
    while let Some(tok) = it.next() {
        match tok[0] {
            "v" => {
                if tok.len() < 3 {
                    return Err(it.err("vertex line needs an index and a measure"));
                }
                let i: usize = it.num(tok[1])?;
                if i != measure.len() {
                    return Err(it.err(format!("vertex {i} out of order")));
                }
                let k = tok.len() - 3;
                if *dim.get_or_insert(k) != k {
                    return Err(it.err("inconsistent coordinate count"));
                }
                for t in &tok[2..tok.len() - 1] {
                    coords.push(it.num(t)?);
                }
                measure.push(it.num(tok[tok.len() - 1])?);
            }
            "e" if tok.len() == 4 => {
                edges.push((it.num(tok[1])?, it.num(tok[2])?, it.num(tok[3])?))
            }
            _ => return Err(it.err(format!("unexpected record {:?}", tok[0]))),
        }
    }
    if measure.len() != n {
        return Err(it.err(format!("header says {n} vertices, found {}", measure.len())));
    }
    Ok(MetricMeasureGraph::new(
        measure,
        &edges,
        mesh,
        mode,
        dim.unwrap_or(0),
        coords,
    )?)
}

/// Domain sidecar: `domain interior K boundary B`, then `i v` and `b v`.
pub fn write_domain(dom: &DomainView) -> String {
    let mut s = String::new();
    writeln!(
        s,
        "domain interior {} boundary {}",
        dom.len(),
        dom.boundary().len()
    )
    .unwrap();
    for v in dom.interior() {
        writeln!(s, "i {v}").unwrap();
    }
    for v in dom.boundary() {
        writeln!(s, "b {v}").unwrap();
    }
    s
}

pub fn read_domain(graph: Arc<MetricMeasureGraph>, text: &str) -> Result<DomainView> {
    let mut it = Lines::new("domain", text);
    let head = it.next().ok_or_else(|| it.err("empty file"))?;
    if head.len() != 5 || head[0] != "domain" || head[1] != "interior" || head[3] != "boundary" {
        return Err(it.err("expected `domain interior K boundary B`"));
    }
    let (k, b): (usize, usize) = (it.num(head[2])?, it.num(head[4])?);
    let (mut interior, mut boundary) = (Vec::with_capacity(k), Vec::with_capacity(b));
    while let Some(tok) = it.next() {
        match (tok[0], tok.len()) {
            ("i", 2) => interior.push(it.num(tok[1])?),
            ("b", 2) => boundary.push(it.num(tok[1])?),
            _ => return Err(it.err(format!("unexpected record {:?}", tok.join(" ")))),
        }
    }
    if interior.len() != k || boundary.len() != b {
        return Err(it.err("record counts do not match the header"));
    }
    Ok(DomainView::with_boundary(graph, interior, boundary)?)
}

/// `green N o_index scale_factor tol`, then one row of raw values per
/// interior position.
pub fn write_green(t: &GreenTable) -> String {
    let n = t.len();
    let mut s = String::with_capacity(n * n * 24 + 64);
    writeln!(
        s,
        "green {n} {} {} {}",
        t.domain().basepoint_local(),
        real(t.scale_factor()),
        real(t.tolerance())
    )
    .unwrap();
    for i in 0..n {
        for j in 0..n {
            if j > 0 {
                s.push(' ');
            }
            s.push_str(&real(t.raw(i, j)));
        }
        s.push('\n');
    }
    s
}

pub fn read_green(dom: DomainView, text: &str) -> Result<GreenTable> {
    let mut it = Lines::new("green", text);
    let head = it.next().ok_or_else(|| it.err("empty file"))?;
    if head.len() != 5 || head[0] != "green" {
        return Err(it.err("expected `green N o_index scale_factor tol`"));
    }
    let n: usize = it.num(head[1])?;
    let o: usize = it.num(head[2])?;
    let tol: f64 = it.num(head[4])?;
    if n != dom.len() || o != dom.basepoint_local() {
        return Err(it.err("table does not match the domain"));
    }
    let mut raw = Vec::with_capacity(n * n);
    while let Some(tok) = it.next() {
        if tok.len() != n {
            return Err(it.err(format!("expected {n} values, got {}", tok.len())));
        }
        for t in tok {
            raw.push(it.num(t)?);
        }
    }
    if raw.len() != n * n {
        return Err(it.err(format!("expected {n} rows")));
    }
    Ok(GreenTable::from_values(dom, raw)?.with_tolerance(tol))
}

#[cfg(test)]
mod tests {
    use super::*;
    use potlab_core::generators::{gen_slit_square, path_domain, DEFAULT_VERTEX_BUDGET};
    use potlab_core::potential::green_table;

    #[test]
    fn graph_round_trip_is_exact() {
        let dom = gen_slit_square(8, DEFAULT_VERTEX_BUDGET).unwrap();
        let text = write_graph(dom.graph());
        let g = read_graph(&text).unwrap();
        assert_eq!(&g, dom.graph());
        assert_eq!(write_graph(&g), text);
        let d = read_domain(Arc::new(g), &write_domain(&dom)).unwrap();
        assert_eq!(d.interior(), dom.interior());
        assert_eq!(d.boundary(), dom.boundary());
    }

    #[test]
    fn green_round_trip() {
        let dom = path_domain(5).unwrap();
        let t = green_table(&dom, 1e-12).unwrap();
        let back = read_green(dom.clone(), &write_green(&t)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(back.raw(i, j), t.raw(i, j));
            }
        }
        assert_eq!(back.scale_factor(), t.scale_factor());
        assert_eq!(back.tolerance(), t.tolerance());
    }

    #[test]
    fn header_line() {
        let g = path_domain(3).unwrap();
        let text = write_graph(g.graph());
        assert!(text.starts_with("vertices 3 mesh "));
        assert!(text.lines().next().unwrap().ends_with("mode geodesic"));
    }

    #[test]
    fn parse_errors_name_the_line() {
        let bad = "vertices 2 mesh 1 mode geodesic\nv 0 1\nv 1 x\n";
        match read_graph(bad) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }
        assert!(read_graph("vertices 2 mesh 1 mode geodesic\nv 0 1\nv 1 1\n").is_err());
        assert!(read_graph("").is_err());
    }
}
