//! Green tables cached by content hash of (graph file, domain file, solver
//! settings).

use std::fs;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use potlab_core::potential::{green_table, GreenTable, DEFAULT_DENSE_BUDGET};
use potlab_core::DomainView;

use crate::error::{Error, Result};
use crate::format::{read_green, real, write_domain, write_graph, write_green};

pub struct GreenCache {
    dir: PathBuf,
}

impl GreenCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn key(dom: &DomainView, tol: f64) -> String {
        let mut h = Sha256::new();
        h.update(write_graph(dom.graph()).as_bytes());
        h.update(write_domain(dom).as_bytes());
        h.update(format!("tol {} dense {DEFAULT_DENSE_BUDGET}\n", real(tol)).as_bytes());
        hex::encode(h.finalize())
    }

    pub fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.green"))
    }

    /// Loads the cached table or solves and stores it. The flag is `true`
    /// on a cache hit.
    pub fn get(&self, dom: &DomainView, tol: f64) -> Result<(GreenTable, bool)> {
        let path = self.path(&Self::key(dom, tol));
        if path.exists() {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            return Ok((read_green(dom.clone(), &text)?, true));
        }
        let t = green_table(dom, tol)?;
        write_atomic(&path, &write_green(&t))?;
        Ok((t, false))
    }
}

/// Writes through a temporary file so a crash never leaves a torn file.
pub fn write_atomic(path: &Path, text: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    let tmp = path.with_extension("tmp");
    fs::write(&tmp, text).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use potlab_core::generators::{gen_cube_grid, DEFAULT_VERTEX_BUDGET};

    #[test]
    fn second_lookup_hits() {
        let dir = tempfile::tempdir().unwrap();
        let cache = GreenCache::new(dir.path());
        let dom = gen_cube_grid(2, 6, DEFAULT_VERTEX_BUDGET).unwrap();
        let (a, hit) = cache.get(&dom, 1e-10).unwrap();
        assert!(!hit);
        let (b, hit) = cache.get(&dom, 1e-10).unwrap();
        assert!(hit);
        assert_eq!(a.raw(3, 7), b.raw(3, 7));
        assert_ne!(GreenCache::key(&dom, 1e-10), GreenCache::key(&dom, 1e-8));
    }
}
