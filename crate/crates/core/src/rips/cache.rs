//! On-disk cache of subdivision graphs in the directory named by
//! `COARSE_DECOMP_CACHE`. Entries are keyed by a SHA-256 digest of the
//! complex and the level; failures to read or write are ignored.

use std::path::PathBuf;

use sha2::{Digest, Sha256};

use super::complex::MetricSimplicialComplex;
use super::geodesic::Subdivision;

pub const CACHE_ENV: &str = "COARSE_DECOMP_CACHE";
const FORMAT: &str = "subdivision-v1";

fn entry(k: &MetricSimplicialComplex, level: u32) -> Option<PathBuf> {
    let dir = std::env::var_os(CACHE_ENV)?;
    let mut h = Sha256::new();
    h.update(FORMAT);
    h.update(k.to_json().to_string());
    h.update(level.to_le_bytes());
    Some(PathBuf::from(dir).join(format!("{}.json", hex::encode(h.finalize()))))
}

pub fn load(k: &MetricSimplicialComplex, level: u32) -> Option<Subdivision> {
    let text = std::fs::read_to_string(entry(k, level)?).ok()?;
    let mut s: Subdivision = serde_json::from_str(&text).ok()?;
    if s.level != level || !s.is_consistent(k.vertex_count()) {
        return None;
    }
    s.reindex();
    Some(s)
}

pub fn store(k: &MetricSimplicialComplex, level: u32, s: &Subdivision) {
    let Some(path) = entry(k, level) else { return };
    if let Some(dir) = path.parent() {
        let _ = std::fs::create_dir_all(dir);
    }
    if let Ok(text) = serde_json::to_string(s) {
        let tmp = path.with_extension("tmp");
        if std::fs::write(&tmp, text).is_ok() {
            let _ = std::fs::rename(tmp, path);
        }
    }
}
