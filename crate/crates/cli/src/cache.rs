//! Disk cache for catalog groups and irrep tables, keyed by a content hash
//! of the group spec and schema version. Cached data is re-verified on
//! load; any mismatch falls back to a fresh build.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use sha2::{Digest, Sha256};

use cherednik_core::groups::{
    catalog, from_catalog_file, to_catalog_file, CatalogFile, GroupSpec, IrrepTable,
    ReflectionGroup,
};

pub fn default_cache_dir() -> PathBuf {
    if let Ok(dir) = std::env::var("CHEREDNIK_CACHE_DIR") {
        return PathBuf::from(dir);
    }
    PathBuf::from(".cherednik-cache")
}

fn cache_key(spec: &GroupSpec) -> String {
    let mut hasher = Sha256::new();
    hasher.update(b"catalog/1:");
    hasher.update(serde_json::to_string(spec).unwrap().as_bytes());
    hex::encode(hasher.finalize())
}

/// Catalog lookup through the cache; returns the group, its table, and
/// whether the cache was hit.
pub fn catalog_cached(
    spec: &GroupSpec,
    dir: Option<&Path>,
) -> cherednik_core::Result<(Arc<ReflectionGroup>, IrrepTable, bool)> {
    let dir = dir.map(|p| p.to_path_buf()).unwrap_or_else(default_cache_dir);
    let path = dir.join(format!("{}.json", cache_key(spec)));
    if let Ok(bytes) = std::fs::read(&path) {
        if let Ok(file) = serde_json::from_slice::<CatalogFile>(&bytes) {
            if let Ok((g, table)) = from_catalog_file(&file) {
                return Ok((g, table, true));
            }
        }
        // corrupted or stale caches are rebuilt, never trusted
        let _ = std::fs::remove_file(&path);
    }
    let (g, table) = catalog(spec)?;
    if std::fs::create_dir_all(&dir).is_ok() {
        let file = to_catalog_file(&g, &table);
        let json = serde_json::to_vec_pretty(&file).unwrap();
        let _ = std::fs::write(&path, json);
    }
    Ok((g, table, false))
}
