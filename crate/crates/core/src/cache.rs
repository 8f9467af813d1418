//! On-disk memo of exact energies, one JSON record per input set.
//!
//! Records live at `<dir>/<sha256 of canonical key JSON>.json` and hold the
//! full key next to the result; a read whose stored key differs from the
//! request is treated as a miss. Writes go to a temporary file in the same
//! directory and are renamed into place, so concurrent writers never expose a
//! partial record.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, AtomicUsize, Ordering};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::energy::{EnergyResult, Geometry, NumericsSpec};
use crate::error::Result;
use crate::material::MaterialModel;

/// Environment variable naming the default cache directory.
pub const CACHE_DIR_ENV: &str = "CASIMIR_CACHE_DIR";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheKey {
    pub geometry: Geometry,
    pub plane: MaterialModel,
    pub sphere: MaterialModel,
    pub numerics: NumericsSpec,
}

impl CacheKey {
    pub fn digest(&self) -> String {
        let json = serde_json::to_vec(self).expect("cache key serializes");
        Sha256::digest(&json).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct Record {
    version: String,
    key: CacheKey,
    result: EnergyResult,
}

#[derive(Debug)]
pub struct EnergyCache {
    dir: PathBuf,
    hits: AtomicUsize,
    misses: AtomicUsize,
}

impl EnergyCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        EnergyCache {
            dir: dir.into(),
            hits: AtomicUsize::new(0),
            misses: AtomicUsize::new(0),
        }
    }

    /// `$CASIMIR_CACHE_DIR`, else `./cache`.
    pub fn default_dir() -> PathBuf {
        std::env::var_os(CACHE_DIR_ENV)
            .filter(|v| !v.is_empty())
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("cache"))
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn hits(&self) -> usize {
        self.hits.load(Ordering::Relaxed)
    }

    pub fn misses(&self) -> usize {
        self.misses.load(Ordering::Relaxed)
    }

    fn path_for(&self, key: &CacheKey) -> PathBuf {
        self.dir.join(format!("{}.json", key.digest()))
    }

    pub fn get(&self, key: &CacheKey) -> Option<EnergyResult> {
        let found = fs::read(self.path_for(key))
            .ok()
            .and_then(|bytes| serde_json::from_slice::<Record>(&bytes).ok())
            .filter(|r| &r.key == key)
            .map(|r| r.result);
        let counter = if found.is_some() { &self.hits } else { &self.misses };
        counter.fetch_add(1, Ordering::Relaxed);
        found
    }

    pub fn put(&self, key: &CacheKey, result: &EnergyResult) -> Result<()> {
        static SEQ: AtomicU64 = AtomicU64::new(0);
        fs::create_dir_all(&self.dir)?;
        let record = Record {
            version: crate::VERSION.to_string(),
            key: key.clone(),
            result: result.clone(),
        };
        let target = self.path_for(key);
        let tmp = self.dir.join(format!(
            ".{}.{}.{}.tmp",
            key.digest(),
            std::process::id(),
            SEQ.fetch_add(1, Ordering::Relaxed)
        ));
        fs::write(&tmp, serde_json::to_vec_pretty(&record)?)?;
        if let Err(e) = fs::rename(&tmp, &target) {
            let _ = fs::remove_file(&tmp);
            return Err(e.into());
        }
        Ok(())
    }

    /// Cached lookup, computing and storing on a miss.
    pub fn get_or_compute(
        &self,
        key: &CacheKey,
        compute: impl FnOnce() -> Result<EnergyResult>,
    ) -> Result<EnergyResult> {
        if let Some(r) = self.get(key) {
            return Ok(r);
        }
        let r = compute()?;
        self.put(key, &r)?;
        Ok(r)
    }

    /// Removes every record; returns how many were deleted.
    pub fn clear(&self) -> Result<usize> {
        let entries = match fs::read_dir(&self.dir) {
            Ok(e) => e,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(0),
            Err(e) => return Err(e.into()),
        };
        let mut n = 0;
        for entry in entries {
            let path = entry?.path();
            let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("");
            if name.ends_with(".json") || name.ends_with(".tmp") {
                fs::remove_file(&path)?;
                n += 1;
            }
        }
        Ok(n)
    }
}
