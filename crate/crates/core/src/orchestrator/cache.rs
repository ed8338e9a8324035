//! Write-once cache of per-seed arm accuracies.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::data::container::write_atomic;
use crate::error::{Error, Result};
use crate::train::config::digest;
use crate::train::LrTrial;

pub const CACHE_DIR_ENV: &str = "DDRANK_CACHE_DIR";

/// Arms that can share cached results. All random-subset settings map to
/// `Rdm`; the recipe hash tells the augmented and plain variants apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ArmFamily {
    Syn,
    Real,
    Rdm,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CacheKey {
    pub dataset_id: String,
    pub model_id: String,
    /// Where the training images come from: an artifact fingerprint, `real` or `random`.
    pub source: String,
    pub family: ArmFamily,
    pub ipc: usize,
    pub recipe_hash: String,
}

impl CacheKey {
    fn file_name(&self) -> String {
        let v = serde_json::to_value(self).expect("cache key serializes");
        format!("{}.json", &digest(&v)[..32])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedRun {
    pub accuracy: f64,
    pub wall_time: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    /// Learning rate the arm trains at, once chosen.
    pub lr: Option<f64>,
    #[serde(default)]
    pub lr_trials: Vec<LrTrial>,
    pub runs: BTreeMap<u64, SeedRun>,
}

#[derive(Serialize, Deserialize)]
struct OnDisk {
    key: CacheKey,
    entry: CacheEntry,
}

/// In-process map, optionally mirrored to one JSON file per key.
///
/// Values are write-once: a second write for the same learning rate or seed
/// keeps the first value.
#[derive(Debug, Default)]
pub struct BaselineCache {
    dir: Option<PathBuf>,
    entries: Mutex<HashMap<CacheKey, CacheEntry>>,
    trainings: AtomicUsize,
}

impl BaselineCache {
    pub fn in_memory() -> Self {
        Self::default()
    }

    pub fn at_dir(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
        Ok(Self {
            dir: Some(dir),
            ..Self::default()
        })
    }

    /// Uses `DDRANK_CACHE_DIR` when set, else memory only.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(CACHE_DIR_ENV) {
            Some(d) if !d.is_empty() => Self::at_dir(PathBuf::from(d)),
            _ => Ok(Self::in_memory()),
        }
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Number of agent models trained through this cache (cache misses).
    pub fn trainings(&self) -> usize {
        self.trainings.load(Ordering::Relaxed)
    }

    pub(crate) fn count_training(&self) {
        self.trainings.fetch_add(1, Ordering::Relaxed);
    }

    fn load(&self, key: &CacheKey) -> Result<Option<CacheEntry>> {
        let Some(dir) = &self.dir else {
            return Ok(None);
        };
        let path = dir.join(key.file_name());
        let text = match fs::read_to_string(&path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
            Err(e) => return Err(Error::io(&path, e)),
        };
        let d: OnDisk = serde_json::from_str(&text).map_err(|e| {
            Error::Format(crate::error::FormatError::Metadata {
                path: path.clone(),
                detail: e.to_string(),
            })
        })?;
        Ok((d.key == *key).then_some(d.entry))
    }

    pub fn get(&self, key: &CacheKey) -> Result<Option<CacheEntry>> {
        let mut map = self.entries.lock().expect("cache lock");
        if let Some(e) = map.get(key) {
            return Ok(Some(e.clone()));
        }
        let loaded = self.load(key)?;
        if let Some(e) = &loaded {
            map.insert(key.clone(), e.clone());
        }
        Ok(loaded)
    }

    fn update(&self, key: &CacheKey, f: impl FnOnce(&mut CacheEntry)) -> Result<CacheEntry> {
        let mut map = self.entries.lock().expect("cache lock");
        if !map.contains_key(key) {
            let from_disk = self.load(key)?.unwrap_or_default();
            map.insert(key.clone(), from_disk);
        }
        let entry = map.get_mut(key).expect("just inserted");
        f(entry);
        if let Some(dir) = &self.dir {
            let doc = OnDisk {
                key: key.clone(),
                entry: entry.clone(),
            };
            let text = serde_json::to_string_pretty(&doc).expect("cache entry serializes");
            write_atomic(&dir.join(key.file_name()), text.as_bytes())?;
        }
        Ok(entry.clone())
    }

    /// Stores the arm's learning rate unless one is already recorded; returns the stored rate.
    pub fn put_lr(&self, key: &CacheKey, lr: f64, trials: Vec<LrTrial>) -> Result<f64> {
        let e = self.update(key, |e| {
            if e.lr.is_none() {
                e.lr = Some(lr);
                e.lr_trials = trials;
            }
        })?;
        Ok(e.lr.expect("lr set"))
    }

    /// Stores one seed's outcome unless present; returns the stored outcome.
    pub fn put_run(&self, key: &CacheKey, seed: u64, run: SeedRun) -> Result<SeedRun> {
        let e = self.update(key, |e| {
            e.runs.entry(seed).or_insert(run);
        })?;
        Ok(e.runs[&seed])
    }
}
