//! Run manifests: one TOML file drives every subcommand.
//!
//! ```toml
//! schema = 1
//! dataset = "data/toy"                  # directory written by `save_dataset`
//! artifacts = ["artifacts/prototypes"]  # artifact base paths
//! models = ["tiny-desk-cnn@w8"]
//! output_dir = "out"
//!
//! # optional
//! seeds = [0, 1, 2, 3, 4]
//! cache_dir = "cache"
//! lr_grid = [0.001, 0.01, 0.1]
//! jobs = 1
//! lambdas = [0.1, 0.3, 0.5, 0.7, 0.9]
//!
//! [weights]
//! lambda = 0.5
//! gamma = 0.5
//! ```
//!
//! Relative paths resolve against the manifest's directory.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use ddrank_core::data::artifact_meta_path;
use ddrank_core::orchestrator::CACHE_DIR_ENV;
use ddrank_core::MetricWeights;

pub const MANIFEST_SCHEMA: u32 = 1;
pub const DEFAULT_SEEDS: [u64; 5] = [0, 1, 2, 3, 4];
pub const DEFAULT_LAMBDAS: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

const TOP_KEYS: [&str; 11] = [
    "schema",
    "dataset",
    "artifacts",
    "models",
    "output_dir",
    "seeds",
    "cache_dir",
    "lr_grid",
    "jobs",
    "lambdas",
    "weights",
];
const WEIGHT_KEYS: [&str; 2] = ["lambda", "gamma"];
const REQUIRED: [&str; 4] = ["dataset", "artifacts", "models", "output_dir"];

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("manifest {path} is not valid: {detail}")]
    Syntax { path: PathBuf, detail: String },
    #[error("manifest is missing required key `{0}`")]
    MissingKey(&'static str),
    #[error("unknown manifest key(s): {} (allowed: {})", .0.join(", "), allowed_keys())]
    UnknownKeys(Vec<String>),
    #[error("`{key}` = {value} is outside [0, 1]")]
    WeightRange { key: &'static str, value: f64 },
    #[error("`{key}` refers to {}, which does not exist", .path.display())]
    DanglingPath { key: String, path: PathBuf },
    #[error("manifest schema {0} is not supported (expected {MANIFEST_SCHEMA})")]
    Schema(u32),
    #[error("`{key}`: {detail}")]
    Invalid { key: &'static str, detail: String },
}

fn allowed_keys() -> String {
    let mut keys: Vec<String> = TOP_KEYS.iter().map(|k| k.to_string()).collect();
    keys.extend(WEIGHT_KEYS.iter().map(|k| format!("weights.{k}")));
    keys.join(", ")
}

#[derive(Debug, Deserialize)]
struct Raw {
    schema: Option<u32>,
    dataset: Option<PathBuf>,
    artifacts: Option<Vec<PathBuf>>,
    models: Option<Vec<String>>,
    output_dir: Option<PathBuf>,
    seeds: Option<Vec<u64>>,
    cache_dir: Option<PathBuf>,
    lr_grid: Option<Vec<f64>>,
    jobs: Option<usize>,
    lambdas: Option<Vec<f64>>,
    #[serde(default)]
    weights: RawWeights,
}

#[derive(Debug, Default, Deserialize)]
struct RawWeights {
    lambda: Option<f64>,
    gamma: Option<f64>,
}

/// A parsed and validated manifest with every default filled in.
#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub dataset: PathBuf,
    pub artifacts: Vec<PathBuf>,
    pub models: Vec<String>,
    pub weights: MetricWeights,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub cache_dir: Option<PathBuf>,
    pub lr_grid: Option<Vec<f64>>,
    pub jobs: usize,
    pub lambdas: Vec<f64>,
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub models: Option<Vec<String>>,
    pub seeds: Option<Vec<u64>>,
    pub lambda: Option<f64>,
    pub gamma: Option<f64>,
    pub jobs: Option<usize>,
    pub output_dir: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

fn check_weight(key: &'static str, value: f64) -> Result<f64, ManifestError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ManifestError::WeightRange { key, value })
    }
}

fn unknown_keys(table: &toml::Table) -> Vec<String> {
    let mut unknown: Vec<String> = table
        .keys()
        .filter(|k| !TOP_KEYS.contains(&k.as_str()))
        .cloned()
        .collect();
    if let Some(toml::Value::Table(w)) = table.get("weights") {
        unknown.extend(
            w.keys()
                .filter(|k| !WEIGHT_KEYS.contains(&k.as_str()))
                .map(|k| format!("weights.{k}")),
        );
    }
    unknown
}

impl RunManifest {
    pub fn parse_str(text: &str, base: &Path) -> Result<Self, ManifestError> {
        let syntax = |detail: String| ManifestError::Syntax {
            path: base.to_path_buf(),
            detail,
        };
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| syntax(e.to_string()))?;
        let unknown = unknown_keys(&table);
        if !unknown.is_empty() {
            return Err(ManifestError::UnknownKeys(unknown));
        }
        for key in REQUIRED {
            if !table.contains_key(key) {
                return Err(ManifestError::MissingKey(key));
            }
        }
        let raw: Raw = table
            .try_into()
            .map_err(|e: toml::de::Error| syntax(e.to_string()))?;
        if let Some(s) = raw.schema.filter(|&s| s != MANIFEST_SCHEMA) {
            return Err(ManifestError::Schema(s));
        }
        let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };
        let weights = MetricWeights {
            lambda: check_weight("weights.lambda", raw.weights.lambda.unwrap_or(0.5))?,
            gamma: check_weight("weights.gamma", raw.weights.gamma.unwrap_or(0.5))?,
        };
        let lambdas = raw.lambdas.unwrap_or_else(|| DEFAULT_LAMBDAS.to_vec());
        for &l in &lambdas {
            check_weight("lambdas", l)?;
        }
        let m = RunManifest {
            dataset: resolve(raw.dataset.expect("required")),
            artifacts: raw
                .artifacts
                .expect("required")
                .into_iter()
                .map(resolve)
                .collect(),
            models: raw.models.expect("required"),
            weights,
            seeds: raw.seeds.unwrap_or_else(|| DEFAULT_SEEDS.to_vec()),
            output_dir: resolve(raw.output_dir.expect("required")),
            cache_dir: raw.cache_dir.map(resolve),
            lr_grid: raw.lr_grid,
            jobs: raw.jobs.unwrap_or(1),
            lambdas,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn load(path: &Path) -> Result<Self, ManifestError> {
        let text = fs::read_to_string(path).map_err(|source| ManifestError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::parse_str(&text, base).map_err(|e| match e {
            ManifestError::Syntax { detail, .. } => ManifestError::Syntax {
                path: path.to_path_buf(),
                detail,
            },
            other => other,
        })
    }

    pub fn validate(&self) -> Result<(), ManifestError> {
        check_weight("weights.lambda", self.weights.lambda)?;
        check_weight("weights.gamma", self.weights.gamma)?;
        if !self.dataset.join("dataset.meta").is_file() {
            return Err(ManifestError::DanglingPath {
                key: "dataset".into(),
                path: self.dataset.clone(),
            });
        }
        for (i, a) in self.artifacts.iter().enumerate() {
            if !artifact_meta_path(a).is_file() {
                return Err(ManifestError::DanglingPath {
                    key: format!("artifacts[{i}]"),
                    path: a.clone(),
                });
            }
        }
        if self.models.is_empty() {
            return Err(ManifestError::Invalid {
                key: "models",
                detail: "at least one model id is required".into(),
            });
        }
        let mut seeds = self.seeds.clone();
        seeds.sort_unstable();
        seeds.dedup();
        if seeds.is_empty() || seeds.len() != self.seeds.len() {
            return Err(ManifestError::Invalid {
                key: "seeds",
                detail: "seeds must be a non-empty list of distinct integers".into(),
            });
        }
        if self.jobs == 0 {
            return Err(ManifestError::Invalid {
                key: "jobs",
                detail: "must be >= 1".into(),
            });
        }
        if let Some(g) = &self.lr_grid {
            if g.is_empty() || g.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                return Err(ManifestError::Invalid {
                    key: "lr_grid",
                    detail: "learning rates must be positive".into(),
                });
            }
        }
        Ok(())
    }

    /// Applies `DDRANK_CACHE_DIR` and command-line overrides, then revalidates.
    pub fn with_overrides(mut self, o: &Overrides) -> Result<Self, ManifestError> {
        if let Some(m) = &o.models {
            self.models = m.clone();
        }
        if let Some(s) = &o.seeds {
            self.seeds = s.clone();
        }
        if let Some(l) = o.lambda {
            self.weights.lambda = check_weight("weights.lambda", l)?;
        }
        if let Some(g) = o.gamma {
            self.weights.gamma = check_weight("weights.gamma", g)?;
        }
        if let Some(j) = o.jobs {
            self.jobs = j;
        }
        if let Some(d) = &o.output_dir {
            self.output_dir = d.clone();
        }
        // Flag beats environment beats file.
        if let Some(d) = std::env::var_os(CACHE_DIR_ENV).filter(|d| !d.is_empty()) {
            self.cache_dir = Some(PathBuf::from(d));
        }
        if let Some(d) = &o.cache_dir {
            self.cache_dir = Some(d.clone());
        }
        self.validate()?;
        Ok(self)
    }

    pub fn runs_path(&self) -> PathBuf {
        self.output_dir.join("runs.jsonl")
    }
}
