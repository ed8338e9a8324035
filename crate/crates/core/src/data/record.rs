//! Run records and the append-only record log.
//!
//! The log is line-delimited JSON, one record per line. Every line carries
//! `"schema": 1`.

use std::collections::HashSet;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use super::container::write_atomic;
use crate::error::{Error, Result};

pub const RECORD_SCHEMA: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SettingTag {
    #[serde(rename = "syn-hard")]
    SynHard,
    #[serde(rename = "real-hard")]
    RealHard,
    #[serde(rename = "syn-any")]
    SynAny,
    #[serde(rename = "rdm-any")]
    RdmAny,
    #[serde(rename = "syn-aug")]
    SynAug,
    #[serde(rename = "rdm-aug")]
    RdmAug,
    #[serde(rename = "syn-naug")]
    SynNaug,
    #[serde(rename = "rdm-naug")]
    RdmNaug,
}

impl SettingTag {
    pub const ALL: [SettingTag; 8] = [
        SettingTag::SynHard,
        SettingTag::RealHard,
        SettingTag::SynAny,
        SettingTag::RdmAny,
        SettingTag::SynAug,
        SettingTag::RdmAug,
        SettingTag::SynNaug,
        SettingTag::RdmNaug,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SettingTag::SynHard => "syn-hard",
            SettingTag::RealHard => "real-hard",
            SettingTag::SynAny => "syn-any",
            SettingTag::RdmAny => "rdm-any",
            SettingTag::SynAug => "syn-aug",
            SettingTag::RdmAug => "rdm-aug",
            SettingTag::SynNaug => "syn-naug",
            SettingTag::RdmNaug => "rdm-naug",
        }
    }

    /// Random-selection arms.
    pub fn is_random(self) -> bool {
        matches!(
            self,
            SettingTag::RdmAny | SettingTag::RdmAug | SettingTag::RdmNaug
        )
    }
}

impl fmt::Display for SettingTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SettingTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SettingTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::Validation(format!("unknown setting tag `{s}`")))
    }
}

/// One trained agent model's outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunRecord {
    pub schema: u32,
    pub method_id: String,
    pub dataset_id: String,
    pub model_id: String,
    pub ipc: usize,
    pub setting: SettingTag,
    pub seed: u64,
    pub test_accuracy: f64,
    pub lr: f64,
    pub config_hash: String,
    /// Seconds.
    pub wall_time: f64,
}

impl RunRecord {
    pub fn validate(&self) -> Result<()> {
        if self.schema != RECORD_SCHEMA {
            return Err(Error::Validation(format!(
                "run record schema {} is not supported (expected {RECORD_SCHEMA})",
                self.schema
            )));
        }
        if !(self.test_accuracy.is_finite() && (0.0..=1.0).contains(&self.test_accuracy)) {
            return Err(Error::Validation(format!(
                "run record accuracy {} is outside [0, 1]",
                self.test_accuracy
            )));
        }
        if self.config_hash.is_empty() {
            return Err(Error::Validation(
                "run record has an empty config hash".into(),
            ));
        }
        Ok(())
    }

    /// Identity of the run: a second record with the same key is a duplicate.
    pub fn key(&self) -> RunKey {
        RunKey {
            method_id: self.method_id.clone(),
            dataset_id: self.dataset_id.clone(),
            model_id: self.model_id.clone(),
            ipc: self.ipc,
            config_hash: self.config_hash.clone(),
            setting: self.setting,
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RunKey {
    pub method_id: String,
    pub dataset_id: String,
    pub model_id: String,
    pub ipc: usize,
    pub config_hash: String,
    pub setting: SettingTag,
    pub seed: u64,
}

pub fn parse_records(text: &str) -> Result<Vec<RunRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let r: RunRecord = serde_json::from_str(l)
                .map_err(|e| Error::Validation(format!("record line {}: {e}", i + 1)))?;
            r.validate()
                .map_err(|e| Error::Validation(format!("record line {}: {e}", i + 1)))?;
            Ok(r)
        })
        .collect()
}

pub fn load_run_records(path: &Path) -> Result<Vec<RunRecord>> {
    match fs::read_to_string(path) {
        Ok(text) => parse_records(&text),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(Vec::new()),
        Err(e) => Err(Error::io(path, e)),
    }
}

/// Append-only record store. Appends are serialized and each one replaces
/// the file atomically; re-appending a known run is a no-op.
#[derive(Debug)]
pub struct RunLog {
    path: PathBuf,
    lock: Mutex<()>,
}

impl RunLog {
    pub fn open(path: impl Into<PathBuf>) -> Self {
        Self {
            path: path.into(),
            lock: Mutex::new(()),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn records(&self) -> Result<Vec<RunRecord>> {
        let _g = self.lock.lock().unwrap_or_else(|p| p.into_inner());
        load_run_records(&self.path)
    }

    /// Returns whether the record was new.
    pub fn append(&self, record: &RunRecord) -> Result<bool> {
        Ok(self.append_all(std::slice::from_ref(record))? == 1)
    }

    /// Appends every record not already present; returns how many were new.
    pub fn append_all(&self, records: &[RunRecord]) -> Result<usize> {
        let _g = self.lock.lock().unwrap_or_else(|p| p.into_inner());
        let existing = load_run_records(&self.path)?;
        let mut seen: HashSet<RunKey> = existing.iter().map(RunRecord::key).collect();
        let mut text = String::new();
        for r in &existing {
            text.push_str(&serde_json::to_string(r).expect("record serializes"));
            text.push('\n');
        }
        let mut added = 0;
        for r in records {
            r.validate()?;
            if seen.insert(r.key()) {
                text.push_str(&serde_json::to_string(r).expect("record serializes"));
                text.push('\n');
                added += 1;
            }
        }
        if added > 0 {
            if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            }
            write_atomic(&self.path, text.as_bytes())?;
        }
        Ok(added)
    }
}

/// Appends one record to the log at `path`.
pub fn save_run_record(record: &RunRecord, path: &Path) -> Result<bool> {
    RunLog::open(path).append(record)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn record(seed: u64, acc: f64) -> RunRecord {
        RunRecord {
            schema: RECORD_SCHEMA,
            method_id: "dc".into(),
            dataset_id: "toy".into(),
            model_id: "tiny-desk-cnn@w8".into(),
            ipc: 1,
            setting: SettingTag::SynHard,
            seed,
            test_accuracy: acc,
            lr: 0.01,
            config_hash: "abc".into(),
            wall_time: 0.5,
        }
    }

    #[test]
    fn append_is_idempotent() {
        let dir = tempfile::tempdir().unwrap();
        let log = RunLog::open(dir.path().join("runs.jsonl"));
        assert!(log.append(&record(0, 0.5)).unwrap());
        assert!(!log.append(&record(0, 0.5)).unwrap());
        assert!(log.append(&record(1, 0.6)).unwrap());
        let back = log.records().unwrap();
        assert_eq!(back, vec![record(0, 0.5), record(1, 0.6)]);
    }

    #[test]
    fn out_of_range_accuracy_rejected_on_load() {
        let mut r = record(0, 0.5);
        r.test_accuracy = 1.2;
        let line = serde_json::to_string(&r).unwrap();
        let err = parse_records(&line).unwrap_err();
        assert!(matches!(err, Error::Validation(_)));
        assert!(err.to_string().contains("1.2"));
    }

    #[test]
    fn tags_round_trip() {
        for t in SettingTag::ALL {
            assert_eq!(t.as_str().parse::<SettingTag>().unwrap(), t);
            assert_eq!(serde_json::to_string(&t).unwrap(), format!("\"{t}\""));
        }
        assert!("syn-soft".parse::<SettingTag>().is_err());
    }
}
