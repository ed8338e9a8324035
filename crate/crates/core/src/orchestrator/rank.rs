//! Leaderboards.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metrics::MetricWeights;
use crate::orchestrator::pipeline::{ARSReport, LRSReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RankKey {
    Lrs,
    Ars,
}

/// One method's scores in reporting units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardEntry {
    pub method_id: String,
    pub dataset_id: String,
    pub ipc: usize,
    pub weights: MetricWeights,
    pub hlr: Option<f64>,
    pub ior: Option<f64>,
    pub lrs: Option<f64>,
    pub ars: Option<f64>,
}

impl LeaderboardEntry {
    pub fn from_reports(lrs: Option<&LRSReport>, ars: Option<&ARSReport>) -> Result<Self> {
        let (method_id, dataset_id, ipc) = match (lrs, ars) {
            (Some(l), _) => (l.method_id.clone(), l.dataset_id.clone(), l.ipc),
            (None, Some(a)) => (a.method_id.clone(), a.dataset_id.clone(), a.ipc),
            (None, None) => {
                return Err(Error::Precondition(
                    "entry needs at least one report".into(),
                ))
            }
        };
        let weights = match (lrs, ars) {
            (Some(l), Some(a)) => MetricWeights::new(l.metrics.weights.lambda, a.weights.gamma)?,
            (Some(l), None) => l.metrics.weights,
            (None, Some(a)) => a.weights,
            (None, None) => unreachable!(),
        };
        Ok(Self {
            method_id,
            dataset_id,
            ipc,
            weights,
            hlr: lrs.map(|l| l.metrics.hlr),
            ior: lrs.map(|l| l.metrics.ior).or(ars.map(|a| a.ior_aug)),
            lrs: lrs.map(|l| l.metrics.lrs),
            ars: ars.map(|a| a.ars),
        })
    }

    pub fn score(&self, key: RankKey) -> Option<f64> {
        match key {
            RankKey::Lrs => self.lrs,
            RankKey::Ars => self.ars,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedEntry {
    /// 1-based position.
    pub rank: usize,
    #[serde(flatten)]
    pub entry: LeaderboardEntry,
}

/// Orders entries by `key`, descending; ties go to the higher IOR, then to
/// the lexicographically smaller method id.
pub fn rank_methods(entries: &[LeaderboardEntry], key: RankKey) -> Result<Vec<RankedEntry>> {
    if let Some(first) = entries.first() {
        for e in entries {
            if e.dataset_id != first.dataset_id || e.ipc != first.ipc {
                return Err(Error::Validation(format!(
                    "cannot rank {} ({}, ipc {}) with {} ({}, ipc {})",
                    e.method_id, e.dataset_id, e.ipc, first.method_id, first.dataset_id, first.ipc
                )));
            }
            let same = match key {
                RankKey::Lrs => e.weights.lambda == first.weights.lambda,
                RankKey::Ars => e.weights.gamma == first.weights.gamma,
            };
            if !same {
                return Err(Error::Validation(format!(
                    "entries were scored with different weights ({} vs {})",
                    e.method_id, first.method_id
                )));
            }
            if e.score(key).is_none_or(|s| !s.is_finite()) {
                return Err(Error::Validation(format!(
                    "{} has no {key:?} score",
                    e.method_id
                )));
            }
        }
    }
    let mut sorted = entries.to_vec();
    sorted.sort_by(|a, b| {
        let by_key = b.score(key).unwrap().total_cmp(&a.score(key).unwrap());
        let by_ior = b
            .ior
            .unwrap_or(f64::NEG_INFINITY)
            .total_cmp(&a.ior.unwrap_or(f64::NEG_INFINITY));
        by_key
            .then(by_ior)
            .then_with(|| a.method_id.cmp(&b.method_id))
    });
    Ok(sorted
        .into_iter()
        .enumerate()
        .map(|(i, entry)| RankedEntry { rank: i + 1, entry })
        .collect())
}
