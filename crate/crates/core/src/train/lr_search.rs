//! Per-arm learning-rate selection over a grid.

use serde::{Deserialize, Serialize};

use crate::data::{DistilledArtifact, LabeledSet};
use crate::error::{Error, Result};
use crate::train::config::{AgentModelSpec, EvalConfig};
use crate::train::harness::{train_agent, TrainContext};

/// Outcome of training at one grid point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LrTrial {
    pub lr: f64,
    pub accuracies: Vec<f64>,
    /// `None` when any seed diverged.
    pub mean: Option<f64>,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LrSearch {
    pub best_lr: f64,
    pub best_mean: f64,
    /// One entry per grid point, ascending by rate.
    pub trials: Vec<LrTrial>,
}

/// Evaluates every grid point on every search seed and keeps the rate with
/// the highest mean accuracy; ties go to the smaller rate. Grid points whose
/// training diverges are recorded and skipped. Other errors abort the search.
pub fn search_grid<F>(grid: &[f64], seeds: &[u64], mut evaluate: F) -> Result<LrSearch>
where
    F: FnMut(f64, u64) -> Result<f64>,
{
    if grid.is_empty() || seeds.is_empty() {
        return Err(Error::Validation(
            "lr search needs a non-empty grid and seed list".into(),
        ));
    }
    if let Some(bad) = grid.iter().find(|l| !(l.is_finite() && **l > 0.0)) {
        return Err(Error::Validation(format!(
            "lr grid entry {bad} is not a positive real"
        )));
    }
    let mut lrs = grid.to_vec();
    lrs.sort_by(f64::total_cmp);
    lrs.dedup();
    let mut trials = Vec::with_capacity(lrs.len());
    let mut best: Option<(f64, f64)> = None;
    for lr in lrs {
        let mut accs = Vec::with_capacity(seeds.len());
        let mut failure = None;
        for &s in seeds {
            match evaluate(lr, s) {
                Ok(a) => accs.push(a),
                Err(e) if e.is_training_failure() => {
                    failure = Some(e.to_string());
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        let mean = failure
            .is_none()
            .then(|| accs.iter().sum::<f64>() / accs.len() as f64);
        if let Some(m) = mean {
            if best.is_none_or(|(_, b)| m > b) {
                best = Some((lr, m));
            }
        }
        trials.push(LrTrial {
            lr,
            accuracies: accs,
            mean,
            failure,
        });
    }
    let (best_lr, best_mean) =
        best.ok_or_else(|| Error::SearchFailure(format!("{} grid point(s) tried", trials.len())))?;
    Ok(LrSearch {
        best_lr,
        best_mean,
        trials,
    })
}

/// Searches `grid` for the rate that maximizes mean test accuracy of
/// `artifact` under `config`, training on `search_seeds`.
pub fn lr_search(
    artifact: &DistilledArtifact,
    test: &LabeledSet,
    model: &AgentModelSpec,
    config: &EvalConfig,
    grid: &[f64],
    search_seeds: &[u64],
    ctx: &TrainContext,
) -> Result<LrSearch> {
    search_grid(grid, search_seeds, |lr, seed| {
        train_agent(artifact, test, model, &config.with_lr(lr), seed, ctx).map(|o| o.accuracy)
    })
}
