//! Scores of one artifact across several agent models.

use serde::{Deserialize, Serialize};

use crate::data::DistilledArtifact;
use crate::metrics::{MetricResult, MetricWeights};
use crate::orchestrator::pipeline::Evaluator;
use crate::train::AgentModelSpec;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessCell {
    pub model_id: String,
    pub metrics: Option<MetricResult>,
    /// Set when the cell could not be computed.
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RobustnessGrid {
    pub method_id: String,
    pub cells: Vec<RobustnessCell>,
    /// `max − min` LRS over the completed cells.
    pub lrs_spread: Option<f64>,
}

impl RobustnessGrid {
    pub fn holes(&self) -> usize {
        self.cells.iter().filter(|c| c.metrics.is_none()).count()
    }
}

impl Evaluator<'_> {
    /// One LRS evaluation per model. Failed cells are kept as holes; arms
    /// that coincide across models are served from the shared cache.
    pub fn robustness_matrix(
        &self,
        artifact: &DistilledArtifact,
        models: &[AgentModelSpec],
        weights: MetricWeights,
    ) -> RobustnessGrid {
        let cells: Vec<RobustnessCell> = models
            .iter()
            .map(|m| match self.eval_lrs(artifact, m, weights) {
                Ok(r) => RobustnessCell {
                    model_id: m.id(),
                    metrics: Some(r.metrics),
                    error: None,
                },
                Err(e) => RobustnessCell {
                    model_id: m.id(),
                    metrics: None,
                    error: Some(e.to_string()),
                },
            })
            .collect();
        let scores: Vec<f64> = cells
            .iter()
            .filter_map(|c| c.metrics.map(|m| m.lrs))
            .collect();
        let lrs_spread = (!scores.is_empty()).then(|| {
            scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
                - scores.iter().cloned().fold(f64::INFINITY, f64::min)
        });
        RobustnessGrid {
            method_id: artifact.method_id.clone(),
            cells,
            lrs_spread,
        }
    }
}
