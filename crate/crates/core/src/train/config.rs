//! Evaluation recipes and the agent-model registry.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::augment::AugChain;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LabelMode {
    Hard,
    FixedSoft,
    Teacher,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LossKind {
    /// Cross-entropy against a class index.
    Ce,
    /// Cross-entropy against a fixed probability row.
    Sce,
    /// Temperature-scaled KL divergence to teacher logits.
    Kl,
    /// Mean squared error between raw logits.
    Mse,
}

impl LossKind {
    pub fn label_mode(self) -> LabelMode {
        match self {
            LossKind::Ce => LabelMode::Hard,
            LossKind::Sce => LabelMode::FixedSoft,
            LossKind::Kl | LossKind::Mse => LabelMode::Teacher,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum OptimizerSpec {
    Sgd {
        momentum: f64,
        weight_decay: f64,
    },
    Adamw {
        betas: (f64, f64),
        weight_decay: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum LrSchedule {
    /// Multiply the rate by `factor` at each milestone epoch.
    Step { milestones: Vec<usize>, factor: f64 },
    /// Cosine annealing to zero over all epochs.
    Cosine,
}

impl LrSchedule {
    pub fn lr_at(&self, base_lr: f64, epoch: usize, epochs: usize) -> f64 {
        match self {
            LrSchedule::Step { milestones, factor } => {
                let passed = milestones.iter().filter(|&&m| epoch >= m).count();
                base_lr * factor.powi(passed as i32)
            }
            LrSchedule::Cosine => {
                let t = epoch as f64 / epochs.max(1) as f64;
                0.5 * base_lr * (1.0 + (std::f64::consts::PI * t).cos())
            }
        }
    }
}

/// Which epoch's test accuracy a run reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AccuracyMode {
    #[default]
    FinalEpoch,
    BestEpoch,
}

/// Pretrained model that produces soft targets.
///
/// With no checkpoint the teacher is trained on the real training split
/// under the hard-label recipe, seeded by `seed`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TeacherSpec {
    pub architecture: String,
    pub width: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint: Option<String>,
    #[serde(default)]
    pub seed: u64,
}

/// Full training recipe for the agent model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvalConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub optimizer: OptimizerSpec,
    pub base_lr: f64,
    pub lr_schedule: LrSchedule,
    pub loss: LossKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub temperature: Option<f64>,
    #[serde(default)]
    pub augmentation: AugChain,
    pub label_mode: LabelMode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub teacher: Option<TeacherSpec>,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lr_grid: Option<Vec<f64>>,
    #[serde(default)]
    pub accuracy_mode: AccuracyMode,
}

const REQUIRED_FIELDS: &[&str] = &[
    "epochs",
    "batch_size",
    "optimizer",
    "base_lr",
    "lr_schedule",
    "loss",
    "label_mode",
    "seeds",
];

/// Seven log-spaced points from 1e-4 to 1e-1.
pub fn default_lr_grid() -> Vec<f64> {
    (0..7).map(|i| 10f64.powf(-4.0 + 0.5 * i as f64)).collect()
}

impl EvalConfig {
    /// Builds a recipe from a structured document, listing every missing
    /// required field at once.
    pub fn from_json_value(value: serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Validation("recipe must be a table".into()))?;
        let missing: Vec<&str> = REQUIRED_FIELDS
            .iter()
            .copied()
            .filter(|k| !obj.contains_key(*k))
            .collect();
        if !missing.is_empty() {
            return Err(Error::Validation(format!(
                "recipe is missing required field(s): {}",
                missing.join(", ")
            )));
        }
        let cfg: EvalConfig =
            serde_json::from_value(value).map_err(|e| Error::Validation(format!("recipe: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_toml_str(s: &str) -> Result<Self> {
        let v: toml::Value =
            toml::from_str(s).map_err(|e| Error::Validation(format!("recipe: {e}")))?;
        let j = serde_json::to_value(v).map_err(|e| Error::Validation(e.to_string()))?;
        Self::from_json_value(j)
    }

    pub fn validate(&self) -> Result<()> {
        let mut problems = Vec::new();
        if self.seeds.is_empty() {
            problems.push("seeds must be non-empty".to_string());
        }
        if self.batch_size == 0 {
            problems.push("batch_size must be >= 1".into());
        }
        if !(self.base_lr.is_finite() && self.base_lr > 0.0) {
            problems.push(format!("base_lr must be positive, got {}", self.base_lr));
        }
        if self.loss.label_mode() != self.label_mode {
            problems.push(format!(
                "loss {:?} is incompatible with label mode {:?}",
                self.loss, self.label_mode
            ));
        }
        match (self.loss, self.temperature) {
            (LossKind::Kl, None) => problems.push("temperature is required for KL loss".into()),
            (LossKind::Kl, Some(t)) if !(t.is_finite() && t > 0.0) => {
                problems.push(format!("temperature must be > 0, got {t}"))
            }
            (LossKind::Kl, Some(_)) => {}
            (_, Some(_)) => problems.push("temperature is only valid with KL loss".into()),
            (_, None) => {}
        }
        if self.label_mode == LabelMode::Teacher && self.teacher.is_none() {
            problems.push("teacher is required for teacher label mode".into());
        }
        if self.label_mode == LabelMode::Hard && self.teacher.is_some() {
            problems.push("teacher is not used with hard labels".into());
        }
        if let Some(grid) = &self.lr_grid {
            if grid.is_empty() || grid.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
                problems.push("lr_grid must be a non-empty list of positive reals".into());
            }
        }
        match &self.optimizer {
            OptimizerSpec::Sgd {
                momentum,
                weight_decay,
            } => {
                if !(0.0..1.0).contains(momentum) || *weight_decay < 0.0 {
                    problems.push("sgd needs momentum in [0, 1) and weight_decay >= 0".into());
                }
            }
            OptimizerSpec::Adamw {
                betas: (b1, b2),
                weight_decay,
            } => {
                if !(0.0..1.0).contains(b1) || !(0.0..1.0).contains(b2) || *weight_decay < 0.0 {
                    problems.push("adamw needs betas in [0, 1) and weight_decay >= 0".into());
                }
            }
        }
        if let LrSchedule::Step { factor, .. } = &self.lr_schedule {
            if !(factor.is_finite() && *factor > 0.0) {
                problems.push("step factor must be positive".into());
            }
        }
        if let Err(e) = self.augmentation.validate() {
            problems.push(e.to_string());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Validation(problems.join("; ")))
        }
    }

    pub fn lr_grid_or_default(&self) -> Vec<f64> {
        self.lr_grid.clone().unwrap_or_else(default_lr_grid)
    }

    /// Same recipe with the augmentation chain stripped.
    pub fn without_augmentation(&self) -> Self {
        Self {
            augmentation: AugChain::identity(),
            ..self.clone()
        }
    }

    /// Same schedule, optimizer and chain, trained with plain cross-entropy on hard labels.
    pub fn as_hard(&self) -> Self {
        Self {
            loss: LossKind::Ce,
            label_mode: LabelMode::Hard,
            temperature: None,
            teacher: None,
            ..self.clone()
        }
    }

    pub fn with_seeds(&self, seeds: &[u64]) -> Self {
        Self {
            seeds: seeds.to_vec(),
            ..self.clone()
        }
    }

    pub fn with_lr(&self, lr: f64) -> Self {
        Self {
            base_lr: lr,
            ..self.clone()
        }
    }

    /// Stable digest of the canonicalized recipe.
    pub fn config_hash(&self) -> Result<String> {
        self.validate()?;
        Ok(digest(
            &serde_json::to_value(self).expect("recipe serializes"),
        ))
    }

    /// Digest with the learning rate and its search grid blanked out. Arms that
    /// must share a recipe apart from the rate compare equal under it.
    pub fn pairing_hash(&self) -> Result<String> {
        self.validate()?;
        let mut v = serde_json::to_value(self).expect("recipe serializes");
        let obj = v.as_object_mut().unwrap();
        obj.remove("base_lr");
        obj.remove("lr_grid");
        Ok(digest(&v))
    }
}

/// SHA-256 over compact JSON with lexicographically sorted keys.
pub(crate) fn digest(value: &serde_json::Value) -> String {
    // serde_json's default map is ordered, so `to_string` is canonical.
    let text = serde_json::to_string(value).expect("json value serializes");
    hex::encode(Sha256::digest(text.as_bytes()))
}

/// Digest of a complete recipe.
pub fn config_hash(config: &EvalConfig) -> Result<String> {
    config.config_hash()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NormKind {
    Instance,
    Batch,
    None,
}

/// Registered agent-model architectures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Architecture {
    /// Stacked conv → norm → relu → avgpool blocks with a linear head.
    ConvNet { depth: usize, norm: NormKind },
    /// Two instance-normalized conv blocks and a linear head.
    TinyDeskCnn,
    /// Stem conv plus two residual stages.
    ResNetDesk,
}

impl Architecture {
    pub fn default_width(self) -> usize {
        match self {
            Architecture::ConvNet { .. } => 128,
            Architecture::TinyDeskCnn => 8,
            Architecture::ResNetDesk => 16,
        }
    }

    pub fn registry() -> Vec<Architecture> {
        let mut all = vec![Architecture::TinyDeskCnn, Architecture::ResNetDesk];
        for depth in 1..=4 {
            for norm in [NormKind::Instance, NormKind::Batch, NormKind::None] {
                all.push(Architecture::ConvNet { depth, norm });
            }
        }
        all
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Architecture::ConvNet { depth, norm } => {
                let n = match norm {
                    NormKind::Instance => "instancenorm",
                    NormKind::Batch => "batchnorm",
                    NormKind::None => "nonorm",
                };
                write!(f, "conv-depth-{depth}-{n}")
            }
            Architecture::TinyDeskCnn => f.write_str("tiny-desk-cnn"),
            Architecture::ResNetDesk => f.write_str("resnet-desk"),
        }
    }
}

impl FromStr for Architecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Architecture::registry()
            .into_iter()
            .find(|a| a.to_string() == s)
            .ok_or_else(|| Error::Validation(format!("unregistered architecture `{s}`")))
    }
}

/// An architecture bound to an input shape and class count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AgentModelSpec {
    pub architecture: Architecture,
    pub width: usize,
    /// `(channels, height, width)`
    pub input: (usize, usize, usize),
    pub classes: usize,
}

impl AgentModelSpec {
    pub fn new(architecture: Architecture, input: (usize, usize, usize), classes: usize) -> Self {
        Self {
            architecture,
            width: architecture.default_width(),
            input,
            classes,
        }
    }

    pub fn with_width(mut self, width: usize) -> Self {
        self.width = width;
        self
    }

    pub fn parse(
        id: &str,
        width: Option<usize>,
        input: (usize, usize, usize),
        classes: usize,
    ) -> Result<Self> {
        let arch: Architecture = id.parse()?;
        let spec = Self {
            architecture: arch,
            width: width.unwrap_or(arch.default_width()),
            input,
            classes,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Inverse of [`id`](Self::id); a bare architecture name takes its default width.
    pub fn from_id(id: &str, input: (usize, usize, usize), classes: usize) -> Result<Self> {
        match id.rsplit_once("@w") {
            Some((arch, w)) => {
                let width = w
                    .parse()
                    .map_err(|_| Error::Validation(format!("bad width in model id {id:?}")))?;
                Self::parse(arch, Some(width), input, classes)
            }
            None => Self::parse(id, None, input, classes),
        }
    }

    /// Identifier used in cache keys and reports, e.g. `tiny-desk-cnn@w8`.
    pub fn id(&self) -> String {
        format!("{}@w{}", self.architecture, self.width)
    }

    pub fn validate(&self) -> Result<()> {
        let (c, h, w) = self.input;
        if c == 0 || h == 0 || w == 0 || self.classes < 2 || self.width == 0 {
            return Err(Error::Validation(format!(
                "model {} needs positive input dims, width, and at least two classes",
                self.id()
            )));
        }
        let halvings = match self.architecture {
            Architecture::ConvNet { depth, .. } => depth,
            Architecture::TinyDeskCnn | Architecture::ResNetDesk => 2,
        };
        let div = 1usize << halvings;
        if h % div != 0 || w % div != 0 {
            return Err(Error::Validation(format!(
                "model {} pools {halvings} times; input {h}x{w} must be divisible by {div}",
                self.id()
            )));
        }
        Ok(())
    }
}
