//! Scoring dataset-distillation methods by how much they beat random
//! selection under a fixed training recipe.
//!
//! The crate trains small agent networks on candidate subsets (distilled or
//! random), collects test accuracies across label and augmentation settings,
//! and turns them into the label-robust (LRS) and augmentation-robust (ARS)
//! scores.

#![allow(clippy::needless_range_loop)]

pub mod augment;
pub mod data;
pub mod error;
pub mod metrics;
pub mod orchestrator;
pub mod rng;
pub mod tensor;
pub mod train;

pub use augment::{AugChain, TransformSpec};
pub use data::{
    Dataset, DistilledArtifact, ImageSet, LabelPayload, LabeledSet, Normalization, RunLog,
    RunRecord, SettingTag,
};
pub use error::{Error, FormatError, Result};
pub use metrics::{AccuracyQuad, AccuracyRecord, MetricResult, MetricWeights};
pub use orchestrator::{ARSReport, EvalPlan, Evaluator, LRSReport};
pub use tensor::Tensor;
pub use train::{AgentModelSpec, EvalConfig, LabelMode, LossKind, TeacherSpec};
