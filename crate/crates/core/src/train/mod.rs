//! Agent-model training: recipes, networks, losses, optimizers and search.

pub mod config;
pub mod harness;
pub mod loss;
pub mod lr_search;
pub mod model;
pub mod nn;
pub mod optim;

pub use config::{
    config_hash, default_lr_grid, AccuracyMode, AgentModelSpec, Architecture, EvalConfig,
    LabelMode, LossKind, LrSchedule, NormKind, OptimizerSpec, TeacherSpec,
};
pub use harness::{
    generate_teacher_targets, teacher_soft_labels, train_agent, TrainContext, TrainOutcome,
};
pub use loss::{compute_loss, LossOutput, LossTarget};
pub use lr_search::{lr_search, search_grid, LrSearch, LrTrial};
pub use model::Model;
