//! Small fixtures shared by the integration tests.
#![allow(dead_code)]

use ddrank_core::data::toy::{prototype_images, toy_dataset, ToyConfig};
use ddrank_core::train::{AccuracyMode, Architecture, LrSchedule, OptimizerSpec};
use ddrank_core::{
    AgentModelSpec, AugChain, Dataset, DistilledArtifact, EvalConfig, LabelMode, LabelPayload,
    LossKind,
};

/// 10 classes of 3×8×8 images, 200 train / 100 test.
pub fn small_dataset() -> Dataset {
    toy_dataset(&ToyConfig {
        size: 8,
        train_per_class: 20,
        test_per_class: 10,
        ..ToyConfig::default()
    })
    .unwrap()
}

pub fn tiny_spec(d: &Dataset) -> AgentModelSpec {
    AgentModelSpec::new(Architecture::TinyDeskCnn, d.item_shape(), d.classes())
}

pub fn recipe(epochs: usize) -> EvalConfig {
    EvalConfig {
        epochs,
        batch_size: 16,
        optimizer: OptimizerSpec::Sgd {
            momentum: 0.9,
            weight_decay: 5e-4,
        },
        base_lr: 0.03,
        lr_schedule: LrSchedule::Cosine,
        loss: LossKind::Ce,
        temperature: None,
        augmentation: AugChain::parse(&["flip"]).unwrap(),
        label_mode: LabelMode::Hard,
        teacher: None,
        seeds: vec![0, 1],
        lr_grid: Some(vec![0.01, 0.03]),
        accuracy_mode: AccuracyMode::FinalEpoch,
    }
}

pub fn proto_artifact(d: &Dataset, ipc: usize, recipe: EvalConfig) -> DistilledArtifact {
    let p = prototype_images(&d.train, ipc, 0.3, 0).unwrap();
    DistilledArtifact::new(
        "prototypes",
        p.images,
        LabelPayload::Hard(p.labels),
        ipc,
        recipe,
    )
    .unwrap()
}
