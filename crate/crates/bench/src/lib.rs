//! Fixtures shared by the benchmarks in `benches/`.

use ddrank_core::data::toy::{prototype_images, toy_dataset, ToyConfig};
use ddrank_core::train::{AccuracyMode, Architecture, LrSchedule, OptimizerSpec};
use ddrank_core::{
    AgentModelSpec, AugChain, Dataset, DistilledArtifact, EvalConfig, LabelMode, LabelPayload,
    LossKind, Tensor,
};

/// Ten-class toy data at `size`×`size`.
pub fn dataset(size: usize) -> Dataset {
    toy_dataset(&ToyConfig {
        size,
        train_per_class: 20,
        test_per_class: 10,
        ..ToyConfig::default()
    })
    .expect("toy dataset")
}

/// The first `n` training images.
pub fn batch(d: &Dataset, n: usize) -> Tensor {
    let idx: Vec<usize> = (0..n.min(d.train.len())).collect();
    d.train.images.images.select(&idx)
}

pub fn model(d: &Dataset, arch: Architecture) -> AgentModelSpec {
    AgentModelSpec::new(arch, d.item_shape(), d.classes())
}

pub fn recipe(epochs: usize, chain: &[&str]) -> EvalConfig {
    EvalConfig {
        epochs,
        batch_size: 32,
        optimizer: OptimizerSpec::Sgd {
            momentum: 0.9,
            weight_decay: 5e-4,
        },
        base_lr: 0.03,
        lr_schedule: LrSchedule::Cosine,
        loss: LossKind::Ce,
        temperature: None,
        augmentation: AugChain::parse(chain).expect("chain"),
        label_mode: LabelMode::Hard,
        teacher: None,
        seeds: vec![0],
        lr_grid: None,
        accuracy_mode: AccuracyMode::FinalEpoch,
    }
}

pub fn artifact(d: &Dataset, ipc: usize, recipe: EvalConfig) -> DistilledArtifact {
    let p = prototype_images(&d.train, ipc, 0.3, 0).expect("prototypes");
    DistilledArtifact::new(
        "prototypes",
        p.images,
        LabelPayload::Hard(p.labels),
        ipc,
        recipe,
    )
    .expect("artifact")
}
