//! Training and evaluating the agent model on one candidate subset.

use std::sync::Arc;

use rand::seq::SliceRandom;

use crate::augment::{apply_chain, BatchTargets, ZcaWhitener};
use crate::data::{DistilledArtifact, LabelPayload, LabeledSet};
use crate::error::{Error, Result};
use crate::rng;
use crate::tensor::Tensor;
use crate::train::config::{AccuracyMode, AgentModelSpec, EvalConfig, LabelMode};
use crate::train::loss::{compute_loss, LossTarget};
use crate::train::model::Model;
use crate::train::optim::Optimizer;

/// Shared resources a run may need beyond the artifact itself.
#[derive(Debug, Clone, Default)]
pub struct TrainContext {
    /// Labels batches in teacher mode.
    pub teacher: Option<Arc<Model>>,
    /// Fitted on the real training split; required when the chain has `zca`.
    pub zca: Option<Arc<ZcaWhitener>>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// Test accuracy in `[0, 1]`, per the recipe's accuracy mode.
    pub accuracy: f64,
    pub final_accuracy: f64,
    /// Mean training loss per epoch.
    pub epoch_losses: Vec<f64>,
    pub model: Model,
}

enum Supervision<'a> {
    Hard(Vec<usize>),
    Soft(&'a Tensor),
    Teacher(&'a Model),
}

fn check_compatible(
    artifact: &DistilledArtifact,
    test: &LabeledSet,
    model: &AgentModelSpec,
) -> Result<()> {
    let shape = artifact.images.item_shape();
    if test.images.item_shape() != shape {
        return Err(Error::Validation(format!(
            "test images are {:?}, training images are {shape:?}",
            test.images.item_shape()
        )));
    }
    if model.input != shape
        || model.classes != artifact.classes()
        || test.classes() != artifact.classes()
    {
        return Err(Error::Validation(format!(
            "model {} expects {:?} with {} classes, data is {shape:?} with {} classes",
            model.id(),
            model.input,
            model.classes,
            artifact.classes()
        )));
    }
    Ok(())
}

/// Trains a fresh agent model on `artifact` under `config` and reports its
/// test accuracy. `seed` fixes initialization, batch order and augmentation.
///
/// A hard-label recipe accepts any artifact and uses each image's nominal
/// class; soft and teacher recipes need the matching label payload (teacher
/// recipes only need images and a resolved teacher).
pub fn train_agent(
    artifact: &DistilledArtifact,
    test: &LabeledSet,
    model: &AgentModelSpec,
    config: &EvalConfig,
    seed: u64,
    ctx: &TrainContext,
) -> Result<TrainOutcome> {
    config.validate()?;
    check_compatible(artifact, test, model)?;
    let k = model.classes;
    let supervision = match config.label_mode {
        LabelMode::Hard => Supervision::Hard(artifact.labels.hard_labels()),
        LabelMode::FixedSoft => match &artifact.labels {
            LabelPayload::FixedSoft(p) => Supervision::Soft(p),
            other => {
                return Err(Error::Validation(format!(
                    "fixed-soft recipe needs soft labels, artifact has {:?} labels",
                    other.mode()
                )))
            }
        },
        LabelMode::Teacher => {
            let t = ctx.teacher.as_deref().ok_or_else(|| {
                Error::Precondition("teacher recipe but no teacher was resolved".into())
            })?;
            if t.spec.classes != k || t.spec.input != model.input {
                return Err(Error::Validation(format!(
                    "teacher {} does not match the data ({} classes)",
                    t.spec.id(),
                    k
                )));
            }
            Supervision::Teacher(t)
        }
    };

    let (images, test_x) = match config.augmentation.zca_epsilon() {
        Some(_) => {
            let zca = ctx.zca.as_deref().ok_or_else(|| {
                Error::Precondition("zca in chain but no whitener was fitted".into())
            })?;
            let train = if artifact.zca_space {
                artifact.images.images.clone()
            } else {
                zca.apply(&artifact.images.images)?
            };
            (train, zca.apply(&test.images.images)?)
        }
        None => (artifact.images.images.clone(), test.images.images.clone()),
    };
    let n = images.batch();
    let mut net = Model::new(*model, seed)?;
    let mut opt = Optimizer::new(config.optimizer.clone());
    let mut epoch_losses = Vec::with_capacity(config.epochs);
    let mut best = f64::NEG_INFINITY;

    for epoch in 0..config.epochs {
        let lr = config
            .lr_schedule
            .lr_at(config.base_lr, epoch, config.epochs);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(&mut rng::stream(seed, &[rng::tag("shuffle"), epoch as u64]));
        let mut total = 0.0;
        for (bi, idx) in order.chunks(config.batch_size).enumerate() {
            let mut x = images.select(idx);
            let targets = match &supervision {
                Supervision::Hard(y) => BatchTargets::Hard(idx.iter().map(|&i| y[i]).collect()),
                Supervision::Soft(p) => {
                    BatchTargets::Soft(p.select(idx).data().iter().map(|&v| v as f64).collect())
                }
                Supervision::Teacher(_) => BatchTargets::Relabel,
            };
            let mut aug_rng = rng::stream(seed, &[rng::tag("augment"), epoch as u64, bi as u64]);
            let targets = apply_chain(&config.augmentation, &mut x, targets, k, &mut aug_rng)?;
            let teacher_logits;
            let target = match (&targets, &supervision) {
                (BatchTargets::Hard(y), _) => LossTarget::Hard(y),
                (BatchTargets::MixedHard { a, b, lam }, _) => {
                    LossTarget::MixedHard { a, b, lam: *lam }
                }
                (BatchTargets::Soft(p), _) => LossTarget::Soft(p),
                (BatchTargets::Relabel, Supervision::Teacher(t)) => {
                    teacher_logits = generate_teacher_targets(t, &x, k)?;
                    LossTarget::TeacherLogits(&teacher_logits)
                }
                (BatchTargets::Relabel, _) => {
                    unreachable!("relabel targets only come from a teacher")
                }
            };
            let logits = net.forward_train(&x)?;
            let z: Vec<f64> = logits.data().iter().map(|&v| v as f64).collect();
            let out = compute_loss(config.loss, &z, k, target, config.temperature)?;
            if !out.value.is_finite() {
                return Err(Error::TrainingFailure {
                    epoch,
                    detail: format!("loss became {} at lr {}", out.value, config.base_lr),
                });
            }
            total += out.value * idx.len() as f64;
            let grad = Tensor::new(
                logits.shape().to_vec(),
                out.grad.iter().map(|&g| g as f32).collect(),
            )?;
            net.zero_grad();
            net.backward(&grad);
            opt.step(&mut net, lr);
        }
        let mut finite = true;
        net.visit_params(&mut |p| finite &= p.value.iter().all(|v| v.is_finite()));
        if !finite {
            return Err(Error::TrainingFailure {
                epoch,
                detail: format!("weights became non-finite at lr {}", config.base_lr),
            });
        }
        epoch_losses.push(total / n as f64);
        if config.accuracy_mode == AccuracyMode::BestEpoch {
            best = best.max(net.accuracy(&test_x, &test.labels)?);
        }
    }
    let final_accuracy = net.accuracy(&test_x, &test.labels)?;
    let accuracy = match config.accuracy_mode {
        AccuracyMode::FinalEpoch => final_accuracy,
        AccuracyMode::BestEpoch => best.max(final_accuracy),
    };
    Ok(TrainOutcome {
        accuracy,
        final_accuracy,
        epoch_losses,
        model: net,
    })
}

/// Raw teacher logits (`B × K`) for a batch; temperature is applied by the loss.
pub fn generate_teacher_targets(
    teacher: &Model,
    batch: &Tensor,
    classes: usize,
) -> Result<Vec<f64>> {
    if teacher.spec.classes != classes {
        return Err(Error::Validation(format!(
            "teacher predicts {} classes, data has {classes}",
            teacher.spec.classes
        )));
    }
    let logits = teacher.predict(batch)?;
    if !logits.all_finite() {
        return Err(Error::Numerical(
            "teacher produced non-finite logits".into(),
        ));
    }
    Ok(logits.data().iter().map(|&v| v as f64).collect())
}

/// Softmax of teacher logits at `temperature`, as an `N × K` label matrix.
pub fn teacher_soft_labels(teacher: &Model, images: &Tensor, temperature: f64) -> Result<Tensor> {
    let k = teacher.spec.classes;
    let z = generate_teacher_targets(teacher, images, k)?;
    let mut out = Vec::with_capacity(z.len());
    for row in z.chunks(k) {
        let m = row
            .iter()
            .fold(f64::NEG_INFINITY, |a, &b| a.max(b / temperature));
        let e: Vec<f64> = row.iter().map(|&v| (v / temperature - m).exp()).collect();
        let s: f64 = e.iter().sum();
        out.extend(e.iter().map(|v| (v / s) as f32));
    }
    Tensor::new(vec![images.batch(), k], out)
}
