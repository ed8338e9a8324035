//! Random-subset and random-noise baselines.

use rand::seq::index;
use rand_distr::{Distribution, StandardNormal};

use super::dataset::{DistilledArtifact, ImageSet, LabelPayload, LabeledSet, Normalization};
use crate::error::{Error, Result};
use crate::rng;
use crate::tensor::Tensor;
use crate::train::config::EvalConfig;

pub const RANDOM_METHOD_ID: &str = "random";
pub const NOISE_METHOD_ID: &str = "noise";

/// Indices of a stratified draw: `ipc` per class, uniformly without
/// replacement, grouped by class and ascending within each class.
pub fn random_subset_indices(
    labels: &[usize],
    classes: usize,
    ipc: usize,
    seed: u64,
) -> Result<Vec<usize>> {
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); classes];
    for (i, &l) in labels.iter().enumerate() {
        by_class[l].push(i);
    }
    let short: Vec<String> = by_class
        .iter()
        .enumerate()
        .filter(|(_, members)| members.len() < ipc)
        .map(|(c, members)| format!("class {c} has {}", members.len()))
        .collect();
    if !short.is_empty() {
        return Err(Error::Precondition(format!(
            "cannot draw {ipc} per class: {}",
            short.join(", ")
        )));
    }
    let mut out = Vec::with_capacity(ipc * classes);
    for (c, members) in by_class.iter().enumerate() {
        let mut r = rng::stream(seed, &[rng::tag("random-subset"), c as u64]);
        let mut picked: Vec<usize> = index::sample(&mut r, members.len(), ipc)
            .into_iter()
            .map(|j| members[j])
            .collect();
        picked.sort_unstable();
        out.extend(picked);
    }
    Ok(out)
}

/// Same-capacity random subset of `dataset`, carrying its hard labels and `recipe`.
pub fn select_random_subset(
    dataset: &LabeledSet,
    ipc: usize,
    seed: u64,
    recipe: EvalConfig,
) -> Result<DistilledArtifact> {
    if ipc == 0 {
        return Err(Error::Precondition("ipc must be >= 1".into()));
    }
    let idx = random_subset_indices(&dataset.labels, dataset.classes(), ipc, seed)?;
    let subset = dataset.select(&idx);
    recipe.validate()?;
    // Labels stay hard even under a soft-label recipe; the caller relabels.
    Ok(DistilledArtifact {
        method_id: RANDOM_METHOD_ID.into(),
        images: subset.images,
        labels: LabelPayload::Hard(subset.labels),
        ipc,
        recipe,
        zca_space: false,
    })
}

/// Standard-Gaussian pixels in normalized space, classes assigned round-robin.
pub fn generate_noise_set(
    classes: usize,
    ipc: usize,
    shape: (usize, usize, usize),
    seed: u64,
    recipe: EvalConfig,
) -> Result<DistilledArtifact> {
    let (c, h, w) = shape;
    if classes < 2 || ipc == 0 || c == 0 || h == 0 || w == 0 {
        return Err(Error::Precondition(format!(
            "noise set needs classes >= 2 and positive dims, got K={classes} ipc={ipc} shape={shape:?}"
        )));
    }
    recipe.validate()?;
    let n = classes * ipc;
    let mut r = rng::stream(seed, &[rng::tag("noise-set")]);
    let data: Vec<f32> = (0..n * c * h * w)
        .map(|_| StandardNormal.sample(&mut r))
        .collect();
    let images = ImageSet::new(
        Tensor::new(vec![n, c, h, w], data)?,
        Normalization::identity(c),
        classes,
    )?;
    let labels = (0..n).map(|i| i % classes).collect();
    Ok(DistilledArtifact {
        method_id: NOISE_METHOD_ID.into(),
        images,
        labels: LabelPayload::Hard(labels),
        ipc,
        recipe,
        zca_space: false,
    })
}
