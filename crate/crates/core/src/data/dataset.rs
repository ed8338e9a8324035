use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tensor::Tensor;
use crate::train::config::{EvalConfig, LabelMode, TeacherSpec};

/// Per-channel normalization already applied to the pixels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Normalization {
    pub mean: Vec<f32>,
    pub std: Vec<f32>,
}

impl Normalization {
    pub fn identity(channels: usize) -> Self {
        Self {
            mean: vec![0.0; channels],
            std: vec![1.0; channels],
        }
    }
}

/// `N × C × H × W` images.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageSet {
    pub images: Tensor,
    pub normalization: Normalization,
    pub classes: usize,
}

impl ImageSet {
    pub fn new(images: Tensor, normalization: Normalization, classes: usize) -> Result<Self> {
        let s = Self {
            images,
            normalization,
            classes,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        let shape = self.images.shape();
        if shape.len() != 4 || shape.contains(&0) {
            return Err(Error::Validation(format!(
                "image set must be a non-empty N×C×H×W tensor, got {shape:?}"
            )));
        }
        let c = shape[1];
        if self.normalization.mean.len() != c || self.normalization.std.len() != c {
            return Err(Error::Validation(format!(
                "normalization has {} means and {} stds for {c} channels",
                self.normalization.mean.len(),
                self.normalization.std.len()
            )));
        }
        if self.classes < 2 {
            return Err(Error::Validation("need at least two classes".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.images.batch()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// `(C, H, W)`
    pub fn item_shape(&self) -> (usize, usize, usize) {
        let s = self.images.shape();
        (s[1], s[2], s[3])
    }

    pub fn select(&self, indices: &[usize]) -> ImageSet {
        ImageSet {
            images: self.images.select(indices),
            normalization: self.normalization.clone(),
            classes: self.classes,
        }
    }
}

/// Images with one class index each.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    pub images: ImageSet,
    pub labels: Vec<usize>,
}

impl LabeledSet {
    pub fn new(images: ImageSet, labels: Vec<usize>) -> Result<Self> {
        validate_hard(&labels, images.len(), images.classes)?;
        Ok(Self { images, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn classes(&self) -> usize {
        self.images.classes
    }

    pub fn class_counts(&self) -> Vec<usize> {
        class_counts(&self.labels, self.classes())
    }

    pub fn select(&self, indices: &[usize]) -> LabeledSet {
        LabeledSet {
            images: self.images.select(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
        }
    }
}

/// Train and test splits of one dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub id: String,
    pub train: LabeledSet,
    pub test: LabeledSet,
}

impl Dataset {
    pub fn new(id: impl Into<String>, train: LabeledSet, test: LabeledSet) -> Result<Self> {
        if train.images.item_shape() != test.images.item_shape()
            || train.classes() != test.classes()
        {
            return Err(Error::Validation(
                "train and test splits disagree on image shape or class count".into(),
            ));
        }
        Ok(Self {
            id: id.into(),
            train,
            test,
        })
    }

    pub fn classes(&self) -> usize {
        self.train.classes()
    }

    pub fn item_shape(&self) -> (usize, usize, usize) {
        self.train.images.item_shape()
    }
}

pub(crate) fn class_counts(labels: &[usize], classes: usize) -> Vec<usize> {
    let mut counts = vec![0; classes];
    for &l in labels {
        counts[l] += 1;
    }
    counts
}

fn validate_hard(labels: &[usize], n: usize, k: usize) -> Result<()> {
    if labels.len() != n {
        return Err(Error::Validation(format!(
            "{} labels for {n} images",
            labels.len()
        )));
    }
    if let Some((i, l)) = labels.iter().enumerate().find(|(_, &l)| l >= k) {
        return Err(Error::Validation(format!(
            "label {l} at index {i} is outside [0, {k})"
        )));
    }
    Ok(())
}

/// How a candidate subset is labeled.
#[derive(Debug, Clone, PartialEq)]
pub enum LabelPayload {
    Hard(Vec<usize>),
    /// `N × K` row-stochastic matrix.
    FixedSoft(Tensor),
    /// Labels regenerated by a teacher for every batch. `classes` keeps each
    /// image's nominal class for hard-label evaluation.
    Teacher {
        teacher: TeacherSpec,
        temperature: f64,
        classes: Vec<usize>,
    },
}

pub const SOFT_ROW_TOLERANCE: f64 = 1e-5;

impl LabelPayload {
    pub fn mode(&self) -> LabelMode {
        match self {
            LabelPayload::Hard(_) => LabelMode::Hard,
            LabelPayload::FixedSoft(_) => LabelMode::FixedSoft,
            LabelPayload::Teacher { .. } => LabelMode::Teacher,
        }
    }

    pub fn validate(&self, n: usize, k: usize) -> Result<()> {
        match self {
            LabelPayload::Hard(l) => validate_hard(l, n, k),
            LabelPayload::FixedSoft(p) => validate_soft(p, n, k),
            LabelPayload::Teacher {
                temperature,
                classes,
                ..
            } => {
                if !(temperature.is_finite() && *temperature > 0.0) {
                    return Err(Error::Validation(format!(
                        "teacher temperature must be > 0, got {temperature}"
                    )));
                }
                validate_hard(classes, n, k)
            }
        }
    }

    /// Nominal class per image; the row argmax for soft labels (lowest index on ties).
    pub fn hard_labels(&self) -> Vec<usize> {
        match self {
            LabelPayload::Hard(l) => l.clone(),
            LabelPayload::Teacher { classes, .. } => classes.clone(),
            LabelPayload::FixedSoft(p) => (0..p.batch())
                .map(|i| {
                    let row = p.item(i);
                    let mut best = 0;
                    for (j, &v) in row.iter().enumerate() {
                        if v > row[best] {
                            best = j;
                        }
                    }
                    best
                })
                .collect(),
        }
    }
}

pub(crate) fn validate_soft(p: &Tensor, n: usize, k: usize) -> Result<()> {
    if p.shape() != [n, k] {
        return Err(Error::Validation(format!(
            "soft labels have shape {:?}, expected [{n}, {k}]",
            p.shape()
        )));
    }
    for i in 0..n {
        let row = p.item(i);
        if row.iter().any(|v| !v.is_finite() || *v < 0.0) {
            return Err(Error::Validation(format!(
                "soft label row {i} has a negative or non-finite entry"
            )));
        }
        let s: f64 = row.iter().map(|&v| v as f64).sum();
        if (s - 1.0).abs() > SOFT_ROW_TOLERANCE {
            return Err(Error::Validation(format!("soft label row {i} sums to {s}")));
        }
    }
    Ok(())
}

/// A candidate subset together with the recipe its authors evaluate it under.
#[derive(Debug, Clone, PartialEq)]
pub struct DistilledArtifact {
    pub method_id: String,
    pub images: ImageSet,
    pub labels: LabelPayload,
    pub ipc: usize,
    pub recipe: EvalConfig,
    /// Images were distilled in ZCA-whitened space and must not be whitened again.
    pub zca_space: bool,
}

impl DistilledArtifact {
    pub fn new(
        method_id: impl Into<String>,
        images: ImageSet,
        labels: LabelPayload,
        ipc: usize,
        recipe: EvalConfig,
    ) -> Result<Self> {
        let a = Self {
            method_id: method_id.into(),
            images,
            labels,
            ipc,
            recipe,
            zca_space: false,
        };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<()> {
        self.images.validate()?;
        self.labels
            .validate(self.images.len(), self.images.classes)?;
        self.recipe.validate()?;
        if self.ipc == 0 {
            return Err(Error::Validation("ipc must be >= 1".into()));
        }
        if self.recipe.label_mode != self.labels.mode() {
            return Err(Error::Validation(format!(
                "recipe label mode {:?} does not match {:?} labels",
                self.recipe.label_mode,
                self.labels.mode()
            )));
        }
        if let LabelPayload::Teacher {
            teacher,
            temperature,
            ..
        } = &self.labels
        {
            if self.recipe.teacher.as_ref() != Some(teacher) {
                return Err(Error::Validation(
                    "recipe teacher differs from the label payload's teacher".into(),
                ));
            }
            if let Some(t) = self.recipe.temperature {
                if t != *temperature {
                    return Err(Error::Validation(format!(
                        "recipe temperature {t} differs from label temperature {temperature}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn classes(&self) -> usize {
        self.images.classes
    }

    pub fn class_counts(&self) -> Vec<usize> {
        class_counts(&self.labels.hard_labels(), self.classes())
    }

    /// True when every class holds exactly `ipc` images.
    pub fn is_balanced(&self) -> bool {
        self.class_counts().iter().all(|&c| c == self.ipc)
    }

    /// Images paired with their nominal classes.
    pub fn hard_view(&self) -> LabeledSet {
        LabeledSet {
            images: self.images.clone(),
            labels: self.labels.hard_labels(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::train::config::tests::hard_recipe;

    fn images(n: usize) -> ImageSet {
        ImageSet::new(
            Tensor::zeros(vec![n, 1, 2, 2]),
            Normalization::identity(1),
            2,
        )
        .unwrap()
    }

    #[test]
    fn soft_rows_must_sum_to_one() {
        let good = Tensor::new(vec![2, 2], vec![0.25, 0.75, 1.0, 0.0]).unwrap();
        assert!(LabelPayload::FixedSoft(good.clone()).validate(2, 2).is_ok());
        let bad = Tensor::new(vec![2, 2], vec![0.25, 0.70, 1.0, 0.0]).unwrap();
        assert!(LabelPayload::FixedSoft(bad).validate(2, 2).is_err());
        assert_eq!(LabelPayload::FixedSoft(good).hard_labels(), vec![1, 0]);
    }

    #[test]
    fn hard_labels_in_range() {
        assert!(LabelPayload::Hard(vec![0, 2]).validate(2, 2).is_err());
        assert!(LabelPayload::Hard(vec![0]).validate(2, 2).is_err());
    }

    #[test]
    fn imbalance_is_flagged_not_rejected() {
        let a = DistilledArtifact::new(
            "m",
            images(3),
            LabelPayload::Hard(vec![0, 0, 1]),
            1,
            hard_recipe(),
        )
        .unwrap();
        assert!(!a.is_balanced());
        let b = DistilledArtifact::new(
            "m",
            images(2),
            LabelPayload::Hard(vec![0, 1]),
            1,
            hard_recipe(),
        )
        .unwrap();
        assert!(b.is_balanced());
    }

    #[test]
    fn recipe_mode_must_match_labels() {
        let soft = Tensor::new(vec![2, 2], vec![0.5; 4]).unwrap();
        let err = DistilledArtifact::new(
            "m",
            images(2),
            LabelPayload::FixedSoft(soft),
            1,
            hard_recipe(),
        );
        assert!(err.is_err());
    }
}
