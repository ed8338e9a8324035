//! On-disk artifacts and datasets.
//!
//! An artifact `name` is three sibling files:
//!
//! * `name.ddrk`: images, `N × C × H × W` f32
//! * `name.labels.ddrk`: u32 class indices (hard, teacher) or `N × K` f32 (fixed soft)
//! * `name.meta`: TOML with method id, ipc, label mode, normalization, teacher, recipe
//!
//! A dataset directory holds `train.ddrk`, `train.labels.ddrk`, `test.ddrk`,
//! `test.labels.ddrk` and `dataset.meta`.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::container::{self, write_atomic, RawTensor};
use super::dataset::{
    Dataset, DistilledArtifact, ImageSet, LabelPayload, LabeledSet, Normalization,
};
use crate::error::{Error, FormatError, Result};
use crate::train::config::{EvalConfig, LabelMode, TeacherSpec};

pub const META_SCHEMA: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArtifactMeta {
    schema: u32,
    method_id: String,
    ipc: usize,
    classes: usize,
    label_mode: LabelMode,
    #[serde(default)]
    zca_space: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    temperature: Option<f64>,
    normalization: Normalization,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    teacher: Option<TeacherSpec>,
    recipe: EvalConfig,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatasetMeta {
    schema: u32,
    id: String,
    classes: usize,
    normalization: Normalization,
}

/// `dir/name.ddrk` or `dir/name` → `dir/name`.
fn base_of(path: &Path) -> PathBuf {
    if path.extension().is_some_and(|e| e == "ddrk" || e == "meta") {
        path.with_extension("")
    } else {
        path.to_path_buf()
    }
}

fn sibling(base: &Path, suffix: &str) -> PathBuf {
    let mut s = base.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Metadata file of the artifact stored at `path`; its presence marks a saved artifact.
pub fn artifact_meta_path(path: &Path) -> PathBuf {
    sibling(&base_of(path), ".meta")
}

fn read_meta<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    toml::from_str(&text).map_err(|e| {
        FormatError::Metadata {
            path: path.to_path_buf(),
            detail: e.to_string(),
        }
        .into()
    })
}

fn write_meta<T: Serialize>(path: &Path, meta: &T) -> Result<()> {
    let text = toml::to_string(meta).map_err(|e| Error::Validation(format!("meta: {e}")))?;
    write_atomic(path, text.as_bytes())
}

fn mismatch(msg: String) -> Error {
    FormatError::ShapeMismatch(msg).into()
}

fn read_images(path: &Path, normalization: Normalization, classes: usize) -> Result<ImageSet> {
    let t = container::read(path)?.into_tensor()?;
    if t.shape().len() != 4 {
        return Err(mismatch(format!(
            "{}: images must be rank 4, got {:?}",
            path.display(),
            t.shape()
        )));
    }
    if normalization.mean.len() != t.shape()[1] {
        return Err(mismatch(format!(
            "{}: {} channels but normalization for {}",
            path.display(),
            t.shape()[1],
            normalization.mean.len()
        )));
    }
    ImageSet::new(t, normalization, classes)
}

fn read_class_indices(path: &Path, n: usize) -> Result<Vec<usize>> {
    let v = container::read(path)?.into_u32()?;
    if v.len() != n {
        return Err(mismatch(format!(
            "{}: {} labels for {n} images",
            path.display(),
            v.len()
        )));
    }
    Ok(v.into_iter().map(|x| x as usize).collect())
}

fn class_tensor(labels: &[usize]) -> RawTensor {
    RawTensor::u32(labels.iter().map(|&l| l as u32).collect())
}

pub fn save_artifact(artifact: &DistilledArtifact, path: &Path) -> Result<()> {
    artifact.validate()?;
    let base = base_of(path);
    if let Some(dir) = base.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    container::write(
        &sibling(&base, ".ddrk"),
        &RawTensor::f32(&artifact.images.images),
    )?;
    let (labels, teacher, temperature) = match &artifact.labels {
        LabelPayload::Hard(l) => (class_tensor(l), None, None),
        LabelPayload::FixedSoft(p) => (RawTensor::f32(p), None, None),
        LabelPayload::Teacher {
            teacher,
            temperature,
            classes,
        } => (
            class_tensor(classes),
            Some(teacher.clone()),
            Some(*temperature),
        ),
    };
    container::write(&sibling(&base, ".labels.ddrk"), &labels)?;
    let meta = ArtifactMeta {
        schema: META_SCHEMA,
        method_id: artifact.method_id.clone(),
        ipc: artifact.ipc,
        classes: artifact.classes(),
        label_mode: artifact.labels.mode(),
        zca_space: artifact.zca_space,
        temperature,
        normalization: artifact.images.normalization.clone(),
        teacher,
        recipe: artifact.recipe.clone(),
    };
    write_meta(&sibling(&base, ".meta"), &meta)
}

pub fn load_artifact(path: &Path) -> Result<DistilledArtifact> {
    let base = base_of(path);
    let meta_path = sibling(&base, ".meta");
    let meta: ArtifactMeta = read_meta(&meta_path)?;
    if meta.schema != META_SCHEMA {
        return Err(FormatError::Metadata {
            path: meta_path,
            detail: format!("unsupported schema {}", meta.schema),
        }
        .into());
    }
    let images = read_images(&sibling(&base, ".ddrk"), meta.normalization, meta.classes)?;
    let n = images.len();
    let labels_path = sibling(&base, ".labels.ddrk");
    let labels = match meta.label_mode {
        LabelMode::Hard => LabelPayload::Hard(read_class_indices(&labels_path, n)?),
        LabelMode::FixedSoft => {
            let p = container::read(&labels_path)?.into_tensor()?;
            if p.shape() != [n, meta.classes] {
                return Err(mismatch(format!(
                    "{}: soft labels {:?}, expected [{n}, {}]",
                    labels_path.display(),
                    p.shape(),
                    meta.classes
                )));
            }
            LabelPayload::FixedSoft(p)
        }
        LabelMode::Teacher => {
            let bad = |what: &str| FormatError::Metadata {
                path: meta_path.clone(),
                detail: format!("teacher labels need `{what}`"),
            };
            LabelPayload::Teacher {
                teacher: meta.teacher.ok_or_else(|| bad("teacher"))?,
                temperature: meta.temperature.ok_or_else(|| bad("temperature"))?,
                classes: read_class_indices(&labels_path, n)?,
            }
        }
    };
    let mut a = DistilledArtifact::new(meta.method_id, images, labels, meta.ipc, meta.recipe)?;
    a.zca_space = meta.zca_space;
    Ok(a)
}

pub fn save_dataset(dataset: &Dataset, dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    for (name, split) in [("train", &dataset.train), ("test", &dataset.test)] {
        container::write(
            &dir.join(format!("{name}.ddrk")),
            &RawTensor::f32(&split.images.images),
        )?;
        container::write(
            &dir.join(format!("{name}.labels.ddrk")),
            &class_tensor(&split.labels),
        )?;
    }
    write_meta(
        &dir.join("dataset.meta"),
        &DatasetMeta {
            schema: META_SCHEMA,
            id: dataset.id.clone(),
            classes: dataset.classes(),
            normalization: dataset.train.images.normalization.clone(),
        },
    )
}

pub fn load_dataset(dir: &Path) -> Result<Dataset> {
    let meta: DatasetMeta = read_meta(&dir.join("dataset.meta"))?;
    let split = |name: &str| -> Result<LabeledSet> {
        let images = read_images(
            &dir.join(format!("{name}.ddrk")),
            meta.normalization.clone(),
            meta.classes,
        )?;
        let labels = read_class_indices(&dir.join(format!("{name}.labels.ddrk")), images.len())?;
        LabeledSet::new(images, labels)
    };
    Dataset::new(meta.id.clone(), split("train")?, split("test")?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::Tensor;
    use crate::train::config::tests::hard_recipe;
    use crate::train::config::LossKind;

    fn images(n: usize, k: usize) -> ImageSet {
        let data = (0..n * 2 * 3 * 3)
            .map(|i| (i as f32 * 0.37).sin() * 1e3)
            .collect();
        ImageSet::new(
            Tensor::new(vec![n, 2, 3, 3], data).unwrap(),
            Normalization {
                mean: vec![0.49, 0.48],
                std: vec![0.24, 0.26],
            },
            k,
        )
        .unwrap()
    }

    fn assert_same(a: &DistilledArtifact, b: &DistilledArtifact) {
        assert_eq!(a, b);
        let bits = |t: &Tensor| t.data().iter().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a.images.images), bits(&b.images.images));
    }

    #[test]
    fn round_trip_all_payloads() {
        let dir = tempfile::tempdir().unwrap();
        let hard = DistilledArtifact::new(
            "dc",
            images(4, 2),
            LabelPayload::Hard(vec![0, 1, 0, 1]),
            2,
            hard_recipe(),
        )
        .unwrap();

        let soft_rows =
            Tensor::new(vec![4, 2], vec![0.3, 0.7, 0.9, 0.1, 0.5, 0.5, 0.0, 1.0]).unwrap();
        let soft_recipe = EvalConfig {
            loss: LossKind::Sce,
            label_mode: LabelMode::FixedSoft,
            ..hard_recipe()
        };
        let soft = DistilledArtifact::new(
            "datm",
            images(4, 2),
            LabelPayload::FixedSoft(soft_rows),
            2,
            soft_recipe,
        )
        .unwrap();

        let teacher = TeacherSpec {
            architecture: "tiny-desk-cnn".into(),
            width: 8,
            checkpoint: None,
            seed: 3,
        };
        let kd_recipe = EvalConfig {
            loss: LossKind::Kl,
            temperature: Some(4.0),
            label_mode: LabelMode::Teacher,
            teacher: Some(teacher.clone()),
            ..hard_recipe()
        };
        let mut kd = DistilledArtifact::new(
            "sre2l",
            images(4, 2),
            LabelPayload::Teacher {
                teacher,
                temperature: 4.0,
                classes: vec![1, 1, 0, 0],
            },
            2,
            kd_recipe,
        )
        .unwrap();
        kd.zca_space = true;

        for (name, a) in [("hard", &hard), ("soft", &soft), ("kd", &kd)] {
            let p = dir.path().join(format!("{name}.ddrk"));
            save_artifact(a, &p).unwrap();
            assert_same(a, &load_artifact(&p).unwrap());
        }
    }

    #[test]
    fn corrupted_magic_is_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let a = DistilledArtifact::new(
            "dc",
            images(2, 2),
            LabelPayload::Hard(vec![0, 1]),
            1,
            hard_recipe(),
        )
        .unwrap();
        let p = dir.path().join("a.ddrk");
        save_artifact(&a, &p).unwrap();
        let mut bytes = fs::read(&p).unwrap();
        bytes[1] = b'?';
        fs::write(&p, bytes).unwrap();
        assert!(matches!(
            load_artifact(&p),
            Err(Error::Format(FormatError::BadMagic { .. }))
        ));
    }

    #[test]
    fn label_count_mismatch_detected() {
        let dir = tempfile::tempdir().unwrap();
        let a = DistilledArtifact::new(
            "dc",
            images(2, 2),
            LabelPayload::Hard(vec![0, 1]),
            1,
            hard_recipe(),
        )
        .unwrap();
        let p = dir.path().join("a");
        save_artifact(&a, &p).unwrap();
        container::write(
            &dir.path().join("a.labels.ddrk"),
            &RawTensor::u32(vec![0, 1, 1]),
        )
        .unwrap();
        assert!(matches!(
            load_artifact(&p),
            Err(Error::Format(FormatError::ShapeMismatch(_)))
        ));
    }

    #[test]
    fn malformed_meta_detected() {
        let dir = tempfile::tempdir().unwrap();
        let a = DistilledArtifact::new(
            "dc",
            images(2, 2),
            LabelPayload::Hard(vec![0, 1]),
            1,
            hard_recipe(),
        )
        .unwrap();
        let p = dir.path().join("a");
        save_artifact(&a, &p).unwrap();
        fs::write(dir.path().join("a.meta"), "schema = 1\nmethod_id = 3").unwrap();
        assert!(matches!(
            load_artifact(&p),
            Err(Error::Format(FormatError::Metadata { .. }))
        ));
    }

    #[test]
    fn truncated_payload_detected() {
        let dir = tempfile::tempdir().unwrap();
        let a = DistilledArtifact::new(
            "dc",
            images(2, 2),
            LabelPayload::Hard(vec![0, 1]),
            1,
            hard_recipe(),
        )
        .unwrap();
        let p = dir.path().join("a.ddrk");
        save_artifact(&a, &p).unwrap();
        let bytes = fs::read(&p).unwrap();
        fs::write(&p, &bytes[..bytes.len() - 5]).unwrap();
        assert!(matches!(
            load_artifact(&p),
            Err(Error::Format(FormatError::Truncated { .. }))
        ));
    }

    #[test]
    fn dataset_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let train = LabeledSet::new(images(4, 2), vec![0, 1, 1, 0]).unwrap();
        let test = LabeledSet::new(images(2, 2), vec![1, 0]).unwrap();
        let d = Dataset::new("toy", train, test).unwrap();
        save_dataset(&d, dir.path()).unwrap();
        assert_eq!(load_dataset(dir.path()).unwrap(), d);
    }
}
