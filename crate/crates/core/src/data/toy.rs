//! Synthetic class-conditional image datasets for desk-scale runs.
//!
//! Each class owns a prototype made of a few colored Gaussian blobs. A sample
//! redraws the blobs with jittered centers and amplitudes and adds pixel
//! noise, then every split is standardized with the training-split channel
//! statistics.

use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::dataset::{Dataset, ImageSet, LabeledSet, Normalization};
use crate::error::Result;
use crate::rng;
use crate::tensor::Tensor;

#[derive(Debug, Clone, PartialEq)]
pub struct ToyConfig {
    pub classes: usize,
    pub channels: usize,
    pub size: usize,
    pub train_per_class: usize,
    pub test_per_class: usize,
    pub blobs: usize,
    /// Pixel noise standard deviation, relative to unit blob amplitude.
    pub noise: f32,
    /// Maximum blob-center displacement in pixels.
    pub jitter: f32,
    pub seed: u64,
}

impl Default for ToyConfig {
    /// 10 classes of 3×16×16 images, 500 train / 200 test.
    fn default() -> Self {
        Self {
            classes: 10,
            channels: 3,
            size: 16,
            train_per_class: 50,
            test_per_class: 20,
            blobs: 3,
            noise: 0.8,
            jitter: 2.5,
            seed: 0,
        }
    }
}

struct Blob {
    cy: f32,
    cx: f32,
    sigma: f32,
    color: Vec<f32>,
}

fn prototypes(cfg: &ToyConfig) -> Vec<Vec<Blob>> {
    let mut r = rng::stream(cfg.seed, &[rng::tag("toy-prototypes")]);
    let s = cfg.size as f32;
    (0..cfg.classes)
        .map(|_| {
            (0..cfg.blobs)
                .map(|_| Blob {
                    cy: r.random_range(0.2 * s..0.8 * s),
                    cx: r.random_range(0.2 * s..0.8 * s),
                    sigma: r.random_range(0.08 * s..0.2 * s),
                    color: (0..cfg.channels)
                        .map(|_| r.random_range(-1.0..1.0))
                        .collect(),
                })
                .collect()
        })
        .collect()
}

fn render(cfg: &ToyConfig, blobs: &[Blob], r: &mut impl Rng, out: &mut [f32]) {
    let (c, s) = (cfg.channels, cfg.size);
    let noise = Normal::new(0.0f32, cfg.noise).unwrap();
    out.iter_mut().for_each(|v| *v = 0.0);
    for b in blobs {
        let cy = b.cy + r.random_range(-cfg.jitter..=cfg.jitter);
        let cx = b.cx + r.random_range(-cfg.jitter..=cfg.jitter);
        let amp = r.random_range(0.7f32..1.3);
        let inv = 1.0 / (2.0 * b.sigma * b.sigma);
        for y in 0..s {
            for x in 0..s {
                let d2 = (y as f32 - cy).powi(2) + (x as f32 - cx).powi(2);
                let g = amp * (-d2 * inv).exp();
                for ch in 0..c {
                    out[(ch * s + y) * s + x] += g * b.color[ch];
                }
            }
        }
    }
    for v in out.iter_mut() {
        *v += noise.sample(r);
    }
}

fn split(
    cfg: &ToyConfig,
    protos: &[Vec<Blob>],
    per_class: usize,
    tag: &str,
) -> (Vec<f32>, Vec<usize>) {
    let item = cfg.channels * cfg.size * cfg.size;
    let n = per_class * cfg.classes;
    let mut data = vec![0.0; n * item];
    let mut labels = Vec::with_capacity(n);
    let mut r = rng::stream(cfg.seed, &[rng::tag(tag)]);
    for i in 0..n {
        let class = i % cfg.classes;
        render(
            cfg,
            &protos[class],
            &mut r,
            &mut data[i * item..(i + 1) * item],
        );
        labels.push(class);
    }
    (data, labels)
}

/// Builds a standardized toy dataset with id `toy-<seed>`.
pub fn toy_dataset(cfg: &ToyConfig) -> Result<Dataset> {
    let protos = prototypes(cfg);
    let (mut train, train_labels) = split(cfg, &protos, cfg.train_per_class, "toy-train");
    let (mut test, test_labels) = split(cfg, &protos, cfg.test_per_class, "toy-test");
    let (c, s) = (cfg.channels, cfg.size);
    let plane = s * s;
    let mut mean = vec![0.0f32; c];
    let mut std = vec![0.0f32; c];
    for ch in 0..c {
        let vals = train.chunks(plane).skip(ch).step_by(c).flatten();
        let (sum, sq, cnt) = vals.fold((0.0f64, 0.0f64, 0usize), |(a, b, n), &v| {
            (a + v as f64, b + (v as f64).powi(2), n + 1)
        });
        let m = sum / cnt as f64;
        mean[ch] = m as f32;
        std[ch] = ((sq / cnt as f64 - m * m).max(1e-12)).sqrt() as f32;
    }
    for buf in [&mut train, &mut test] {
        for (j, chunk) in buf.chunks_mut(plane).enumerate() {
            let ch = j % c;
            chunk
                .iter_mut()
                .for_each(|v| *v = (*v - mean[ch]) / std[ch]);
        }
    }
    let norm = Normalization { mean, std };
    let set = |data: Vec<f32>, labels: Vec<usize>| -> Result<LabeledSet> {
        let n = labels.len();
        LabeledSet::new(
            ImageSet::new(
                Tensor::new(vec![n, c, s, s], data)?,
                norm.clone(),
                cfg.classes,
            )?,
            labels,
        )
    };
    Dataset::new(
        format!("toy-{}", cfg.seed),
        set(train, train_labels)?,
        set(test, test_labels)?,
    )
}

/// Class-mean images plus a little noise, standing in for a distilled set.
pub fn prototype_images(
    dataset: &LabeledSet,
    ipc: usize,
    noise: f32,
    seed: u64,
) -> Result<LabeledSet> {
    let k = dataset.classes();
    let item = dataset.images.images.item_len();
    let mut means = vec![vec![0.0f32; item]; k];
    let counts = dataset.class_counts();
    for (i, &l) in dataset.labels.iter().enumerate() {
        for (m, v) in means[l].iter_mut().zip(dataset.images.images.item(i)) {
            *m += v / counts[l] as f32;
        }
    }
    let mut r = rng::stream(seed, &[rng::tag("prototype-images")]);
    let mut data = Vec::with_capacity(k * ipc * item);
    let mut labels = Vec::with_capacity(k * ipc);
    for class in 0..k {
        for _ in 0..ipc {
            data.extend(means[class].iter().map(|&m| {
                let z: f32 = StandardNormal.sample(&mut r);
                m + noise * z
            }));
            labels.push(class);
        }
    }
    let mut shape = dataset.images.images.shape().to_vec();
    shape[0] = k * ipc;
    LabeledSet::new(
        ImageSet::new(
            Tensor::new(shape, data)?,
            dataset.images.normalization.clone(),
            k,
        )?,
        labels,
    )
}
