//! Applying a transform chain to one training batch.

use rand::Rng;

use crate::augment::ops;
use crate::augment::spec::{AugChain, TransformSpec};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Supervision carried alongside a batch through the chain.
#[derive(Debug, Clone, PartialEq)]
pub enum BatchTargets {
    Hard(Vec<usize>),
    /// `B × K` probability rows.
    Soft(Vec<f64>),
    /// Two hard labels per image with weight `lam` on `a`.
    MixedHard {
        a: Vec<usize>,
        b: Vec<usize>,
        lam: f64,
    },
    /// Labels are produced afterwards from the augmented pixels.
    Relabel,
}

impl BatchTargets {
    fn into_soft(self, k: usize) -> Result<Vec<f64>> {
        let one_hot = |rows: &[(usize, f64)], out: &mut [f64], i: usize| {
            for &(c, w) in rows {
                out[i * k + c] += w;
            }
        };
        match self {
            BatchTargets::Soft(p) => Ok(p),
            BatchTargets::Hard(y) => {
                let mut out = vec![0.0; y.len() * k];
                for (i, &c) in y.iter().enumerate() {
                    one_hot(&[(c, 1.0)], &mut out, i);
                }
                Ok(out)
            }
            BatchTargets::MixedHard { a, b, lam } => {
                let mut out = vec![0.0; a.len() * k];
                for i in 0..a.len() {
                    one_hot(&[(a[i], lam), (b[i], 1.0 - lam)], &mut out, i);
                }
                Ok(out)
            }
            BatchTargets::Relabel => {
                Err(Error::Precondition("relabel targets have no rows".into()))
            }
        }
    }
}

/// Runs every stochastic transform of `chain` in order. ZCA entries are
/// skipped here: whitening is a fixed preprocessing step applied by the
/// trainer to the whole split.
///
/// CutMix on a batch of one is a no-op.
pub fn apply_chain(
    chain: &AugChain,
    images: &mut Tensor,
    targets: BatchTargets,
    classes: usize,
    rng: &mut impl Rng,
) -> Result<BatchTargets> {
    let mut targets = targets;
    for t in &chain.transforms {
        match t {
            TransformSpec::Identity | TransformSpec::Zca { .. } => {}
            TransformSpec::Flip => ops::flip(images, rng),
            TransformSpec::Dsa(policy) => ops::dsa(images, &policy.ops, rng),
            TransformSpec::ResizedCrop { min_area, max_area } => {
                ops::resized_crop(images, *min_area, *max_area, rng)
            }
            TransformSpec::PatchShuffle { grid } => ops::patch_shuffle(images, *grid, rng)?,
            TransformSpec::CutMix { beta } => {
                if images.batch() < 2 {
                    continue;
                }
                let d = ops::cutmix(images, *beta, rng)?;
                targets = match targets {
                    BatchTargets::Relabel => BatchTargets::Relabel,
                    BatchTargets::Hard(y) => BatchTargets::MixedHard {
                        b: d.partner.iter().map(|&j| y[j]).collect(),
                        a: y,
                        lam: d.lam,
                    },
                    other => {
                        let p = other.into_soft(classes)?;
                        let mut mixed = vec![0.0; p.len()];
                        for (i, &j) in d.partner.iter().enumerate() {
                            for c in 0..classes {
                                mixed[i * classes + c] =
                                    d.lam * p[i * classes + c] + (1.0 - d.lam) * p[j * classes + c];
                            }
                        }
                        BatchTargets::Soft(mixed)
                    }
                };
            }
        }
    }
    Ok(targets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    #[test]
    fn identity_chain_leaves_batch_alone() {
        let mut r = rng::stream(0, &[]);
        let orig = Tensor::new(vec![2, 1, 2, 2], (0..8).map(|v| v as f32).collect()).unwrap();
        let mut t = orig.clone();
        let out = apply_chain(
            &AugChain::identity(),
            &mut t,
            BatchTargets::Hard(vec![0, 1]),
            2,
            &mut r,
        )
        .unwrap();
        assert_eq!(t, orig);
        assert_eq!(out, BatchTargets::Hard(vec![0, 1]));
    }

    #[test]
    fn cutmix_mixes_hard_and_soft_targets() {
        let chain = AugChain::parse(&["cutmix:1.0"]).unwrap();
        let mut r = rng::stream(1, &[]);
        let mut t = Tensor::zeros(vec![4, 1, 4, 4]);
        let out = apply_chain(
            &chain,
            &mut t,
            BatchTargets::Hard(vec![0, 1, 2, 0]),
            3,
            &mut r,
        )
        .unwrap();
        let BatchTargets::MixedHard { a, b, lam } = out else {
            panic!("{out:?}")
        };
        assert_eq!(a, vec![0, 1, 2, 0]);
        assert_eq!(b.len(), 4);
        assert!((0.0..=1.0).contains(&lam));

        let soft = vec![1.0, 0.0, 0.0, 0.5, 0.5, 0.0];
        let mut t = Tensor::zeros(vec![2, 1, 4, 4]);
        let out = apply_chain(&chain, &mut t, BatchTargets::Soft(soft), 3, &mut r).unwrap();
        let BatchTargets::Soft(p) = out else { panic!() };
        for row in p.chunks(3) {
            assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cutmix_skips_single_image_batches() {
        let chain = AugChain::parse(&["cutmix"]).unwrap();
        let mut r = rng::stream(2, &[]);
        let mut t = Tensor::zeros(vec![1, 1, 4, 4]);
        let out = apply_chain(&chain, &mut t, BatchTargets::Hard(vec![1]), 2, &mut r).unwrap();
        assert_eq!(out, BatchTargets::Hard(vec![1]));
    }
}
