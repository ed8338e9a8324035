//! Agent networks built from the registry.

use std::path::Path;

use crate::data::container::{self, Payload, RawTensor};
use crate::error::{Error, FormatError, Result};
use crate::rng;
use crate::tensor::Tensor;
use crate::train::config::{AgentModelSpec, Architecture, NormKind};
use crate::train::nn::{Conv3x3, Layer, Linear, Norm, Param};

const EVAL_CHUNK: usize = 256;

#[derive(Debug, Clone)]
pub struct Model {
    pub spec: AgentModelSpec,
    layers: Vec<Layer>,
}

fn conv_block(
    layers: &mut Vec<Layer>,
    cin: usize,
    cout: usize,
    norm: NormKind,
    rng: &mut impl rand::Rng,
) {
    layers.push(Layer::Conv(Conv3x3::new(cin, cout, rng)));
    match norm {
        NormKind::Instance => layers.push(Layer::Norm(Norm::new(cout, false))),
        NormKind::Batch => layers.push(Layer::Norm(Norm::new(cout, true))),
        NormKind::None => {}
    }
    layers.push(Layer::relu());
}

impl Model {
    /// Fresh network with weights drawn from `seed`.
    pub fn new(spec: AgentModelSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut r = rng::stream(seed, &[rng::tag("init")]);
        let (c, h, w) = spec.input;
        let width = spec.width;
        let mut layers = Vec::new();
        let (halvings, channels) = match spec.architecture {
            Architecture::ConvNet { depth, norm } => {
                let mut cin = c;
                for _ in 0..depth {
                    conv_block(&mut layers, cin, width, norm, &mut r);
                    layers.push(Layer::pool());
                    cin = width;
                }
                (depth, width)
            }
            Architecture::TinyDeskCnn => {
                conv_block(&mut layers, c, width, NormKind::Instance, &mut r);
                layers.push(Layer::pool());
                conv_block(&mut layers, width, width, NormKind::Instance, &mut r);
                layers.push(Layer::pool());
                (2, width)
            }
            Architecture::ResNetDesk => {
                conv_block(&mut layers, c, width, NormKind::Batch, &mut r);
                layers.push(Layer::residual(width, true, &mut r));
                layers.push(Layer::pool());
                conv_block(&mut layers, width, 2 * width, NormKind::Batch, &mut r);
                layers.push(Layer::residual(2 * width, true, &mut r));
                layers.push(Layer::pool());
                (2, 2 * width)
            }
        };
        let feat = channels * (h >> halvings) * (w >> halvings);
        layers.push(Layer::flatten());
        layers.push(Layer::Linear(Linear::new(feat, spec.classes, &mut r)));
        Ok(Self { spec, layers })
    }

    fn check_input(&self, x: &Tensor) -> Result<()> {
        let (c, h, w) = self.spec.input;
        let s = x.shape();
        if s.len() != 4 || s[1..] != [c, h, w] {
            return Err(Error::Validation(format!(
                "model {} expects N×{c}×{h}×{w} input, got {s:?}",
                self.spec.id()
            )));
        }
        Ok(())
    }

    /// Training-mode forward pass; caches activations for `backward`.
    pub fn forward_train(&mut self, x: &Tensor) -> Result<Tensor> {
        self.check_input(x)?;
        let mut h = x.clone();
        for l in self.layers.iter_mut() {
            h = l.forward(&h, true);
        }
        Ok(h)
    }

    /// Accumulates parameter gradients for `∂loss/∂logits`.
    pub fn backward(&mut self, grad_logits: &Tensor) {
        let mut g = grad_logits.clone();
        for l in self.layers.iter_mut().rev() {
            g = l.backward(&g);
        }
    }

    /// Inference-mode logits, computed in chunks.
    pub fn predict(&self, x: &Tensor) -> Result<Tensor> {
        self.check_input(x)?;
        let mut net = self.clone();
        let n = x.batch();
        let mut parts = Vec::new();
        for start in (0..n).step_by(EVAL_CHUNK) {
            let idx: Vec<usize> = (start..(start + EVAL_CHUNK).min(n)).collect();
            let mut h = x.select(&idx);
            for l in net.layers.iter_mut() {
                h = l.forward(&h, false);
            }
            parts.push(h);
        }
        Tensor::concat(&parts.iter().collect::<Vec<_>>())
    }

    /// Top-1 accuracy in `[0, 1]`.
    pub fn accuracy(&self, x: &Tensor, labels: &[usize]) -> Result<f64> {
        if labels.len() != x.batch() || labels.is_empty() {
            return Err(Error::Validation(format!(
                "{} labels for {} test images",
                labels.len(),
                x.batch()
            )));
        }
        let logits = self.predict(x)?;
        let correct = labels
            .iter()
            .enumerate()
            .filter(|(i, &y)| argmax(logits.item(*i)) == y)
            .count();
        Ok(correct as f64 / labels.len() as f64)
    }

    pub fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        self.layers.iter_mut().for_each(|l| l.visit_params(f));
    }

    pub fn zero_grad(&mut self) {
        self.visit_params(&mut |p| p.grad.iter_mut().for_each(|g| *g = 0.0));
    }

    pub fn param_count(&mut self) -> usize {
        let mut n = 0;
        self.visit_params(&mut |p| n += p.value.len());
        n
    }

    /// Parameters followed by normalization buffers, flattened.
    pub fn state(&mut self) -> Vec<f32> {
        let mut out = Vec::new();
        self.visit_params(&mut |p| out.extend_from_slice(&p.value));
        self.layers
            .iter_mut()
            .for_each(|l| l.visit_buffers(&mut |b| out.extend_from_slice(b)));
        out
    }

    pub fn load_state(&mut self, state: &[f32]) -> Result<()> {
        let expected = self.state().len();
        if state.len() != expected {
            return Err(FormatError::ShapeMismatch(format!(
                "checkpoint has {} values, model {} needs {expected}",
                state.len(),
                self.spec.id()
            ))
            .into());
        }
        let mut at = 0;
        self.visit_params(&mut |p| {
            let n = p.value.len();
            p.value.copy_from_slice(&state[at..at + n]);
            at += n;
        });
        for l in self.layers.iter_mut() {
            l.visit_buffers(&mut |b| {
                let n = b.len();
                b.copy_from_slice(&state[at..at + n]);
                at += n;
            });
        }
        Ok(())
    }

    pub fn save_checkpoint(&mut self, path: &Path) -> Result<()> {
        let state = self.state();
        container::write(
            path,
            &RawTensor {
                dims: vec![state.len()],
                payload: Payload::F32(state),
            },
        )
    }

    pub fn load_checkpoint(spec: AgentModelSpec, path: &Path) -> Result<Self> {
        let raw = container::read(path)?;
        let state = match raw.payload {
            Payload::F32(v) => v,
            Payload::U32(_) => {
                return Err(
                    FormatError::ShapeMismatch("checkpoint payload must be f32".into()).into(),
                )
            }
        };
        let mut m = Model::new(spec, 0)?;
        m.load_state(&state)?;
        Ok(m)
    }
}

pub(crate) fn argmax(row: &[f32]) -> usize {
    let mut best = 0;
    for (j, &v) in row.iter().enumerate() {
        if v > row[best] {
            best = j;
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(arch: &str) -> AgentModelSpec {
        AgentModelSpec::parse(arch, Some(4), (3, 8, 8), 5).unwrap()
    }

    #[test]
    fn every_architecture_produces_logits() {
        for a in Architecture::registry() {
            let depth_ok = !matches!(a, Architecture::ConvNet { depth, .. } if depth > 3);
            if !depth_ok {
                continue;
            }
            let mut m = Model::new(spec(&a.to_string()), 1).unwrap();
            let x = Tensor::zeros(vec![2, 3, 8, 8]);
            let y = m.forward_train(&x).unwrap();
            assert_eq!(y.shape(), [2, 5], "{a}");
            m.backward(&Tensor::zeros(vec![2, 5]));
            assert_eq!(m.predict(&x).unwrap().shape(), [2, 5]);
        }
    }

    #[test]
    fn same_seed_same_weights() {
        let mut a = Model::new(spec("tiny-desk-cnn"), 3).unwrap();
        let mut b = Model::new(spec("tiny-desk-cnn"), 3).unwrap();
        let mut c = Model::new(spec("tiny-desk-cnn"), 4).unwrap();
        assert_eq!(a.state(), b.state());
        assert_ne!(a.state(), c.state());
    }

    #[test]
    fn checkpoint_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("teacher.ddrk");
        let mut m = Model::new(spec("resnet-desk"), 9).unwrap();
        m.save_checkpoint(&path).unwrap();
        let mut back = Model::load_checkpoint(m.spec, &path).unwrap();
        assert_eq!(back.state(), m.state());
        let other = spec("tiny-desk-cnn");
        assert!(Model::load_checkpoint(other, &path).is_err());
    }

    #[test]
    fn rejects_wrong_input_shape() {
        let m = Model::new(spec("tiny-desk-cnn"), 0).unwrap();
        assert!(m.predict(&Tensor::zeros(vec![1, 1, 8, 8])).is_err());
    }
}
