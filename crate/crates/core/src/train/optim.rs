use crate::train::config::OptimizerSpec;
use crate::train::model::Model;

const ADAM_EPS: f64 = 1e-8;

/// Per-parameter optimizer state, indexed in `visit_params` order.
#[derive(Debug, Clone)]
pub struct Optimizer {
    spec: OptimizerSpec,
    first: Vec<Vec<f32>>,
    second: Vec<Vec<f32>>,
    steps: u32,
}

impl Optimizer {
    pub fn new(spec: OptimizerSpec) -> Self {
        Self {
            spec,
            first: Vec::new(),
            second: Vec::new(),
            steps: 0,
        }
    }

    /// One update with the accumulated gradients.
    pub fn step(&mut self, model: &mut Model, lr: f64) {
        self.steps += 1;
        let t = self.steps as i32;
        let mut idx = 0;
        let (first, second) = (&mut self.first, &mut self.second);
        let spec = &self.spec;
        model.visit_params(&mut |p| {
            if first.len() <= idx {
                first.push(Vec::new());
                second.push(Vec::new());
            }
            match *spec {
                OptimizerSpec::Sgd {
                    momentum,
                    weight_decay,
                } => {
                    let buf = &mut first[idx];
                    let fresh = buf.is_empty();
                    if fresh {
                        buf.resize(p.value.len(), 0.0);
                    }
                    for ((w, g), b) in p.value.iter_mut().zip(&p.grad).zip(buf.iter_mut()) {
                        let d = *g as f64 + weight_decay * *w as f64;
                        let v = if fresh || momentum == 0.0 {
                            d
                        } else {
                            momentum * *b as f64 + d
                        };
                        *b = v as f32;
                        *w -= (lr * v) as f32;
                    }
                }
                OptimizerSpec::Adamw {
                    betas: (b1, b2),
                    weight_decay,
                } => {
                    let (m, v) = (&mut first[idx], &mut second[idx]);
                    if m.is_empty() {
                        m.resize(p.value.len(), 0.0);
                        v.resize(p.value.len(), 0.0);
                    }
                    let c1 = 1.0 - b1.powi(t);
                    let c2 = 1.0 - b2.powi(t);
                    for i in 0..p.value.len() {
                        let g = p.grad[i] as f64;
                        let mut w = p.value[i] as f64 * (1.0 - lr * weight_decay);
                        let mi = b1 * m[i] as f64 + (1.0 - b1) * g;
                        let vi = b2 * v[i] as f64 + (1.0 - b2) * g * g;
                        m[i] = mi as f32;
                        v[i] = vi as f32;
                        w -= lr * (mi / c1) / ((vi / c2).sqrt() + ADAM_EPS);
                        p.value[i] = w as f32;
                    }
                }
            }
            idx += 1;
        });
    }
}
