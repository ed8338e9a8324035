//! Layers with hand-written backward passes.
//!
//! Activations are `B × C × H × W` (or `B × F` after flattening). A layer
//! caches what its backward pass needs during a training-mode forward.

use rand::Rng;

use crate::tensor::Tensor;

const NORM_EPS: f32 = 1e-5;
const BN_MOMENTUM: f32 = 0.1;

/// Weights and their gradient accumulator.
#[derive(Debug, Clone)]
pub struct Param {
    pub value: Vec<f32>,
    pub grad: Vec<f32>,
}

impl Param {
    fn uniform(n: usize, bound: f32, rng: &mut impl Rng) -> Self {
        Self {
            value: (0..n).map(|_| rng.random_range(-bound..=bound)).collect(),
            grad: vec![0.0; n],
        }
    }

    fn filled(n: usize, v: f32) -> Self {
        Self {
            value: vec![v; n],
            grad: vec![0.0; n],
        }
    }
}

/// 3×3 convolution, stride 1, zero padding 1.
#[derive(Debug, Clone)]
pub struct Conv3x3 {
    pub cin: usize,
    pub cout: usize,
    pub weight: Param,
    pub bias: Param,
    input: Option<Tensor>,
}

/// Valid output range along one axis for kernel offset `d ∈ {-1, 0, 1}`.
#[inline]
fn span(d: isize, n: usize) -> (usize, usize) {
    let lo = (-d).max(0) as usize;
    let hi = (n as isize - d.max(0)) as usize;
    (lo, hi)
}

impl Conv3x3 {
    pub fn new(cin: usize, cout: usize, rng: &mut impl Rng) -> Self {
        let bound = 1.0 / ((cin * 9) as f32).sqrt();
        Self {
            cin,
            cout,
            weight: Param::uniform(cout * cin * 9, bound, rng),
            bias: Param::uniform(cout, bound, rng),
            input: None,
        }
    }

    fn forward(&mut self, x: &Tensor, train: bool) -> Tensor {
        let s = x.shape();
        let (b, h, w) = (s[0], s[2], s[3]);
        debug_assert_eq!(s[1], self.cin);
        let plane = h * w;
        let mut out = Tensor::zeros(vec![b, self.cout, h, w]);
        let xd = x.data();
        let od = out.data_mut();
        for n in 0..b {
            for oc in 0..self.cout {
                let o = &mut od[(n * self.cout + oc) * plane..][..plane];
                o.iter_mut().for_each(|v| *v = self.bias.value[oc]);
                for ic in 0..self.cin {
                    let inp = &xd[(n * self.cin + ic) * plane..][..plane];
                    let k = &self.weight.value[(oc * self.cin + ic) * 9..][..9];
                    for ky in 0..3 {
                        let dy = ky as isize - 1;
                        let (y0, y1) = span(dy, h);
                        for kx in 0..3 {
                            let dx = kx as isize - 1;
                            let (x0, x1) = span(dx, w);
                            let wv = k[ky * 3 + kx];
                            for y in y0..y1 {
                                let iy = (y as isize + dy) as usize;
                                let orow = &mut o[y * w + x0..y * w + x1];
                                let irow = &inp[iy * w + (x0 as isize + dx) as usize..][..x1 - x0];
                                for (ov, iv) in orow.iter_mut().zip(irow) {
                                    *ov += wv * iv;
                                }
                            }
                        }
                    }
                }
            }
        }
        if train {
            self.input = Some(x.clone());
        }
        out
    }

    fn backward(&mut self, g: &Tensor) -> Tensor {
        let x = self
            .input
            .take()
            .expect("conv backward without cached input");
        let s = x.shape();
        let (b, h, w) = (s[0], s[2], s[3]);
        let plane = h * w;
        let mut gx = Tensor::zeros(s.to_vec());
        let (xd, gd) = (x.data(), g.data());
        let gxd = gx.data_mut();
        for n in 0..b {
            for oc in 0..self.cout {
                let go = &gd[(n * self.cout + oc) * plane..][..plane];
                self.bias.grad[oc] += go.iter().sum::<f32>();
                for ic in 0..self.cin {
                    let base = (n * self.cin + ic) * plane;
                    let inp = &xd[base..][..plane];
                    let widx = (oc * self.cin + ic) * 9;
                    for ky in 0..3 {
                        let dy = ky as isize - 1;
                        let (y0, y1) = span(dy, h);
                        for kx in 0..3 {
                            let dx = kx as isize - 1;
                            let (x0, x1) = span(dx, w);
                            let wv = self.weight.value[widx + ky * 3 + kx];
                            let mut acc = 0.0f32;
                            for y in y0..y1 {
                                let iy = (y as isize + dy) as usize;
                                let ix0 = (x0 as isize + dx) as usize;
                                let grow = &go[y * w + x0..y * w + x1];
                                let irow = &inp[iy * w + ix0..][..x1 - x0];
                                acc += grow.iter().zip(irow).map(|(a, b)| a * b).sum::<f32>();
                                let gxrow = &mut gxd[base + iy * w + ix0..][..x1 - x0];
                                for (gv, ov) in gxrow.iter_mut().zip(grow) {
                                    *gv += wv * ov;
                                }
                            }
                            self.weight.grad[widx + ky * 3 + kx] += acc;
                        }
                    }
                }
            }
        }
        gx
    }
}

/// Per-channel normalization with affine scale and shift.
///
/// `Instance` normalizes each sample's channel over its pixels. `Batch`
/// normalizes each channel over the whole batch and keeps running
/// statistics for evaluation.
#[derive(Debug, Clone)]
pub struct Norm {
    pub batch: bool,
    pub channels: usize,
    pub gamma: Param,
    pub beta: Param,
    pub running_mean: Vec<f32>,
    pub running_var: Vec<f32>,
    cache: Option<NormCache>,
}

#[derive(Debug, Clone)]
struct NormCache {
    xhat: Tensor,
    inv_std: Vec<f32>,
}

impl Norm {
    pub fn new(channels: usize, batch: bool) -> Self {
        Self {
            batch,
            channels,
            gamma: Param::filled(channels, 1.0),
            beta: Param::filled(channels, 0.0),
            running_mean: vec![0.0; channels],
            running_var: vec![1.0; channels],
            cache: None,
        }
    }

    /// Index lists of the groups normalized together: `(group, channel)` pairs
    /// are visited by `for_each_group`.
    fn groups(&self, b: usize) -> usize {
        if self.batch {
            self.channels
        } else {
            b * self.channels
        }
    }

    fn for_each_in_group(&self, b: usize, plane: usize, g: usize, mut f: impl FnMut(usize)) {
        if self.batch {
            for n in 0..b {
                let base = (n * self.channels + g) * plane;
                (base..base + plane).for_each(&mut f);
            }
        } else {
            let base = g * plane;
            (base..base + plane).for_each(f);
        }
    }

    fn channel_of(&self, g: usize) -> usize {
        if self.batch {
            g
        } else {
            g % self.channels
        }
    }

    fn forward(&mut self, x: &Tensor, train: bool) -> Tensor {
        let s = x.shape();
        let (b, plane) = (s[0], s[2] * s[3]);
        let count = if self.batch { b * plane } else { plane };
        let xd = x.data();
        let mut out = Tensor::zeros(s.to_vec());
        let mut xhat = Tensor::zeros(s.to_vec());
        let groups = self.groups(b);
        let mut inv_stds = Vec::with_capacity(groups);
        for g in 0..groups {
            let c = self.channel_of(g);
            let (mean, var) = if self.batch && !train {
                (self.running_mean[c], self.running_var[c])
            } else {
                let mut sum = 0.0f64;
                self.for_each_in_group(b, plane, g, |i| sum += xd[i] as f64);
                let mean = sum / count as f64;
                let mut sq = 0.0f64;
                self.for_each_in_group(b, plane, g, |i| sq += (xd[i] as f64 - mean).powi(2));
                let var = sq / count as f64;
                if self.batch {
                    let unbiased = if count > 1 {
                        var * count as f64 / (count - 1) as f64
                    } else {
                        var
                    };
                    self.running_mean[c] =
                        (1.0 - BN_MOMENTUM) * self.running_mean[c] + BN_MOMENTUM * mean as f32;
                    self.running_var[c] =
                        (1.0 - BN_MOMENTUM) * self.running_var[c] + BN_MOMENTUM * unbiased as f32;
                }
                (mean as f32, var as f32)
            };
            let inv = 1.0 / (var + NORM_EPS).sqrt();
            inv_stds.push(inv);
            let (gm, bt) = (self.gamma.value[c], self.beta.value[c]);
            let od = out.data_mut();
            let xh = xhat.data_mut();
            self.for_each_in_group(b, plane, g, |i| {
                let v = (xd[i] - mean) * inv;
                xh[i] = v;
                od[i] = gm * v + bt;
            });
        }
        if train {
            self.cache = Some(NormCache {
                xhat,
                inv_std: inv_stds,
            });
        }
        out
    }

    fn backward(&mut self, g: &Tensor) -> Tensor {
        let NormCache { xhat, inv_std } = self.cache.take().expect("norm backward without cache");
        let s = g.shape();
        let (b, plane) = (s[0], s[2] * s[3]);
        let count = if self.batch { b * plane } else { plane } as f32;
        let (gd, xh) = (g.data(), xhat.data());
        let mut gx = Tensor::zeros(s.to_vec());
        for grp in 0..self.groups(b) {
            let c = self.channel_of(grp);
            let gm = self.gamma.value[c];
            let (mut sum_g, mut sum_gx) = (0.0f32, 0.0f32);
            self.for_each_in_group(b, plane, grp, |i| {
                sum_g += gd[i];
                sum_gx += gd[i] * xh[i];
            });
            self.beta.grad[c] += sum_g;
            self.gamma.grad[c] += sum_gx;
            let (mg, mgx) = (sum_g / count, sum_gx / count);
            let k = gm * inv_std[grp];
            let gxd = gx.data_mut();
            self.for_each_in_group(b, plane, grp, |i| {
                gxd[i] = k * (gd[i] - mg - xh[i] * mgx);
            });
        }
        gx
    }
}

#[derive(Debug, Clone)]
pub struct Linear {
    pub fin: usize,
    pub fout: usize,
    pub weight: Param,
    pub bias: Param,
    input: Option<Tensor>,
}

impl Linear {
    pub fn new(fin: usize, fout: usize, rng: &mut impl Rng) -> Self {
        let bound = 1.0 / (fin as f32).sqrt();
        Self {
            fin,
            fout,
            weight: Param::uniform(fin * fout, bound, rng),
            bias: Param::uniform(fout, bound, rng),
            input: None,
        }
    }

    fn forward(&mut self, x: &Tensor, train: bool) -> Tensor {
        let b = x.batch();
        let mut out = Tensor::zeros(vec![b, self.fout]);
        for n in 0..b {
            let xi = x.item(n);
            let o = out.item_mut(n);
            for (j, ov) in o.iter_mut().enumerate() {
                let wr = &self.weight.value[j * self.fin..][..self.fin];
                *ov = self.bias.value[j] + wr.iter().zip(xi).map(|(a, b)| a * b).sum::<f32>();
            }
        }
        if train {
            self.input = Some(x.clone());
        }
        out
    }

    fn backward(&mut self, g: &Tensor) -> Tensor {
        let x = self
            .input
            .take()
            .expect("linear backward without cached input");
        let b = x.batch();
        let mut gx = Tensor::zeros(x.shape().to_vec());
        for n in 0..b {
            let (xi, gi) = (x.item(n), g.item(n));
            let gxi = gx.item_mut(n);
            for (j, &gv) in gi.iter().enumerate() {
                self.bias.grad[j] += gv;
                let wr = &self.weight.value[j * self.fin..][..self.fin];
                let wg = &mut self.weight.grad[j * self.fin..][..self.fin];
                for k in 0..self.fin {
                    wg[k] += gv * xi[k];
                    gxi[k] += gv * wr[k];
                }
            }
        }
        gx
    }
}

/// conv → norm → relu → conv → norm, plus identity, then relu.
#[derive(Debug, Clone)]
pub struct Residual {
    pub body: Vec<Layer>,
    out_mask: Option<Vec<bool>>,
}

#[derive(Debug, Clone)]
pub enum Layer {
    Conv(Conv3x3),
    Norm(Norm),
    Relu(Option<Vec<bool>>),
    /// 2×2 average pooling, stride 2.
    AvgPool(Option<Vec<usize>>),
    Flatten(Option<Vec<usize>>),
    Linear(Linear),
    Residual(Box<Residual>),
}

impl Layer {
    pub fn relu() -> Self {
        Layer::Relu(None)
    }

    pub fn pool() -> Self {
        Layer::AvgPool(None)
    }

    pub fn flatten() -> Self {
        Layer::Flatten(None)
    }

    pub fn residual(channels: usize, batch_norm: bool, rng: &mut impl Rng) -> Self {
        Layer::Residual(Box::new(Residual {
            body: vec![
                Layer::Conv(Conv3x3::new(channels, channels, rng)),
                Layer::Norm(Norm::new(channels, batch_norm)),
                Layer::relu(),
                Layer::Conv(Conv3x3::new(channels, channels, rng)),
                Layer::Norm(Norm::new(channels, batch_norm)),
            ],
            out_mask: None,
        }))
    }

    pub fn forward(&mut self, x: &Tensor, train: bool) -> Tensor {
        match self {
            Layer::Conv(c) => c.forward(x, train),
            Layer::Norm(n) => n.forward(x, train),
            Layer::Linear(l) => l.forward(x, train),
            Layer::Relu(mask) => {
                let mut out = x.clone();
                out.data_mut().iter_mut().for_each(|v| *v = v.max(0.0));
                if train {
                    *mask = Some(x.data().iter().map(|&v| v > 0.0).collect());
                }
                out
            }
            Layer::AvgPool(shape) => {
                let s = x.shape();
                let (b, c, h, w) = (s[0], s[1], s[2], s[3]);
                let (oh, ow) = (h / 2, w / 2);
                let mut out = Tensor::zeros(vec![b, c, oh, ow]);
                let xd = x.data();
                let od = out.data_mut();
                for p in 0..b * c {
                    let src = &xd[p * h * w..][..h * w];
                    let dst = &mut od[p * oh * ow..][..oh * ow];
                    for y in 0..oh {
                        for xx in 0..ow {
                            let i = 2 * y * w + 2 * xx;
                            dst[y * ow + xx] =
                                0.25 * (src[i] + src[i + 1] + src[i + w] + src[i + w + 1]);
                        }
                    }
                }
                if train {
                    *shape = Some(s.to_vec());
                }
                out
            }
            Layer::Flatten(shape) => {
                if train {
                    *shape = Some(x.shape().to_vec());
                }
                let (b, f) = (x.batch(), x.item_len());
                x.clone()
                    .reshape(vec![b, f])
                    .expect("flatten preserves size")
            }
            Layer::Residual(r) => {
                let mut h = x.clone();
                for l in r.body.iter_mut() {
                    h = l.forward(&h, train);
                }
                let hd = h.data_mut();
                for (v, s) in hd.iter_mut().zip(x.data()) {
                    *v += s;
                }
                if train {
                    r.out_mask = Some(hd.iter().map(|&v| v > 0.0).collect());
                }
                hd.iter_mut().for_each(|v| *v = v.max(0.0));
                h
            }
        }
    }

    pub fn backward(&mut self, g: &Tensor) -> Tensor {
        match self {
            Layer::Conv(c) => c.backward(g),
            Layer::Norm(n) => n.backward(g),
            Layer::Linear(l) => l.backward(g),
            Layer::Relu(mask) => {
                let m = mask.take().expect("relu backward without mask");
                let mut out = g.clone();
                out.data_mut().iter_mut().zip(m).for_each(|(v, keep)| {
                    if !keep {
                        *v = 0.0
                    }
                });
                out
            }
            Layer::AvgPool(shape) => {
                let s = shape.take().expect("pool backward without shape");
                let (b, c, h, w) = (s[0], s[1], s[2], s[3]);
                let (oh, ow) = (h / 2, w / 2);
                let mut out = Tensor::zeros(s);
                let gd = g.data();
                let od = out.data_mut();
                for p in 0..b * c {
                    let src = &gd[p * oh * ow..][..oh * ow];
                    let dst = &mut od[p * h * w..][..h * w];
                    for y in 0..oh {
                        for xx in 0..ow {
                            let v = 0.25 * src[y * ow + xx];
                            let i = 2 * y * w + 2 * xx;
                            dst[i] = v;
                            dst[i + 1] = v;
                            dst[i + w] = v;
                            dst[i + w + 1] = v;
                        }
                    }
                }
                out
            }
            Layer::Flatten(shape) => {
                let s = shape.take().expect("flatten backward without shape");
                g.clone().reshape(s).expect("flatten preserves size")
            }
            Layer::Residual(r) => {
                let m = r.out_mask.take().expect("residual backward without mask");
                let mut gs = g.clone();
                gs.data_mut().iter_mut().zip(m).for_each(|(v, keep)| {
                    if !keep {
                        *v = 0.0
                    }
                });
                let mut gb = gs.clone();
                for l in r.body.iter_mut().rev() {
                    gb = l.backward(&gb);
                }
                gb.data_mut()
                    .iter_mut()
                    .zip(gs.data())
                    .for_each(|(a, b)| *a += b);
                gb
            }
        }
    }

    /// Visits trainable parameters in a fixed order.
    pub fn visit_params(&mut self, f: &mut dyn FnMut(&mut Param)) {
        match self {
            Layer::Conv(c) => {
                f(&mut c.weight);
                f(&mut c.bias);
            }
            Layer::Norm(n) => {
                f(&mut n.gamma);
                f(&mut n.beta);
            }
            Layer::Linear(l) => {
                f(&mut l.weight);
                f(&mut l.bias);
            }
            Layer::Residual(r) => r.body.iter_mut().for_each(|l| l.visit_params(f)),
            _ => {}
        }
    }

    /// Visits non-trainable state (batch-norm running statistics).
    pub fn visit_buffers(&mut self, f: &mut dyn FnMut(&mut Vec<f32>)) {
        match self {
            Layer::Norm(n) if n.batch => {
                f(&mut n.running_mean);
                f(&mut n.running_var);
            }
            Layer::Residual(r) => r.body.iter_mut().for_each(|l| l.visit_buffers(f)),
            _ => {}
        }
    }
}
