//! Stochastic image transforms on `C × H × W` items and `N × C × H × W` batches.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Beta, Distribution};

use crate::augment::spec::DsaOp;
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Samples per-image with probability 0.5 and mirrors horizontally.
pub fn flip(batch: &mut Tensor, rng: &mut impl Rng) {
    let w = batch.shape()[3];
    for i in 0..batch.batch() {
        if rng.random_bool(0.5) {
            mirror(batch.item_mut(i), w);
        }
    }
}

fn mirror(img: &mut [f32], w: usize) {
    img.chunks_mut(w).for_each(<[f32]>::reverse);
}

/// Crop window in continuous pixel coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CropBox {
    pub x0: f64,
    pub y0: f64,
    pub width: f64,
    pub height: f64,
}

const LOG_RATIO: (f64, f64) = (-0.287_682_072_451_780_9, 0.287_682_072_451_780_9); // ln(3/4), ln(4/3)

/// Draws an area fraction uniformly from `[min_area, max_area]` and an aspect
/// ratio log-uniformly from `[3/4, 4/3]`. Only the ratio is redrawn when the
/// window does not fit, falling back to a square window, so the area fraction
/// stays exactly uniform.
pub fn sample_crop_box(
    h: usize,
    w: usize,
    min_area: f64,
    max_area: f64,
    rng: &mut impl Rng,
) -> CropBox {
    let (hf, wf) = (h as f64, w as f64);
    let frac = if max_area > min_area {
        rng.random_range(min_area..=max_area)
    } else {
        min_area
    };
    let target = frac * hf * wf;
    let mut dims = None;
    for _ in 0..10 {
        let r = rng.random_range(LOG_RATIO.0..LOG_RATIO.1).exp();
        let (cw, ch) = ((target * r).sqrt(), (target / r).sqrt());
        if cw <= wf && ch <= hf {
            dims = Some((cw, ch));
            break;
        }
    }
    let (cw, ch) = dims.unwrap_or_else(|| {
        let s = frac.sqrt();
        (wf * s, hf * s)
    });
    CropBox {
        x0: rng.random_range(0.0..=(wf - cw)),
        y0: rng.random_range(0.0..=(hf - ch)),
        width: cw,
        height: ch,
    }
}

/// Bilinear sample at continuous `(y, x)` (pixel centers at integers),
/// clamping to the border.
fn sample_clamped(plane: &[f32], h: usize, w: usize, y: f64, x: f64) -> f32 {
    let y = y.clamp(0.0, (h - 1) as f64);
    let x = x.clamp(0.0, (w - 1) as f64);
    let (y0, x0) = (y.floor() as usize, x.floor() as usize);
    let (y1, x1) = ((y0 + 1).min(h - 1), (x0 + 1).min(w - 1));
    let (fy, fx) = ((y - y0 as f64) as f32, (x - x0 as f64) as f32);
    let top = plane[y0 * w + x0] * (1.0 - fx) + plane[y0 * w + x1] * fx;
    let bot = plane[y1 * w + x0] * (1.0 - fx) + plane[y1 * w + x1] * fx;
    top * (1.0 - fy) + bot * fy
}

/// Bilinear sample with zeros outside the image.
fn sample_zero(plane: &[f32], h: usize, w: usize, y: f64, x: f64) -> f32 {
    let (yf, xf) = (y.floor(), x.floor());
    let (fy, fx) = ((y - yf) as f32, (x - xf) as f32);
    let at = |yy: f64, xx: f64| -> f32 {
        if yy < 0.0 || xx < 0.0 || yy >= h as f64 || xx >= w as f64 {
            0.0
        } else {
            plane[yy as usize * w + xx as usize]
        }
    };
    let top = at(yf, xf) * (1.0 - fx) + at(yf, xf + 1.0) * fx;
    let bot = at(yf + 1.0, xf) * (1.0 - fx) + at(yf + 1.0, xf + 1.0) * fx;
    top * (1.0 - fy) + bot * fy
}

/// Resamples the crop window back to the full `H × W` grid.
pub fn crop_resize(img: &[f32], c: usize, h: usize, w: usize, b: CropBox) -> Vec<f32> {
    let mut out = vec![0.0; c * h * w];
    let (sy, sx) = (b.height / h as f64, b.width / w as f64);
    for ch in 0..c {
        let plane = &img[ch * h * w..][..h * w];
        for i in 0..h {
            let y = b.y0 + (i as f64 + 0.5) * sy - 0.5;
            for j in 0..w {
                let x = b.x0 + (j as f64 + 0.5) * sx - 0.5;
                out[ch * h * w + i * w + j] = sample_clamped(plane, h, w, y, x);
            }
        }
    }
    out
}

pub fn resized_crop(batch: &mut Tensor, min_area: f64, max_area: f64, rng: &mut impl Rng) {
    let s = batch.shape().to_vec();
    let (c, h, w) = (s[1], s[2], s[3]);
    for i in 0..batch.batch() {
        let b = sample_crop_box(h, w, min_area, max_area, rng);
        let out = crop_resize(batch.item(i), c, h, w, b);
        batch.item_mut(i).copy_from_slice(&out);
    }
}

/// Result of one CutMix draw over a batch.
#[derive(Debug, Clone, PartialEq)]
pub struct CutMixDraw {
    /// Image `i` received a box pasted from image `partner[i]`.
    pub partner: Vec<usize>,
    /// Fraction of each image left untouched; label weight of the original.
    pub lam: f64,
    /// The Beta draw before the box was rounded to whole pixels.
    pub drawn_lam: f64,
    /// `(x0, y0, width, height)` in pixels.
    pub pasted: (usize, usize, usize, usize),
}

/// Pastes one box per batch, fully inside the frame, from a shuffled partner.
pub fn cutmix(batch: &mut Tensor, beta: f64, rng: &mut impl Rng) -> Result<CutMixDraw> {
    let n = batch.batch();
    if n < 2 {
        return Err(Error::Precondition(format!(
            "cutmix needs a batch of at least 2, got {n}"
        )));
    }
    let dist =
        Beta::new(beta, beta).map_err(|e| Error::Validation(format!("cutmix beta {beta}: {e}")))?;
    let lam0: f64 = dist.sample(rng);
    let s = batch.shape().to_vec();
    let (c, h, w) = (s[1], s[2], s[3]);
    let cut = (1.0 - lam0).sqrt();
    let bw = ((w as f64 * cut).round() as usize).min(w);
    let bh = ((h as f64 * cut).round() as usize).min(h);
    let x0 = rng.random_range(0..=w - bw);
    let y0 = rng.random_range(0..=h - bh);
    let mut partner: Vec<usize> = (0..n).collect();
    partner.shuffle(rng);
    let src = batch.clone();
    for i in 0..n {
        let from = src.item(partner[i]);
        let to = batch.item_mut(i);
        for ch in 0..c {
            for y in y0..y0 + bh {
                let off = ch * h * w + y * w;
                to[off + x0..off + x0 + bw].copy_from_slice(&from[off + x0..off + x0 + bw]);
            }
        }
    }
    Ok(CutMixDraw {
        partner,
        lam: 1.0 - (bw * bh) as f64 / (w * h) as f64,
        drawn_lam: lam0,
        pasted: (x0, y0, bw, bh),
    })
}

/// Splits the image into `grid × grid` tiles and permutes them uniformly.
/// Returns the permutation: output tile `t` holds input tile `perm[t]`.
pub fn patch_shuffle_one(
    img: &mut [f32],
    c: usize,
    h: usize,
    w: usize,
    grid: usize,
    rng: &mut impl Rng,
) -> Result<Vec<usize>> {
    if grid == 0 || !h.is_multiple_of(grid) || !w.is_multiple_of(grid) {
        return Err(Error::Validation(format!(
            "patch_shuffle grid {grid} does not divide {h}x{w}"
        )));
    }
    let (th, tw) = (h / grid, w / grid);
    let mut perm: Vec<usize> = (0..grid * grid).collect();
    perm.shuffle(rng);
    let src = img.to_vec();
    for (t, &p) in perm.iter().enumerate() {
        let (ty, tx) = (t / grid, t % grid);
        let (py, px) = (p / grid, p % grid);
        for ch in 0..c {
            for y in 0..th {
                let dst = ch * h * w + (ty * th + y) * w + tx * tw;
                let from = ch * h * w + (py * th + y) * w + px * tw;
                img[dst..dst + tw].copy_from_slice(&src[from..from + tw]);
            }
        }
    }
    Ok(perm)
}

pub fn patch_shuffle(batch: &mut Tensor, grid: usize, rng: &mut impl Rng) -> Result<()> {
    let s = batch.shape().to_vec();
    for i in 0..batch.batch() {
        patch_shuffle_one(batch.item_mut(i), s[1], s[2], s[3], grid, rng)?;
    }
    Ok(())
}

/// Warps with `src = A · (dst − center) + center + shift`, zero fill.
fn affine(img: &mut [f32], c: usize, h: usize, w: usize, a: [[f64; 2]; 2], shift: (f64, f64)) {
    let src = img.to_vec();
    let (cy, cx) = ((h as f64 - 1.0) / 2.0, (w as f64 - 1.0) / 2.0);
    for ch in 0..c {
        let plane = &src[ch * h * w..][..h * w];
        for i in 0..h {
            let dy = i as f64 - cy;
            for j in 0..w {
                let dx = j as f64 - cx;
                let sy = a[0][0] * dy + a[0][1] * dx + cy + shift.0;
                let sx = a[1][0] * dy + a[1][1] * dx + cx + shift.1;
                img[ch * h * w + i * w + j] = sample_zero(plane, h, w, sy, sx);
            }
        }
    }
}

fn dsa_one(op: DsaOp, img: &mut [f32], c: usize, h: usize, w: usize, rng: &mut impl Rng) {
    let plane = h * w;
    match op {
        DsaOp::Color => {
            let bright: f32 = rng.random_range(-0.5..0.5);
            img.iter_mut().for_each(|v| *v += bright);
            let sat: f32 = rng.random_range(0.0..2.0);
            for p in 0..plane {
                let m = (0..c).map(|ch| img[ch * plane + p]).sum::<f32>() / c as f32;
                for ch in 0..c {
                    let v = &mut img[ch * plane + p];
                    *v = (*v - m) * sat + m;
                }
            }
            let con: f32 = rng.random_range(0.5..1.5);
            let m = img.iter().sum::<f32>() / img.len() as f32;
            img.iter_mut().for_each(|v| *v = (*v - m) * con + m);
        }
        DsaOp::Crop(ratio) => {
            let my = (h as f64 * ratio).round() as i64;
            let mx = (w as f64 * ratio).round() as i64;
            let ty = rng.random_range(-my..=my) as f64;
            let tx = rng.random_range(-mx..=mx) as f64;
            affine(img, c, h, w, [[1.0, 0.0], [0.0, 1.0]], (ty, tx));
        }
        DsaOp::Cutout(ratio) => {
            let (sh, sw) = (
                ((h as f64) * ratio).round() as i64,
                ((w as f64) * ratio).round() as i64,
            );
            let cy = rng.random_range(0..h as i64);
            let cx = rng.random_range(0..w as i64);
            let (y0, y1) = (
                (cy - sh / 2).max(0) as usize,
                ((cy - sh / 2 + sh).min(h as i64)).max(0) as usize,
            );
            let (x0, x1) = (
                (cx - sw / 2).max(0) as usize,
                ((cx - sw / 2 + sw).min(w as i64)).max(0) as usize,
            );
            for ch in 0..c {
                for y in y0..y1 {
                    img[ch * plane + y * w + x0..ch * plane + y * w + x1]
                        .iter_mut()
                        .for_each(|v| *v = 0.0);
                }
            }
        }
        DsaOp::Flip => {
            if rng.random_bool(0.5) {
                mirror(img, w);
            }
        }
        DsaOp::Scale(ratio) => {
            let sy = rng.random_range(1.0 / ratio..=ratio);
            let sx = rng.random_range(1.0 / ratio..=ratio);
            affine(img, c, h, w, [[sy, 0.0], [0.0, sx]], (0.0, 0.0));
        }
        DsaOp::Rotate(deg) => {
            let t = rng.random_range(-deg..=deg).to_radians();
            let (s, co) = t.sin_cos();
            affine(img, c, h, w, [[co, -s], [s, co]], (0.0, 0.0));
        }
    }
}

/// Applies every op of the policy, in order, with fresh parameters per image.
pub fn dsa(batch: &mut Tensor, ops: &[DsaOp], rng: &mut impl Rng) {
    let s = batch.shape().to_vec();
    for i in 0..batch.batch() {
        for &op in ops {
            dsa_one(op, batch.item_mut(i), s[1], s[2], s[3], rng);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn ramp(n: usize, c: usize, h: usize, w: usize) -> Tensor {
        Tensor::new(
            vec![n, c, h, w],
            (0..n * c * h * w).map(|v| v as f32).collect(),
        )
        .unwrap()
    }

    #[test]
    fn flip_is_an_involution_per_image() {
        let mut r = rng::stream(0, &[]);
        let orig = ramp(16, 2, 3, 4);
        let mut t = orig.clone();
        flip(&mut t, &mut r);
        for i in 0..16 {
            let mut back = t.item(i).to_vec();
            if back != orig.item(i) {
                mirror(&mut back, 4);
            }
            assert_eq!(back, orig.item(i));
        }
    }

    #[test]
    fn full_window_crop_is_identity() {
        let img = ramp(1, 1, 4, 4);
        let b = CropBox {
            x0: 0.0,
            y0: 0.0,
            width: 4.0,
            height: 4.0,
        };
        assert_eq!(crop_resize(img.item(0), 1, 4, 4, b), img.item(0));
    }

    #[test]
    fn crop_boxes_fit_and_match_area() {
        let mut r = rng::stream(1, &[]);
        for _ in 0..2000 {
            let b = sample_crop_box(16, 12, 0.08, 1.0, &mut r);
            assert!(b.x0 >= 0.0 && b.x0 + b.width <= 12.0 + 1e-9);
            assert!(b.y0 >= 0.0 && b.y0 + b.height <= 16.0 + 1e-9);
            let frac = b.width * b.height / 192.0;
            assert!((0.08 - 1e-9..=1.0 + 1e-9).contains(&frac));
        }
    }

    #[test]
    fn cutmix_pastes_inside_and_reports_area() {
        let mut r = rng::stream(2, &[]);
        let orig = ramp(4, 1, 8, 8);
        let mut t = orig.clone();
        let d = cutmix(&mut t, 1.0, &mut r).unwrap();
        let (x0, y0, bw, bh) = d.pasted;
        assert!(x0 + bw <= 8 && y0 + bh <= 8);
        assert!((d.lam - (1.0 - (bw * bh) as f64 / 64.0)).abs() < 1e-12);
        for i in 0..4 {
            for y in 0..8 {
                for x in 0..8 {
                    let inside = (y0..y0 + bh).contains(&y) && (x0..x0 + bw).contains(&x);
                    let src = if inside { d.partner[i] } else { i };
                    assert_eq!(t.item(i)[y * 8 + x], orig.item(src)[y * 8 + x]);
                }
            }
        }
        assert!(cutmix(&mut ramp(1, 1, 4, 4), 1.0, &mut r).is_err());
    }

    #[test]
    fn patch_shuffle_moves_tiles_whole() {
        let mut r = rng::stream(3, &[]);
        let orig = ramp(1, 2, 4, 4);
        let mut img = orig.item(0).to_vec();
        let perm = patch_shuffle_one(&mut img, 2, 4, 4, 2, &mut r).unwrap();
        let mut sorted = perm.clone();
        sorted.sort();
        assert_eq!(sorted, vec![0, 1, 2, 3]);
        let mut a = img.clone();
        a.sort_by(f32::total_cmp);
        let mut b = orig.item(0).to_vec();
        b.sort_by(f32::total_cmp);
        assert_eq!(a, b);
        assert!(patch_shuffle_one(&mut img, 2, 4, 4, 3, &mut r).is_err());
    }

    #[test]
    fn dsa_keeps_shape_and_finiteness() {
        let mut r = rng::stream(4, &[]);
        let mut t = ramp(3, 3, 8, 8);
        let ops: Vec<DsaOp> = "color_crop_cutout_flip_scale_rotate"
            .parse::<crate::augment::spec::DsaPolicy>()
            .unwrap()
            .ops;
        dsa(&mut t, &ops, &mut r);
        assert_eq!(t.shape(), [3, 3, 8, 8]);
        assert!(t.all_finite());
    }

    #[test]
    fn zero_rotation_is_identity() {
        let orig = ramp(1, 1, 5, 5);
        let mut img = orig.item(0).to_vec();
        affine(&mut img, 1, 5, 5, [[1.0, 0.0], [0.0, 1.0]], (0.0, 0.0));
        assert_eq!(img, orig.item(0));
    }
}
