//! Training losses on logits, with gradients.
//!
//! All losses average over the batch. MSE averages over every logit.

use crate::error::{Error, Result};
use crate::train::config::LossKind;

/// Supervision for one batch; matrices are `B × K`, row-major.
#[derive(Debug, Clone, Copy)]
pub enum LossTarget<'a> {
    Hard(&'a [usize]),
    /// `lam · CE(a) + (1 − lam) · CE(b)`, as produced by CutMix.
    MixedHard {
        a: &'a [usize],
        b: &'a [usize],
        lam: f64,
    },
    Soft(&'a [f64]),
    TeacherLogits(&'a [f64]),
}

#[derive(Debug, Clone)]
pub struct LossOutput {
    pub value: f64,
    /// `∂value/∂logits`, `B × K`.
    pub grad: Vec<f64>,
}

fn log_softmax(row: &[f64], t: f64) -> Vec<f64> {
    let m = row.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b / t));
    let lse = m + row.iter().map(|&v| (v / t - m).exp()).sum::<f64>().ln();
    row.iter().map(|&v| v / t - lse).collect()
}

fn soft_ce(logits: &[f64], p: &[f64], k: usize, b: usize) -> LossOutput {
    let mut value = 0.0;
    let mut grad = vec![0.0; b * k];
    for i in 0..b {
        let (z, pi) = (&logits[i * k..(i + 1) * k], &p[i * k..(i + 1) * k]);
        let ls = log_softmax(z, 1.0);
        let mass: f64 = pi.iter().sum();
        for j in 0..k {
            value -= pi[j] * ls[j];
            grad[i * k + j] = (ls[j].exp() * mass - pi[j]) / b as f64;
        }
    }
    LossOutput {
        value: value / b as f64,
        grad,
    }
}

fn one_hot_rows(labels: &[usize], k: usize, weight: f64, out: &mut [f64]) -> Result<()> {
    for (i, &y) in labels.iter().enumerate() {
        if y >= k {
            return Err(Error::Validation(format!("label {y} outside [0, {k})")));
        }
        out[i * k + y] += weight;
    }
    Ok(())
}

fn check_stochastic(p: &[f64], k: usize) -> Result<()> {
    for (i, row) in p.chunks(k).enumerate() {
        let s: f64 = row.iter().sum();
        if row.iter().any(|v| !v.is_finite() || *v < 0.0) || (s - 1.0).abs() > 1e-5 {
            return Err(Error::Validation(format!(
                "target row {i} is not a probability vector"
            )));
        }
    }
    Ok(())
}

/// Loss value and gradient for `logits` (`B × K`).
pub fn compute_loss(
    kind: LossKind,
    logits: &[f64],
    k: usize,
    target: LossTarget<'_>,
    temperature: Option<f64>,
) -> Result<LossOutput> {
    if k == 0 || logits.is_empty() || !logits.len().is_multiple_of(k) {
        return Err(Error::Validation(format!(
            "{} logits do not form rows of {k}",
            logits.len()
        )));
    }
    let b = logits.len() / k;
    let rows = |n: usize, what: &str| -> Result<()> {
        if n != b {
            return Err(Error::Validation(format!("{n} {what} for a batch of {b}")));
        }
        Ok(())
    };
    match (kind, target) {
        (LossKind::Ce, LossTarget::Hard(y)) => {
            rows(y.len(), "labels")?;
            let mut p = vec![0.0; b * k];
            one_hot_rows(y, k, 1.0, &mut p)?;
            Ok(soft_ce(logits, &p, k, b))
        }
        (LossKind::Ce | LossKind::Sce, LossTarget::MixedHard { a, b: yb, lam }) => {
            rows(a.len(), "labels")?;
            rows(yb.len(), "labels")?;
            if !(0.0..=1.0).contains(&lam) {
                return Err(Error::Domain {
                    name: "lam",
                    value: lam,
                    domain: "[0, 1]",
                });
            }
            let mut p = vec![0.0; b * k];
            one_hot_rows(a, k, lam, &mut p)?;
            one_hot_rows(yb, k, 1.0 - lam, &mut p)?;
            Ok(soft_ce(logits, &p, k, b))
        }
        (LossKind::Sce, LossTarget::Soft(p)) => {
            rows(p.len() / k, "target rows")?;
            check_stochastic(p, k)?;
            Ok(soft_ce(logits, p, k, b))
        }
        (LossKind::Kl, LossTarget::TeacherLogits(t)) => {
            rows(t.len() / k, "teacher rows")?;
            let temp = temperature
                .ok_or_else(|| Error::Validation("KL loss needs a temperature".into()))?;
            if !(temp.is_finite() && temp > 0.0) {
                return Err(Error::Domain {
                    name: "temperature",
                    value: temp,
                    domain: "(0, inf)",
                });
            }
            let mut value = 0.0;
            let mut grad = vec![0.0; b * k];
            for i in 0..b {
                let ls = log_softmax(&logits[i * k..(i + 1) * k], temp);
                let lt = log_softmax(&t[i * k..(i + 1) * k], temp);
                for j in 0..k {
                    let pt = lt[j].exp();
                    value += pt * (lt[j] - ls[j]);
                    grad[i * k + j] = temp * (ls[j].exp() - pt) / b as f64;
                }
            }
            Ok(LossOutput {
                value: temp * temp * value / b as f64,
                grad,
            })
        }
        (LossKind::Mse, LossTarget::TeacherLogits(t)) => {
            rows(t.len() / k, "teacher rows")?;
            let n = (b * k) as f64;
            let value = logits
                .iter()
                .zip(t)
                .map(|(s, t)| (s - t).powi(2))
                .sum::<f64>()
                / n;
            let grad = logits
                .iter()
                .zip(t)
                .map(|(s, t)| 2.0 * (s - t) / n)
                .collect();
            Ok(LossOutput { value, grad })
        }
        (kind, target) => Err(Error::Validation(format!(
            "loss {kind:?} cannot consume {} targets",
            match target {
                LossTarget::Hard(_) => "hard",
                LossTarget::MixedHard { .. } => "mixed hard",
                LossTarget::Soft(_) => "soft",
                LossTarget::TeacherLogits(_) => "teacher-logit",
            }
        ))),
    }
}
