//! Label-robust and augmentation-robust scores.
//!
//! Accuracies are carried as fractions in `[0, 1]`. HLR and IOR are signed
//! fractions; LRS and ARS are percentages in `[0, 100]`. Conversion to
//! percentage points happens only when a [`MetricResult`] is built for
//! reporting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const E: f64 = std::f64::consts::E;
/// Slack for `a·x − (1−a)·y` landing a few ulps outside `[−1, 1]`.
const UNIT_SLACK: f64 = 1e-12;

fn check_fraction(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "[0, 1]",
        })
    }
}

fn check_signed(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && (-1.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain {
            name,
            value,
            domain: "[-1, 1]",
        })
    }
}

/// Accuracies feeding HLR and IOR.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyRecord {
    pub real_hard: f64,
    pub syn_hard: f64,
    pub syn_any: f64,
    pub rdm_any: f64,
}

impl AccuracyRecord {
    pub fn new(real_hard: f64, syn_hard: f64, syn_any: f64, rdm_any: f64) -> Result<Self> {
        Ok(Self {
            real_hard: check_fraction("real_hard", real_hard)?,
            syn_hard: check_fraction("syn_hard", syn_hard)?,
            syn_any: check_fraction("syn_any", syn_any)?,
            rdm_any: check_fraction("rdm_any", rdm_any)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.real_hard, self.syn_hard, self.syn_any, self.rdm_any).map(|_| ())
    }

    pub fn hlr(&self) -> Result<f64> {
        compute_hlr(self.real_hard, self.syn_hard)
    }

    pub fn ior(&self) -> Result<f64> {
        compute_ior(self.syn_any, self.rdm_any)
    }

    fn fields(&self) -> [f64; 4] {
        [self.real_hard, self.syn_hard, self.syn_any, self.rdm_any]
    }
}

/// Accuracies feeding ARS: synthetic and random data, with and without augmentation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AccuracyQuad {
    pub syn_aug: f64,
    pub rdm_aug: f64,
    pub syn_naug: f64,
    pub rdm_naug: f64,
}

impl AccuracyQuad {
    pub fn new(syn_aug: f64, rdm_aug: f64, syn_naug: f64, rdm_naug: f64) -> Result<Self> {
        Ok(Self {
            syn_aug: check_fraction("syn_aug", syn_aug)?,
            rdm_aug: check_fraction("rdm_aug", rdm_aug)?,
            syn_naug: check_fraction("syn_naug", syn_naug)?,
            rdm_naug: check_fraction("rdm_naug", rdm_naug)?,
        })
    }

    pub fn validate(&self) -> Result<()> {
        Self::new(self.syn_aug, self.rdm_aug, self.syn_naug, self.rdm_naug).map(|_| ())
    }

    /// `syn_aug − rdm_aug`
    pub fn ior_aug(&self) -> f64 {
        self.syn_aug - self.rdm_aug
    }

    /// `syn_naug − rdm_naug`
    pub fn ior_naug(&self) -> f64 {
        self.syn_naug - self.rdm_naug
    }

    fn fields(&self) -> [f64; 4] {
        [self.syn_aug, self.rdm_aug, self.syn_naug, self.rdm_naug]
    }
}

/// λ weighs IOR against HLR in LRS; γ weighs the augmented gap in ARS.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricWeights {
    pub lambda: f64,
    pub gamma: f64,
}

impl Default for MetricWeights {
    fn default() -> Self {
        Self {
            lambda: 0.5,
            gamma: 0.5,
        }
    }
}

impl MetricWeights {
    pub fn new(lambda: f64, gamma: f64) -> Result<Self> {
        Ok(Self {
            lambda: check_fraction("lambda", lambda)?,
            gamma: check_fraction("gamma", gamma)?,
        })
    }
}

/// Scores in reporting units: HLR and IOR in percentage points, LRS and ARS in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub hlr: f64,
    pub ior: f64,
    pub lrs: f64,
    pub ars: Option<f64>,
    pub weights: MetricWeights,
}

impl MetricResult {
    /// Scores an aggregated accuracy record, and optionally a quad for ARS.
    pub fn compute(
        record: &AccuracyRecord,
        quad: Option<&AccuracyQuad>,
        weights: MetricWeights,
    ) -> Result<Self> {
        let hlr = record.hlr()?;
        let ior = record.ior()?;
        let lrs = compute_lrs(hlr, ior, weights.lambda)?;
        let ars = quad.map(|q| compute_ars(q, weights.gamma)).transpose()?;
        Ok(Self {
            hlr: to_percent(hlr),
            ior: to_percent(ior),
            lrs,
            ars,
            weights,
        })
    }
}

/// Maps `alpha ∈ [−1, 1]` onto `[0, 1]` via `(e^α − e^{−1}) / (e − e^{−1})`.
pub fn exp_normalize(alpha: f64) -> Result<f64> {
    if !alpha.is_finite() || alpha.abs() > 1.0 + UNIT_SLACK {
        return Err(Error::Domain {
            name: "alpha",
            value: alpha,
            domain: "[-1, 1]",
        });
    }
    let alpha = alpha.clamp(-1.0, 1.0);
    if alpha == 1.0 {
        return Ok(1.0);
    }
    if alpha == -1.0 {
        return Ok(0.0);
    }
    let lo = (-1.0f64).exp();
    Ok((alpha.exp() - lo) / (E - lo))
}

/// Hard-label recovery: `real_hard − syn_hard`. Smaller is better.
pub fn compute_hlr(real_hard: f64, syn_hard: f64) -> Result<f64> {
    Ok(check_fraction("real_hard", real_hard)? - check_fraction("syn_hard", syn_hard)?)
}

/// Improvement over random: `syn_any − rdm_any`. Positive when the method beats random selection.
pub fn compute_ior(syn_any: f64, rdm_any: f64) -> Result<f64> {
    Ok(check_fraction("syn_any", syn_any)? - check_fraction("rdm_any", rdm_any)?)
}

/// Label-robust score in percent.
pub fn compute_lrs(hlr: f64, ior: f64, lambda: f64) -> Result<f64> {
    let hlr = check_signed("hlr", hlr)?;
    let ior = check_signed("ior", ior)?;
    let lambda = check_fraction("lambda", lambda)?;
    let alpha = lambda * ior - (1.0 - lambda) * hlr;
    Ok(100.0 * exp_normalize(alpha)?)
}

/// Augmentation-robust score in percent, from the two syn-minus-random gaps.
pub fn compute_ars_from_gaps(ior_aug: f64, ior_naug: f64, gamma: f64) -> Result<f64> {
    let ior_aug = check_signed("ior_aug", ior_aug)?;
    let ior_naug = check_signed("ior_naug", ior_naug)?;
    let gamma = check_fraction("gamma", gamma)?;
    let beta = gamma * ior_aug + (1.0 - gamma) * ior_naug;
    Ok(100.0 * exp_normalize(beta)?)
}

pub fn compute_ars(quad: &AccuracyQuad, gamma: f64) -> Result<f64> {
    quad.validate()?;
    compute_ars_from_gaps(quad.ior_aug(), quad.ior_naug(), gamma)
}

fn field_means<const N: usize>(rows: impl ExactSizeIterator<Item = [f64; N]>) -> Result<[f64; N]> {
    let n = rows.len();
    if n == 0 {
        return Err(Error::Precondition(
            "cannot aggregate an empty list of seed results".into(),
        ));
    }
    let mut sums = [0.0; N];
    for row in rows {
        for (s, v) in sums.iter_mut().zip(row) {
            *s += v;
        }
    }
    Ok(sums.map(|s| s / n as f64))
}

/// Field-wise mean of per-seed records. Metrics are computed on the result,
/// not averaged per seed.
pub fn aggregate_seeds(records: &[AccuracyRecord]) -> Result<AccuracyRecord> {
    let [real_hard, syn_hard, syn_any, rdm_any] = field_means(records.iter().map(|r| r.fields()))?;
    AccuracyRecord::new(real_hard, syn_hard, syn_any, rdm_any)
}

pub fn aggregate_quads(quads: &[AccuracyQuad]) -> Result<AccuracyQuad> {
    let [a, b, c, d] = field_means(quads.iter().map(|q| q.fields()))?;
    AccuracyQuad::new(a, b, c, d)
}

/// LRS at each λ, in input order.
pub fn sweep_weights(hlr: f64, ior: f64, lambdas: &[f64]) -> Result<Vec<(f64, f64)>> {
    lambdas
        .iter()
        .map(|&l| compute_lrs(hlr, ior, l).map(|lrs| (l, lrs)))
        .collect()
}

pub fn to_percent(fraction: f64) -> f64 {
    fraction * 100.0
}

pub fn from_percent(percent: f64) -> f64 {
    percent / 100.0
}

/// Rounds half away from zero to one decimal, as the published tables do.
pub fn round1(x: f64) -> f64 {
    let r = (x * 10.0).round() / 10.0;
    // Avoid printing "-0.0".
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn exp_normalize_endpoints_are_exact() {
        assert_eq!(exp_normalize(1.0).unwrap(), 1.0);
        assert_eq!(exp_normalize(-1.0).unwrap(), 0.0);
        let mid = (1.0 - (-1.0f64).exp()) / (E - (-1.0f64).exp());
        assert!((exp_normalize(0.0).unwrap() - 0.26894).abs() < 1e-5);
        assert_eq!(exp_normalize(0.0).unwrap(), mid);
    }

    #[test]
    fn exp_normalize_rejects_out_of_domain() {
        let err = exp_normalize(1.5).unwrap_err();
        assert!(err.to_string().contains("1.5"), "{err}");
        assert!(exp_normalize(f64::NAN).is_err());
        assert!(exp_normalize(-1.01).is_err());
    }

    #[test]
    fn hlr_examples() {
        assert_eq!(compute_hlr(0.84, 0.84).unwrap(), 0.0);
        assert_eq!(compute_hlr(1.0, 0.0).unwrap(), 1.0);
        assert!((compute_hlr(0.847, 0.320).unwrap() - 0.527).abs() < 1e-12);
        assert!(compute_hlr(1.2, 0.3).is_err());
        assert!(compute_hlr(0.5, -0.1).is_err());
    }

    #[test]
    fn ior_examples() {
        assert_eq!(compute_ior(0.5, 0.5).unwrap(), 0.0);
        assert!((compute_ior(0.624, 0.500).unwrap() - 0.124).abs() < 1e-12);
        assert!((compute_ior(0.30, 0.45).unwrap() + 0.15).abs() < 1e-12);
        assert!(compute_ior(0.3, 1.01).is_err());
    }

    #[test]
    fn lrs_matches_published_rows() {
        assert!((compute_lrs(0.527, 0.124, 0.5).unwrap() - 19.1).abs() <= 0.1);
        assert!((compute_lrs(0.419, 0.308, 0.5).unwrap() - 24.6).abs() <= 0.1);
        assert!((compute_lrs(0.527, 0.124, 0.9).unwrap() - 29.5).abs() <= 0.2);
    }

    #[test]
    fn lrs_domain_errors() {
        assert!(compute_lrs(0.5, 0.1, 1.5).is_err());
        assert!(compute_lrs(1.5, 0.1, 0.5).is_err());
        assert!(compute_lrs(0.5, -1.1, 0.5).is_err());
    }

    #[test]
    fn ars_examples() {
        let q = AccuracyQuad::new(0.5 - 0.015, 0.5, 0.4 - 0.012, 0.4).unwrap();
        assert!((compute_ars(&q, 0.5).unwrap() - 26.3).abs() <= 0.1);
        for gamma in [0.0, 0.3, 1.0] {
            let zero = AccuracyQuad::new(0.6, 0.6, 0.2, 0.2).unwrap();
            assert!((compute_ars(&zero, gamma).unwrap() - 26.9).abs() <= 0.1);
        }
        assert!((compute_ars_from_gaps(-0.036, 0.020, 0.5).unwrap() - 26.6).abs() <= 0.2);
        assert!(compute_ars_from_gaps(0.0, 0.0, -0.1).is_err());
    }

    #[test]
    fn aggregate_examples() {
        let one = AccuracyRecord::new(0.8, 0.3, 0.5, 0.4).unwrap();
        assert_eq!(aggregate_seeds(&[one]).unwrap(), one);
        let a = AccuracyRecord::new(0.8, 0.2, 0.4, 0.4).unwrap();
        let b = AccuracyRecord::new(0.8, 0.4, 0.6, 0.6).unwrap();
        let m = aggregate_seeds(&[a, b]).unwrap();
        for (got, want) in m.fields().iter().zip([0.8, 0.3, 0.5, 0.5]) {
            assert!((got - want).abs() < 1e-15);
        }
        assert!(matches!(aggregate_seeds(&[]), Err(Error::Precondition(_))));
    }

    #[test]
    fn aggregate_five_seeds_matches_independent_mean() {
        let rows = [
            [0.91, 0.33, 0.52, 0.47],
            [0.89, 0.35, 0.55, 0.44],
            [0.90, 0.31, 0.50, 0.49],
            [0.92, 0.36, 0.53, 0.45],
            [0.88, 0.30, 0.51, 0.46],
        ];
        let recs: Vec<_> = rows
            .iter()
            .map(|r| AccuracyRecord::new(r[0], r[1], r[2], r[3]).unwrap())
            .collect();
        let got = aggregate_seeds(&recs).unwrap().fields();
        // Column means computed by hand.
        let want = [0.90, 0.33, 0.522, 0.462];
        for (g, w) in got.iter().zip(want) {
            assert!((g - w).abs() < 1e-12, "{g} vs {w}");
        }
    }

    #[test]
    fn sweep_matches_published_dc_row() {
        let lambdas = [0.1, 0.3, 0.5, 0.7, 0.9];
        let want = [11.2, 14.9, 19.1, 24.0, 29.5];
        let got = sweep_weights(0.527, 0.124, &lambdas).unwrap();
        for ((l, lrs), w) in got.iter().zip(want) {
            assert!((lrs - w).abs() <= 0.2, "λ={l}: {lrs} vs {w}");
        }
    }

    #[test]
    fn sweep_flat_only_at_zero() {
        let flat = sweep_weights(0.0, 0.0, &[0.1, 0.5, 0.9]).unwrap();
        assert!(flat.windows(2).all(|w| w[0].1 == w[1].1));
        let x = 0.2;
        let varied = sweep_weights(x, x, &[0.1, 0.5, 0.9]).unwrap();
        assert!(varied.windows(2).all(|w| w[0].1 != w[1].1));
    }

    #[test]
    fn rounding_is_half_away_from_zero() {
        assert_eq!(round1(19.15), 19.2);
        assert_eq!(round1(-1.25), -1.3);
        assert_eq!(round1(-0.04), 0.0);
        assert_eq!(round1(26.349), 26.3);
    }

    #[test]
    fn metric_result_reports_percentage_points() {
        let rec = AccuracyRecord::new(0.847, 0.320, 0.624, 0.500).unwrap();
        let m = MetricResult::compute(&rec, None, MetricWeights::default()).unwrap();
        assert_eq!(round1(m.hlr), 52.7);
        assert_eq!(round1(m.ior), 12.4);
        assert_eq!(round1(m.lrs), 19.1);
        assert!(m.ars.is_none());
    }

    proptest! {
        #[test]
        fn lrs_and_ars_are_bounded(
            a in 0.0..=1.0f64, b in 0.0..=1.0f64, c in 0.0..=1.0f64, d in 0.0..=1.0f64,
            w in 0.0..=1.0f64,
        ) {
            let rec = AccuracyRecord::new(a, b, c, d).unwrap();
            let lrs = compute_lrs(rec.hlr().unwrap(), rec.ior().unwrap(), w).unwrap();
            prop_assert!((0.0..=100.0).contains(&lrs));
            let ars = compute_ars(&AccuracyQuad::new(a, b, c, d).unwrap(), w).unwrap();
            prop_assert!((0.0..=100.0).contains(&ars));
        }

        #[test]
        fn percent_round_trip(f in -1.0..=1.0f64) {
            prop_assert!((from_percent(to_percent(f)) - f).abs() <= 1e-12);
        }

        #[test]
        fn exp_normalize_is_increasing(a in -1.0..1.0f64, step in 1e-6..0.5f64) {
            let b = (a + step).min(1.0);
            prop_assert!(exp_normalize(b).unwrap() > exp_normalize(a).unwrap());
        }
    }
}
