//! Discriminant-analysis loss family plus focal loss, with analytic gradients.
//!
//! All losses operate on sigmoid-bounded projections v = σ(y) and return the
//! gradient with respect to the raw pre-sigmoid outputs y, chaining through
//! σ'(y) = σ(y)(1 − σ(y)) internally so the network consumes one uniform
//! gradient contract.
//!
//! The family, writing g = μ_0 − μ_1 (signed mean gap) and S = s²_0 + s²_1
//! (within-class variance sum):
//!
//! - `inverse_fisher`  S / g²                      (diagnostic, no gradient)
//! - `product_loss`    g · S
//! - `dda_log`         ln(ε + g) + λ_F ln(ε + S),  ε = 1 + 1e-8
//! - `dda_delta`       g + λ_F S
//! - `focal`           class-weighted, confidence-modulated cross entropy
//! - `pdda`            focal + λ_P · (dda_log | dda_delta)
//!
//! Minimizing g drives the positive class to project above the background
//! regardless of the current mean ordering; the squared gap does not have
//! this property (see [`squared_gap_gradient`]).
//!
//! Degenerate batches containing a single class make the gap undefined, so
//! every DDA-family loss returns value 0 with zero gradient for that batch;
//! focal still applies.

use serde::{Deserialize, Serialize};

use crate::error::{DdaError, Result};
use crate::stats::{stats_with_gradients, ClassStats, ProjectedBatch};

/// Offset keeping both logarithm arguments positive: the signed mean gap
/// lies in [−1, 1] and the variance sum is non-negative.
pub const EPSILON_LOG: f64 = 1.0 + 1e-8;

/// Default clamp applied to σ(y) inside focal logarithms.
pub const EPSILON_PROB: f64 = 1e-12;

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// σ'(y) expressed through the already-computed value v = σ(y).
pub fn sigmoid_prime_from_value(v: f64) -> f64 {
    v * (1.0 - v)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DdaKind {
    Logarithmic,
    Delta,
}

impl std::fmt::Display for DdaKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DdaKind::Logarithmic => write!(f, "logarithmic"),
            DdaKind::Delta => write!(f, "delta"),
        }
    }
}

/// Hyperparameters shared by the loss family.
///
/// `lambda_f` balances the variance term inside a DDA loss; `lambda_p`
/// weights the DDA term when combined with focal loss. Defaults follow the
/// per-kind constructors: delta uses λ_F = 0.4, λ_P = 1.0; logarithmic uses
/// λ_F = 0.9, λ_P = 0.1. Focal defaults are γ = 2, α = 0.25.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossConfig {
    pub lambda_f: f64,
    pub lambda_p: f64,
    pub gamma: f64,
    pub alpha: f64,
    pub epsilon_log: f64,
    pub epsilon_prob: f64,
    pub dda_kind: DdaKind,
}

impl LossConfig {
    pub fn delta() -> Self {
        Self {
            lambda_f: 0.4,
            lambda_p: 1.0,
            gamma: 2.0,
            alpha: 0.25,
            epsilon_log: EPSILON_LOG,
            epsilon_prob: EPSILON_PROB,
            dda_kind: DdaKind::Delta,
        }
    }

    pub fn logarithmic() -> Self {
        Self {
            lambda_f: 0.9,
            lambda_p: 0.1,
            dda_kind: DdaKind::Logarithmic,
            ..Self::delta()
        }
    }

    pub fn for_kind(kind: DdaKind) -> Self {
        match kind {
            DdaKind::Delta => Self::delta(),
            DdaKind::Logarithmic => Self::logarithmic(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.epsilon_log != EPSILON_LOG {
            return Err(DdaError::InvalidInput(format!(
                "epsilon_log must be exactly {EPSILON_LOG}"
            )));
        }
        if !(self.epsilon_prob > 0.0 && self.epsilon_prob <= 1e-6) {
            return Err(DdaError::InvalidInput(
                "epsilon_prob must lie in (0, 1e-6]".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.alpha) {
            return Err(DdaError::InvalidInput("alpha must lie in [0, 1]".into()));
        }
        for (name, v) in [
            ("lambda_f", self.lambda_f),
            ("lambda_p", self.lambda_p),
            ("gamma", self.gamma),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(DdaError::InvalidInput(format!(
                    "{name} must be finite and non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Scalar loss value plus the gradient w.r.t. each raw pre-sigmoid output.
#[derive(Debug, Clone, PartialEq)]
pub struct LossResult {
    pub value: f64,
    pub grad_y: Vec<f64>,
}

impl LossResult {
    fn zeros(n: usize) -> Self {
        Self {
            value: 0.0,
            grad_y: vec![0.0; n],
        }
    }

    pub fn is_finite(&self) -> bool {
        self.value.is_finite() && self.grad_y.iter().all(|g| g.is_finite())
    }
}

/// Within-class variance sum over squared mean gap: S / g². Diagnostic only.
pub fn inverse_fisher(stats: &ClassStats) -> Result<f64> {
    if stats.mass[0] < 1.0 || stats.mass[1] < 1.0 {
        return Err(DdaError::InvalidInput(
            "inverse Fisher criterion needs both classes present".into(),
        ));
    }
    let gap = stats.mean[0].unwrap() - stats.mean[1].unwrap();
    if gap == 0.0 {
        return Err(DdaError::DegenerateSeparation);
    }
    Ok(stats.var_sum() / (gap * gap))
}

/// Gradient of the squared mean gap along one direction:
/// 2 (μ_0 − μ_1)(∇μ_0 − ∇μ_1). Its sign flips with the mean ordering, which
/// is exactly why the squared form destabilizes mini-batch descent.
pub fn squared_gap_gradient(mu0: f64, mu1: f64, dmu0: f64, dmu1: f64) -> f64 {
    2.0 * (mu0 - mu1) * (dmu0 - dmu1)
}

/// Shared assembly: value from (g, S), gradient from per-element partials.
fn dda_family<F>(batch: &ProjectedBatch, f: F) -> LossResult
where
    F: Fn(f64, f64) -> (f64, f64, f64), // (value, dL/dg, dL/dS)
{
    let st = stats_with_gradients(batch);
    let (Some(mu0), Some(mu1)) = (st.mean[0], st.mean[1]) else {
        // single-class batch: skip the term entirely
        return LossResult::zeros(batch.len());
    };
    let g = mu0 - mu1;
    let s = st.var_sum();
    let (value, c_gap, c_var) = f(g, s);
    let grad_y = batch
        .values()
        .iter()
        .enumerate()
        .map(|(k, &v)| {
            let dl_dv = c_gap * (st.dmean[0][k] - st.dmean[1][k])
                + c_var * (st.dvar[0][k] + st.dvar[1][k]);
            dl_dv * sigmoid_prime_from_value(v)
        })
        .collect();
    LossResult { value, grad_y }
}

/// Product form g · S: the un-squared gap times the variance sum.
pub fn product_loss(batch: &ProjectedBatch, _cfg: &LossConfig) -> LossResult {
    dda_family(batch, |g, s| (g * s, s, g))
}

/// Logarithmic loss ln(ε + g) + λ_F ln(ε + S).
pub fn dda_log(batch: &ProjectedBatch, cfg: &LossConfig) -> LossResult {
    let (eps, lf) = (cfg.epsilon_log, cfg.lambda_f);
    dda_family(batch, |g, s| {
        (
            (eps + g).ln() + lf * (eps + s).ln(),
            1.0 / (eps + g),
            lf / (eps + s),
        )
    })
}

/// Delta loss g + λ_F S.
pub fn dda_delta(batch: &ProjectedBatch, cfg: &LossConfig) -> LossResult {
    let lf = cfg.lambda_f;
    dda_family(batch, |g, s| (g + lf * s, 1.0, lf))
}

/// Dispatch on the configured DDA kind.
pub fn dda(batch: &ProjectedBatch, cfg: &LossConfig) -> LossResult {
    match cfg.dda_kind {
        DdaKind::Logarithmic => dda_log(batch, cfg),
        DdaKind::Delta => dda_delta(batch, cfg),
    }
}

/// Focal loss over raw outputs, averaged over the batch so the combination
/// weight λ_P is batch-size independent:
///
/// −mean_k [ α (1−p)^γ m ln p + (1−α) p^γ (1−m) ln(1−p) ],  p = σ(y)
///
/// σ(y) is clamped to [ε_prob, 1−ε_prob] before entering the logarithms and
/// the gradient is taken at the clamped value, chained through the true σ'.
pub fn focal(raw: &[f64], labels: &[bool], cfg: &LossConfig) -> LossResult {
    assert_eq!(raw.len(), labels.len(), "raw outputs and labels must align");
    assert!(!raw.is_empty(), "focal loss needs a non-empty batch");
    let n = raw.len() as f64;
    let mut value = 0.0;
    let mut grad_y = Vec::with_capacity(raw.len());
    for (&y, &m) in raw.iter().zip(labels) {
        let p_true = sigmoid(y);
        let p = p_true.clamp(cfg.epsilon_prob, 1.0 - cfg.epsilon_prob);
        let (l, dl_dp) = if m {
            let w = (1.0 - p).powf(cfg.gamma);
            let mut d = -cfg.alpha * w / p;
            if cfg.gamma > 0.0 {
                d += cfg.alpha * cfg.gamma * (1.0 - p).powf(cfg.gamma - 1.0) * p.ln();
            }
            (-cfg.alpha * w * p.ln(), d)
        } else {
            let w = p.powf(cfg.gamma);
            let mut d = (1.0 - cfg.alpha) * w / (1.0 - p);
            if cfg.gamma > 0.0 {
                d -= (1.0 - cfg.alpha) * cfg.gamma * p.powf(cfg.gamma - 1.0) * (1.0 - p).ln();
            }
            (-(1.0 - cfg.alpha) * w * (1.0 - p).ln(), d)
        };
        value += l;
        grad_y.push(dl_dp * sigmoid_prime_from_value(p_true) / n);
    }
    LossResult {
        value: value / n,
        grad_y,
    }
}

/// Probabilistic DDA: focal + λ_P · DDA (kind selected by the config).
pub fn pdda(raw: &[f64], labels: &[bool], cfg: &LossConfig) -> LossResult {
    let f = focal(raw, labels, cfg);
    let values: Vec<f64> = raw.iter().map(|&y| sigmoid(y)).collect();
    let batch = ProjectedBatch::new(values, labels.to_vec())
        .expect("sigmoid outputs always form a valid batch");
    let d = dda(&batch, cfg);
    LossResult {
        value: f.value + cfg.lambda_p * d.value,
        grad_y: f
            .grad_y
            .iter()
            .zip(&d.grad_y)
            .map(|(a, b)| a + cfg.lambda_p * b)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stats::stats_with_gradients;
    use rand::Rng;

    /// Batch realizing μ = (0.2, 0.8), s² = (0.01, 0.02) exactly.
    fn reference_batch() -> ProjectedBatch {
        let d = 0.005f64.sqrt();
        ProjectedBatch::new(
            vec![0.2 - d, 0.2 + d, 0.7, 0.9],
            vec![false, false, true, true],
        )
        .unwrap()
    }

    fn random_batch(rng: &mut impl Rng, n: usize) -> ProjectedBatch {
        let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..=1.0)).collect();
        let mut labels: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
        // force both classes present
        labels[0] = false;
        labels[n - 1] = true;
        ProjectedBatch::new(values, labels).unwrap()
    }

    #[test]
    fn inverse_fisher_hand_value() {
        let st = stats_with_gradients(&reference_batch());
        let v = inverse_fisher(&st).unwrap();
        assert!((v - 0.03 / 0.36).abs() < 1e-12);
    }

    #[test]
    fn inverse_fisher_perfect_separation_is_zero() {
        let b = ProjectedBatch::new(vec![0.0, 0.0, 1.0, 1.0], vec![false, false, true, true])
            .unwrap();
        let st = stats_with_gradients(&b);
        assert_eq!(inverse_fisher(&st).unwrap(), 0.0);
    }

    #[test]
    fn inverse_fisher_equal_means_errors() {
        let b = ProjectedBatch::new(vec![0.5, 0.5], vec![false, true]).unwrap();
        let st = stats_with_gradients(&b);
        assert!(matches!(
            inverse_fisher(&st),
            Err(DdaError::DegenerateSeparation)
        ));
    }

    #[test]
    fn squared_gap_gradient_sign_flips_with_ordering() {
        let below = squared_gap_gradient(0.3, 0.7, 1.0, 0.0);
        let above = squared_gap_gradient(0.7, 0.3, 1.0, 0.0);
        assert!((below + 0.8).abs() < 1e-15);
        assert!((above - 0.8).abs() < 1e-15);
        assert!(below < 0.0 && above > 0.0);
        assert_eq!(squared_gap_gradient(0.5, 0.5, 1.0, 0.0), 0.0);
    }

    #[test]
    fn signed_gap_gradient_is_ordering_independent() {
        // d(mu0 - mu1)/d(direction) = dmu0 - dmu1, independent of the means
        let d_below = 1.0 - 0.0;
        let d_above = 1.0 - 0.0;
        assert_eq!(d_below, d_above);
    }

    #[test]
    fn product_loss_hand_value() {
        let r = product_loss(&reference_batch(), &LossConfig::delta());
        assert!((r.value + 0.018).abs() < 1e-12);
    }

    #[test]
    fn product_loss_zero_variances_annihilate() {
        let b = ProjectedBatch::new(vec![0.1, 0.1, 0.9, 0.9], vec![false, false, true, true])
            .unwrap();
        let r = product_loss(&b, &LossConfig::delta());
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn dda_log_boundary_cases() {
        let cfg = LossConfig::logarithmic();
        let perfect =
            ProjectedBatch::new(vec![0.0, 0.0, 1.0, 1.0], vec![false, false, true, true]).unwrap();
        let r = dda_log(&perfect, &cfg);
        assert!((r.value - 1e-8f64.ln()).abs() < 1e-4, "got {}", r.value);

        let flat =
            ProjectedBatch::new(vec![0.5, 0.5, 0.5, 0.5], vec![false, false, true, true]).unwrap();
        let r = dda_log(&flat, &cfg);
        assert!(r.value.abs() < 1e-7);
    }

    #[test]
    fn dda_log_hand_value() {
        let cfg = LossConfig::logarithmic(); // lambda_f = 0.9
        let r = dda_log(&reference_batch(), &cfg);
        assert!((r.value + 0.8896878).abs() < 1e-6, "got {}", r.value);
    }

    #[test]
    fn dda_delta_hand_values() {
        let sym = ProjectedBatch::new(vec![0.5, 0.5], vec![false, true]).unwrap();
        assert_eq!(dda_delta(&sym, &LossConfig::delta()).value, 0.0);

        let r = dda_delta(&reference_batch(), &LossConfig::delta()); // lambda_f = 0.4
        assert!((r.value + 0.588).abs() < 1e-12);

        let best =
            ProjectedBatch::new(vec![0.0, 0.0, 1.0, 1.0], vec![false, false, true, true]).unwrap();
        assert_eq!(dda_delta(&best, &LossConfig::delta()).value, -1.0);
    }

    #[test]
    fn dda_delta_bounded_below_and_finite() {
        let mut rng = crate::rng::rng_from(7);
        let cfg = LossConfig::delta();
        for _ in 0..500 {
            let n = rng.gen_range(2..=64);
            let r = dda_delta(&random_batch(&mut rng, n), &cfg);
            assert!(r.value >= -1.0 && r.is_finite());
        }
    }

    #[test]
    fn single_class_batch_skips_dda_terms() {
        let b = ProjectedBatch::new(vec![0.2, 0.4], vec![true, true]).unwrap();
        let cfg = LossConfig::delta();
        for r in [
            dda_delta(&b, &cfg),
            dda_log(&b, &cfg),
            product_loss(&b, &cfg),
        ] {
            assert_eq!(r.value, 0.0);
            assert!(r.grad_y.iter().all(|&g| g == 0.0));
        }
    }

    #[test]
    fn gap_partial_for_positive_elements() {
        // d(mu0 - mu1)/dv_k = -1/|C1| for label-1 elements
        let b = ProjectedBatch::new(
            vec![0.1, 0.6, 0.7, 0.8],
            vec![false, true, true, true],
        )
        .unwrap();
        let st = stats_with_gradients(&b);
        for k in 1..4 {
            let d = st.dmean[0][k] - st.dmean[1][k];
            assert!((d + 1.0 / 3.0).abs() < 1e-15);
            assert!(d < 0.0);
        }
    }

    #[test]
    fn focal_confident_correct_vanishes() {
        let cfg = LossConfig::delta();
        let r = focal(&[30.0], &[true], &cfg);
        assert!(r.value.abs() < 1e-10);
    }

    #[test]
    fn focal_hand_value() {
        let cfg = LossConfig::delta(); // gamma = 2, alpha = 0.25
        let r = focal(&[0.0], &[true], &cfg);
        let expected = 0.25 * 0.25 * 2f64.ln();
        assert!((r.value - expected).abs() < 1e-12, "got {}", r.value);
    }

    /// Independent plain cross-entropy used as the oracle for the γ = 0 case.
    fn bce(raw: &[f64], labels: &[bool]) -> (f64, Vec<f64>) {
        let n = raw.len() as f64;
        let mut total = 0.0;
        let mut grad = Vec::new();
        for (&y, &m) in raw.iter().zip(labels) {
            let p = sigmoid(y);
            total += if m { -p.ln() } else { -(1.0 - p).ln() };
            grad.push((p - f64::from(u8::from(m))) / n);
        }
        (total / n, grad)
    }

    #[test]
    fn focal_gamma_zero_is_half_cross_entropy() {
        let cfg = LossConfig {
            gamma: 0.0,
            alpha: 0.5,
            ..LossConfig::delta()
        };
        let raw = [-2.0, -0.5, 0.3, 1.7, 0.0];
        let labels = [false, true, true, false, true];
        let r = focal(&raw, &labels, &cfg);
        let (ce, ce_grad) = bce(&raw, &labels);
        assert!((r.value - 0.5 * ce).abs() < 1e-12);
        for (g, cg) in r.grad_y.iter().zip(&ce_grad) {
            assert!((g - 0.5 * cg).abs() < 1e-12);
        }
    }

    #[test]
    fn pdda_collapses_to_focal_at_zero_weight() {
        let cfg = LossConfig {
            lambda_p: 0.0,
            ..LossConfig::delta()
        };
        let raw = [-1.0, 0.2, 0.9, -0.3];
        let labels = [false, true, true, false];
        let p = pdda(&raw, &labels, &cfg);
        let f = focal(&raw, &labels, &cfg);
        assert_eq!(p.value, f.value);
        assert_eq!(p.grad_y, f.grad_y);
    }

    #[test]
    fn pdda_is_additive() {
        let cfg = LossConfig {
            lambda_p: 1.0,
            ..LossConfig::delta()
        };
        let raw = [-1.0, 0.2, 0.9, -0.3];
        let labels = [false, true, true, false];
        let p = pdda(&raw, &labels, &cfg);
        let f = focal(&raw, &labels, &cfg);
        let values: Vec<f64> = raw.iter().map(|&y| sigmoid(y)).collect();
        let b = ProjectedBatch::new(values, labels.to_vec()).unwrap();
        let d = dda_delta(&b, &cfg);
        assert!((p.value - (f.value + d.value)).abs() < 1e-12);
    }

    /// The spec of the two DDA kinds suggests 10 · delta ≈ log over typical
    /// batches; record the observed ratio distribution without asserting a
    /// tolerance.
    #[test]
    fn delta_vs_log_ratio_survey() {
        let mut rng = crate::rng::rng_from(55);
        let delta_cfg = LossConfig::delta();
        let log_cfg = LossConfig::logarithmic();
        let mut rel = Vec::new();
        for _ in 0..1000 {
            let n = rng.gen_range(4..=64);
            let b = random_batch(&mut rng, n);
            let d = dda_delta(&b, &delta_cfg).value;
            let l = dda_log(&b, &log_cfg).value;
            assert!(d.is_finite() && l.is_finite());
            if l.abs() > 1e-6 {
                rel.push((10.0 * d - l).abs() / l.abs());
            }
        }
        rel.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q = |p: f64| rel[((rel.len() - 1) as f64 * p) as usize];
        println!(
            "|10*delta - log| / |log| over {} random batches: min {:.3} median {:.3} p90 {:.3} max {:.3}",
            rel.len(),
            q(0.0),
            q(0.5),
            q(0.9),
            q(1.0)
        );
    }

    #[test]
    fn config_validation() {
        assert!(LossConfig::delta().validate().is_ok());
        assert!(LossConfig::logarithmic().validate().is_ok());
        let mut bad = LossConfig::delta();
        bad.epsilon_log = 1.0;
        assert!(bad.validate().is_err());
        let mut bad = LossConfig::delta();
        bad.alpha = 1.5;
        assert!(bad.validate().is_err());
        let mut bad = LossConfig::delta();
        bad.epsilon_prob = 1e-3;
        assert!(bad.validate().is_err());
    }
}
