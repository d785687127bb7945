//! Class-threshold search over the bounded projection space and
//! confusion-matrix metrics with separability diagnostics.
//!
//! The projection is bounded to [0, 1], so the decision threshold is found
//! by brute force over an even grid: σ(y) ≥ 𝒯 classifies as the positive
//! class. Ratios with zero denominators (empty prediction or class sets)
//! are defined as 0.

use serde::{Deserialize, Serialize};

use crate::error::{DdaError, Result};
use crate::stats::{class_means, class_variances, ProjectedBatch};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    F1,
    Accuracy,
    MIoU,
}

impl std::str::FromStr for Objective {
    type Err = DdaError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "f1" => Ok(Objective::F1),
            "accuracy" => Ok(Objective::Accuracy),
            "miou" => Ok(Objective::MIoU),
            other => Err(DdaError::InvalidInput(format!(
                "unknown objective '{other}' (expected f1|accuracy|miou)"
            ))),
        }
    }
}

impl std::fmt::Display for Objective {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Objective::F1 => write!(f, "f1"),
            Objective::Accuracy => write!(f, "accuracy"),
            Objective::MIoU => write!(f, "miou"),
        }
    }
}

/// A fitted decision threshold and the objective value it achieved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub value: f64,
    pub objective: Objective,
    pub achieved: f64,
}

/// Confusion counts, derived rates, and projected-space separability
/// diagnostics (positive-minus-background mean gap, per-class variances).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SegMetrics {
    pub tp: u64,
    pub tn: u64,
    pub fp: u64,
    pub fn_: u64,
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub iou_0: f64,
    pub iou_1: f64,
    pub miou: f64,
    /// μ_1 − μ_0 over the projections; 0 if a label class is absent.
    pub mu_gap: f64,
    pub var_0: f64,
    pub var_1: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        0.0
    } else {
        num / den
    }
}

/// Metrics for explicit binary predictions. Class 1 is the positive class.
pub fn compute_metrics(predictions: &[bool], labels: &[bool], projections: &[f64]) -> SegMetrics {
    assert_eq!(predictions.len(), labels.len(), "prediction/label mismatch");
    assert_eq!(projections.len(), labels.len(), "projection/label mismatch");
    let (mut tp, mut tn, mut fp, mut fn_) = (0u64, 0u64, 0u64, 0u64);
    for (&p, &l) in predictions.iter().zip(labels) {
        match (p, l) {
            (true, true) => tp += 1,
            (false, false) => tn += 1,
            (true, false) => fp += 1,
            (false, true) => fn_ += 1,
        }
    }
    let (tpf, tnf, fpf, fnf) = (tp as f64, tn as f64, fp as f64, fn_ as f64);
    let n = tpf + tnf + fpf + fnf;
    let precision = ratio(tpf, tpf + fpf);
    let recall = ratio(tpf, tpf + fnf);
    let f1 = ratio(2.0 * precision * recall, precision + recall);
    let iou_1 = ratio(tpf, tpf + fpf + fnf);
    let iou_0 = ratio(tnf, tnf + fpf + fnf);

    let (mu_gap, var_0, var_1) = separability(projections, labels);

    SegMetrics {
        tp,
        tn,
        fp,
        fn_,
        accuracy: ratio(tpf + tnf, n),
        precision,
        recall,
        f1,
        iou_0,
        iou_1,
        miou: (iou_0 + iou_1) / 2.0,
        mu_gap,
        var_0,
        var_1,
    }
}

/// Projected-space diagnostics: (μ_1 − μ_0, s²_0, s²_1); zeros for absent
/// classes.
pub fn separability(projections: &[f64], labels: &[bool]) -> (f64, f64, f64) {
    let batch = match ProjectedBatch::new(projections.to_vec(), labels.to_vec()) {
        Ok(b) => b,
        Err(_) => return (0.0, 0.0, 0.0),
    };
    let means = class_means(&batch);
    let (v0, v1) = class_variances(&batch, means);
    let gap = match (means.0, means.1) {
        (Some(m0), Some(m1)) => m1 - m0,
        _ => 0.0,
    };
    (gap, v0, v1)
}

/// Predictions and metrics at a fixed threshold: σ(y) ≥ 𝒯 is positive.
pub fn metrics_at_threshold(projections: &[f64], labels: &[bool], t: f64) -> SegMetrics {
    let preds: Vec<bool> = projections.iter().map(|&p| p >= t).collect();
    compute_metrics(&preds, labels, projections)
}

fn objective_value(m: &SegMetrics, objective: Objective) -> f64 {
    match objective {
        Objective::F1 => m.f1,
        Objective::Accuracy => m.accuracy,
        Objective::MIoU => m.miou,
    }
}

/// Brute-force search over 𝒯 = k/(grid_steps − 1); returns the smallest 𝒯
/// attaining the maximal objective.
pub fn threshold_search(
    projections: &[f64],
    labels: &[bool],
    objective: Objective,
    grid_steps: usize,
) -> Result<Threshold> {
    if projections.len() != labels.len() {
        return Err(DdaError::DimensionMismatch {
            expected: projections.len(),
            got: labels.len(),
        });
    }
    if grid_steps < 2 {
        return Err(DdaError::InvalidInput("grid_steps must be at least 2".into()));
    }
    if projections.is_empty() {
        return Err(DdaError::InvalidInput("empty projections".into()));
    }
    if let Some(p) = projections.iter().find(|p| !(0.0..=1.0).contains(*p)) {
        return Err(DdaError::InvalidInput(format!(
            "projection {p} outside [0, 1]"
        )));
    }
    let n_pos = labels.iter().filter(|&&l| l).count();
    if n_pos == 0 || n_pos == labels.len() {
        return Err(DdaError::InvalidInput(
            "threshold search needs both classes present".into(),
        ));
    }

    let mut best: Option<(f64, f64)> = None; // (threshold, achieved)
    for k in 0..grid_steps {
        let t = k as f64 / (grid_steps - 1) as f64;
        let m = metrics_at_threshold(projections, labels, t);
        let v = objective_value(&m, objective);
        if best.map_or(true, |(_, bv)| v > bv) {
            best = Some((t, v));
        }
    }
    let (value, achieved) = best.expect("grid is non-empty");
    Ok(Threshold {
        value,
        objective,
        achieved,
    })
}

/// Table-style CSV layout shared by single runs and sweeps.
pub fn csv_header() -> &'static str {
    "method,lambda_p,accuracy,f1,miou,mu_gap,var_0,var_1"
}

pub fn csv_row(method: &str, lambda_p: Option<f64>, m: &SegMetrics) -> String {
    let lp = lambda_p.map_or_else(|| "-".to_string(), |v| format!("{v}"));
    format!(
        "{method},{lp},{:.6},{:.6},{:.6},{:.6},{:.6},{:.6}",
        m.accuracy, m.f1, m.miou, m.mu_gap, m.var_0, m.var_1
    )
}
