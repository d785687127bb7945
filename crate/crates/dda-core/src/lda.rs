//! Closed-form two-class linear discriminant analysis.
//!
//! For binary problems the Fisher-optimal direction is w ∝ S_W⁻¹(μ⃗₁ − μ⃗₀)
//! with S_W the pooled within-class scatter, so no eigensolver is needed.
//! The weight vector is unit-normalized and oriented so class-1 projections
//! have the larger mean. A decision threshold is found by the shared grid
//! search after min-max normalizing the raw projections into [0, 1], then
//! mapped back to the projected space.

use serde::{Deserialize, Serialize};

use crate::error::{DdaError, Result};
use crate::eval::{threshold_search, Objective};
use crate::matrix::Matrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearDiscriminant {
    pub weights: Vec<f64>,
    /// Decision cut in the raw projected space: w·x ≥ threshold is class 1.
    pub threshold: f64,
    /// Ridge δ added to a singular scatter matrix, when that was needed.
    pub regularization: Option<f64>,
}

/// Fit w ∝ S_W⁻¹(μ⃗₁ − μ⃗₀). Requires at least two samples per class.
pub fn fit_lda(features: &Matrix, labels: &[bool]) -> Result<LinearDiscriminant> {
    let d = features.cols;
    let n = features.rows;
    if labels.len() != n {
        return Err(DdaError::DimensionMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    if d == 0 {
        return Err(DdaError::InvalidInput("zero feature dimension".into()));
    }
    let n1 = labels.iter().filter(|&&l| l).count();
    let n0 = n - n1;
    if n0 < 2 || n1 < 2 {
        return Err(DdaError::InvalidInput(format!(
            "both classes need at least 2 samples, got {n0} and {n1}"
        )));
    }

    // class means
    let mut mu = [vec![0.0; d], vec![0.0; d]];
    for r in 0..n {
        let c = usize::from(labels[r]);
        for (m, x) in mu[c].iter_mut().zip(features.row(r)) {
            *m += x;
        }
    }
    for (c, count) in [(0usize, n0), (1usize, n1)] {
        for m in mu[c].iter_mut() {
            *m /= count as f64;
        }
    }

    // pooled within-class scatter
    let mut sw = vec![0.0; d * d];
    for r in 0..n {
        let c = usize::from(labels[r]);
        let x = features.row(r);
        for i in 0..d {
            let di = x[i] - mu[c][i];
            for j in 0..d {
                sw[i * d + j] += di * (x[j] - mu[c][j]);
            }
        }
    }

    let diff: Vec<f64> = (0..d).map(|i| mu[1][i] - mu[0][i]).collect();

    let (mut w, regularization) = match solve(&sw, &diff, d) {
        Some(w) => (w, None),
        None => {
            let trace: f64 = (0..d).map(|i| sw[i * d + i]).sum();
            let delta = if trace > 0.0 {
                1e-8 * trace / d as f64
            } else {
                1e-8
            };
            let mut ridged = sw.clone();
            for i in 0..d {
                ridged[i * d + i] += delta;
            }
            let w = solve(&ridged, &diff, d).ok_or_else(|| {
                DdaError::InvalidInput("scatter matrix is singular even after ridging".into())
            })?;
            (w, Some(delta))
        }
    };

    let norm: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0 && norm.is_finite()) {
        return Err(DdaError::InvalidInput(
            "class means coincide; no discriminant direction exists".into(),
        ));
    }
    for v in w.iter_mut() {
        *v /= norm;
    }

    // orient so class-1 projections have the larger mean
    let m1: f64 = dot(&w, &mu[1]);
    let m0: f64 = dot(&w, &mu[0]);
    if m1 < m0 {
        for v in w.iter_mut() {
            *v = -*v;
        }
    }
    let threshold = (dot(&w, &mu[0]) + dot(&w, &mu[1])) / 2.0;

    Ok(LinearDiscriminant {
        weights: w,
        threshold,
        regularization,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gaussian elimination with partial pivoting; `None` on singularity.
fn solve(a: &[f64], b: &[f64], d: usize) -> Option<Vec<f64>> {
    let mut m = a.to_vec();
    let mut rhs = b.to_vec();
    let scale = m.iter().fold(0.0f64, |acc, v| acc.max(v.abs())).max(1.0);
    for col in 0..d {
        let mut pivot = col;
        for r in col + 1..d {
            if m[r * d + col].abs() > m[pivot * d + col].abs() {
                pivot = r;
            }
        }
        if m[pivot * d + col].abs() <= 1e-12 * scale {
            return None;
        }
        if pivot != col {
            for j in 0..d {
                m.swap(col * d + j, pivot * d + j);
            }
            rhs.swap(col, pivot);
        }
        let p = m[col * d + col];
        for r in col + 1..d {
            let f = m[r * d + col] / p;
            if f != 0.0 {
                for j in col..d {
                    m[r * d + j] -= f * m[col * d + j];
                }
                rhs[r] -= f * rhs[col];
            }
        }
    }
    let mut x = vec![0.0; d];
    for col in (0..d).rev() {
        let mut acc = rhs[col];
        for j in col + 1..d {
            acc -= m[col * d + j] * x[j];
        }
        x[col] = acc / m[col * d + col];
    }
    Some(x)
}

/// Project feature rows onto the discriminant direction: y_k = w·x_k.
pub fn project(disc: &LinearDiscriminant, features: &Matrix) -> Result<Vec<f64>> {
    if features.cols != disc.weights.len() {
        return Err(DdaError::DimensionMismatch {
            expected: disc.weights.len(),
            got: features.cols,
        });
    }
    Ok((0..features.rows)
        .map(|r| dot(&disc.weights, features.row(r)))
        .collect())
}

/// Min-max normalize raw projections into [0, 1] for the shared threshold
/// machinery. Constant projections map to 0.5.
pub fn normalize_projections(raw: &[f64]) -> (Vec<f64>, f64, f64) {
    let min = raw.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let max = raw.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b));
    if max > min {
        (
            raw.iter().map(|&v| (v - min) / (max - min)).collect(),
            min,
            max,
        )
    } else {
        (vec![0.5; raw.len()], min, max)
    }
}

/// Fit the decision threshold on (projection, label) pairs via the grid
/// search, storing it back in the raw projected space.
pub fn fit_threshold(
    disc: &mut LinearDiscriminant,
    features: &Matrix,
    labels: &[bool],
    objective: Objective,
    grid_steps: usize,
) -> Result<()> {
    let raw = project(disc, features)?;
    let (normalized, min, max) = normalize_projections(&raw);
    let t = threshold_search(&normalized, labels, objective, grid_steps)?;
    disc.threshold = if max > min {
        min + t.value * (max - min)
    } else {
        min
    };
    Ok(())
}

pub fn predict(disc: &LinearDiscriminant, features: &Matrix) -> Result<Vec<bool>> {
    Ok(project(disc, features)?
        .into_iter()
        .map(|y| y >= disc.threshold)
        .collect())
}

/// Fisher ratio (s²_0 + s²_1) / (μ_0 − μ_1)² of raw projections, the
/// objective value achieved by a fitted discriminant.
pub fn fisher_objective(projections: &[f64], labels: &[bool]) -> Result<f64> {
    let mut sum = [0.0f64; 2];
    let mut count = [0.0f64; 2];
    for (&p, &l) in projections.iter().zip(labels) {
        let c = usize::from(l);
        sum[c] += p;
        count[c] += 1.0;
    }
    if count[0] < 1.0 || count[1] < 1.0 {
        return Err(DdaError::InvalidInput("both classes required".into()));
    }
    let mean = [sum[0] / count[0], sum[1] / count[1]];
    let mut ss = [0.0f64; 2];
    for (&p, &l) in projections.iter().zip(labels) {
        let c = usize::from(l);
        let d = p - mean[c];
        ss[c] += d * d;
    }
    let var = |c: usize| {
        if count[c] > 1.0 {
            ss[c] / (count[c] - 1.0)
        } else {
            0.0
        }
    };
    let gap = mean[0] - mean[1];
    if gap == 0.0 {
        return Err(DdaError::DegenerateSeparation);
    }
    Ok((var(0) + var(1)) / (gap * gap))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    fn gaussian_pair(n_per_class: usize, seed: u64) -> (Matrix, Vec<bool>) {
        let mut rng = crate::rng::rng_from(seed);
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for c in 0..2 {
            for _ in 0..n_per_class {
                let x = normal.sample(&mut rng) + c as f64; // means (0,0) and (1,0)
                let y = normal.sample(&mut rng);
                rows.push(vec![x, y]);
                labels.push(c == 1);
            }
        }
        (Matrix::from_rows(&rows), labels)
    }

    #[test]
    fn identity_scatter_aligns_with_mean_difference() {
        let (x, labels) = gaussian_pair(10_000, 17);
        let disc = fit_lda(&x, &labels).unwrap();
        // angle between w and (1, 0)
        let cos = disc.weights[0] / dot(&disc.weights, &disc.weights).sqrt();
        let angle = cos.abs().min(1.0).acos().to_degrees();
        assert!(angle < 5.0, "angle {angle} deg, w = {:?}", disc.weights);
        // sign convention: class 1 projects higher
        assert!(disc.weights[0] > 0.0);
    }

    #[test]
    fn objective_is_scale_invariant() {
        let (x, labels) = gaussian_pair(500, 19);
        let disc = fit_lda(&x, &labels).unwrap();
        let base = fisher_objective(&project(&disc, &x).unwrap(), &labels).unwrap();
        for c in [0.01, 100.0] {
            let scaled = Matrix::new(x.rows, x.cols, x.data.iter().map(|v| v * c).collect());
            let d2 = fit_lda(&scaled, &labels).unwrap();
            let obj = fisher_objective(&project(&d2, &scaled).unwrap(), &labels).unwrap();
            let rel = (obj - base).abs() / base.abs();
            assert!(rel < 1e-9, "scale {c}: {obj} vs {base} (rel {rel})");
        }
    }

    #[test]
    fn projection_examples() {
        let disc = LinearDiscriminant {
            weights: vec![1.0, 0.0],
            threshold: 0.0,
            regularization: None,
        };
        let x = Matrix::from_rows(&[vec![3.0, 5.0], vec![0.0, 7.0]]);
        let p = project(&disc, &x).unwrap();
        assert_eq!(p, vec![3.0, 0.0]);

        let wrong = Matrix::from_rows(&[vec![1.0, 2.0, 3.0]]);
        assert!(matches!(
            project(&disc, &wrong),
            Err(DdaError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn prediction_invariant_to_positive_rescale() {
        let (x, labels) = gaussian_pair(200, 23);
        let mut disc = fit_lda(&x, &labels).unwrap();
        fit_threshold(&mut disc, &x, &labels, Objective::F1, 256).unwrap();
        let preds = predict(&disc, &x).unwrap();
        let scaled = LinearDiscriminant {
            weights: disc.weights.iter().map(|w| w * 7.5).collect(),
            threshold: disc.threshold * 7.5,
            regularization: None,
        };
        assert_eq!(preds, predict(&scaled, &x).unwrap());
    }

    #[test]
    fn one_class_and_tiny_class_inputs_rejected() {
        let x = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]);
        assert!(fit_lda(&x, &[true, true, true]).is_err());
        assert!(fit_lda(&x, &[false, true, true]).is_err());
    }

    #[test]
    fn singular_scatter_is_ridged_and_reported() {
        // second feature is constant: scatter is singular
        let mut rng = crate::rng::rng_from(29);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| vec![rng.gen_range(-1.0..1.0) + f64::from(i % 2), 3.0])
            .collect();
        let labels: Vec<bool> = (0..40).map(|i| i % 2 == 1).collect();
        let x = Matrix::from_rows(&rows);
        let disc = fit_lda(&x, &labels).unwrap();
        assert!(disc.regularization.is_some());
        assert!(disc.weights.iter().any(|&w| w != 0.0));
    }

    #[test]
    fn threshold_fits_in_raw_space() {
        let (x, labels) = gaussian_pair(500, 37);
        let mut disc = fit_lda(&x, &labels).unwrap();
        fit_threshold(&mut disc, &x, &labels, Objective::Accuracy, 256).unwrap();
        assert!(disc.threshold.is_finite());
        let preds = predict(&disc, &x).unwrap();
        let correct = preds
            .iter()
            .zip(&labels)
            .filter(|(p, l)| p == l)
            .count();
        // one unit of mean separation at unit variance: ~69% is achievable
        assert!(correct as f64 / labels.len() as f64 > 0.6);
    }
}
