//! Differential class statistics over a batch of sigmoid-bounded projections.
//!
//! For a batch of projected values v_k = σ(y_k) in [0, 1] with binary labels
//! m_k, each class i has
//!
//! - mass  |C_i| = number of elements with label i,
//! - mean  μ_i   = Σ_{label=i} v_k / |C_i|,
//! - var   s²_i  = Σ_{label=i} (v_k − μ_i)² / (|C_i| − 1),
//!
//! together with the exact partials ∂μ_i/∂v_k and ∂s²_i/∂v_k needed to
//! backpropagate any loss built from them.
//!
//! Degenerate classes: a class with mass 0 has an undefined mean (`None`) and
//! zero gradient rows; a class with mass 1 has variance 0 (the |C_i| − 1
//! denominator would divide by zero) and a zero variance-gradient row.
//! Callers skip loss terms that touch an undefined mean.
//!
//! All reductions accumulate in element order so identical inputs give
//! bit-identical results.

use crate::error::{DdaError, Result};

/// Projected values paired with binary ground-truth labels.
///
/// Invariants (checked at construction): values in [0, 1], equal lengths,
/// at least one element.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectedBatch {
    values: Vec<f64>,
    labels: Vec<bool>,
}

impl ProjectedBatch {
    pub fn new(values: Vec<f64>, labels: Vec<bool>) -> Result<Self> {
        if values.is_empty() {
            return Err(DdaError::InvalidInput("empty batch".into()));
        }
        if values.len() != labels.len() {
            return Err(DdaError::DimensionMismatch {
                expected: values.len(),
                got: labels.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(DdaError::InvalidInput(format!(
                "projected value {v} outside [0, 1]"
            )));
        }
        Ok(Self { values, labels })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false // non-empty by construction
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn labels(&self) -> &[bool] {
        &self.labels
    }
}

/// Per-class masses, means, variances and their partials w.r.t. each
/// projected value. Index 0 is the background class, 1 the positive class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats {
    pub mass: [f64; 2],
    pub mean: [Option<f64>; 2],
    pub var: [f64; 2],
    /// dmean[i][k] = ∂μ_i/∂v_k = [label_k = i] / |C_i|
    pub dmean: [Vec<f64>; 2],
    /// dvar[i][k] = ∂s²_i/∂v_k = [label_k = i] · 2(v_k − μ_i) / (|C_i| − 1)
    pub dvar: [Vec<f64>; 2],
}

impl ClassStats {
    /// Signed mean gap μ_0 − μ_1, `None` if either class is empty.
    pub fn mean_gap(&self) -> Option<f64> {
        Some(self.mean[0]? - self.mean[1]?)
    }

    pub fn var_sum(&self) -> f64 {
        self.var[0] + self.var[1]
    }
}

/// Counts of (class 0, class 1) elements.
pub fn class_masses(batch: &ProjectedBatch) -> (f64, f64) {
    let mut n = [0.0f64; 2];
    for &m in batch.labels() {
        n[usize::from(m)] += 1.0;
    }
    (n[0], n[1])
}

/// Per-class means of the projected values; `None` for an empty class.
pub fn class_means(batch: &ProjectedBatch) -> (Option<f64>, Option<f64>) {
    let mut sum = [0.0f64; 2];
    let mut n = [0.0f64; 2];
    for (&v, &m) in batch.values().iter().zip(batch.labels()) {
        let i = usize::from(m);
        sum[i] += v;
        n[i] += 1.0;
    }
    let mean = |i: usize| (n[i] >= 1.0).then(|| sum[i] / n[i]);
    (mean(0), mean(1))
}

/// Per-class sample variances (denominator |C_i| − 1); 0 for mass ≤ 1.
///
/// `means` must come from [`class_means`] on the same batch.
pub fn class_variances(batch: &ProjectedBatch, means: (Option<f64>, Option<f64>)) -> (f64, f64) {
    let mu = [means.0, means.1];
    let mut ss = [0.0f64; 2];
    let mut n = [0.0f64; 2];
    for (&v, &m) in batch.values().iter().zip(batch.labels()) {
        let i = usize::from(m);
        if let Some(mu_i) = mu[i] {
            let d = v - mu_i;
            ss[i] += d * d;
        }
        n[i] += 1.0;
    }
    let var = |i: usize| if n[i] > 1.0 { ss[i] / (n[i] - 1.0) } else { 0.0 };
    (var(0), var(1))
}

/// Full statistics plus analytic partials for backpropagation.
pub fn stats_with_gradients(batch: &ProjectedBatch) -> ClassStats {
    let (n0, n1) = class_masses(batch);
    let means = class_means(batch);
    let vars = class_variances(batch, means);
    let n = [n0, n1];
    let mean = [means.0, means.1];
    let var = [vars.0, vars.1];

    let len = batch.len();
    let mut dmean = [vec![0.0; len], vec![0.0; len]];
    let mut dvar = [vec![0.0; len], vec![0.0; len]];
    for (k, (&v, &m)) in batch.values().iter().zip(batch.labels()).enumerate() {
        let i = usize::from(m);
        if n[i] >= 1.0 {
            dmean[i][k] = 1.0 / n[i];
        }
        if n[i] > 1.0 {
            if let Some(mu_i) = mean[i] {
                dvar[i][k] = 2.0 * (v - mu_i) / (n[i] - 1.0);
            }
        }
    }

    ClassStats {
        mass: n,
        mean,
        var,
        dmean,
        dvar,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn batch(values: &[f64], labels: &[u8]) -> ProjectedBatch {
        ProjectedBatch::new(values.to_vec(), labels.iter().map(|&l| l == 1).collect()).unwrap()
    }

    #[test]
    fn masses_count_labels() {
        assert_eq!(class_masses(&batch(&[0.1, 0.2, 0.3], &[0, 1, 1])), (1.0, 2.0));
        assert_eq!(
            class_masses(&batch(&[0.5, 0.5, 0.5, 0.5], &[0, 0, 0, 0])),
            (4.0, 0.0)
        );
        assert_eq!(class_masses(&batch(&[0.9], &[1])), (0.0, 1.0));
    }

    #[test]
    fn empty_batch_rejected() {
        assert!(matches!(
            ProjectedBatch::new(vec![], vec![]),
            Err(DdaError::InvalidInput(_))
        ));
    }

    #[test]
    fn out_of_range_value_rejected() {
        assert!(ProjectedBatch::new(vec![1.2], vec![true]).is_err());
        assert!(ProjectedBatch::new(vec![-0.1], vec![false]).is_err());
        assert!(ProjectedBatch::new(vec![f64::NAN], vec![false]).is_err());
    }

    #[test]
    fn length_mismatch_rejected() {
        assert!(matches!(
            ProjectedBatch::new(vec![0.5, 0.5], vec![true]),
            Err(DdaError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn means_hand_example() {
        let (m0, m1) = class_means(&batch(&[0.2, 0.8, 0.6], &[0, 1, 1]));
        assert!((m0.unwrap() - 0.2).abs() < 1e-15);
        assert!((m1.unwrap() - 0.7).abs() < 1e-15);
    }

    #[test]
    fn means_constant_input() {
        let (m0, m1) = class_means(&batch(&[0.37, 0.37, 0.37], &[0, 1, 0]));
        assert!((m0.unwrap() - 0.37).abs() < 1e-15);
        assert!((m1.unwrap() - 0.37).abs() < 1e-15);
    }

    #[test]
    fn means_empty_class_is_undefined() {
        let (m0, m1) = class_means(&batch(&[0.3, 0.9], &[1, 1]));
        assert_eq!(m0, None);
        assert!((m1.unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn variances_hand_example() {
        let b = batch(&[0.2, 0.8, 0.6], &[0, 1, 1]);
        let means = class_means(&b);
        let (v0, v1) = class_variances(&b, means);
        assert_eq!(v0, 0.0); // mass 1
        assert!((v1 - 0.02).abs() < 1e-15);
    }

    #[test]
    fn variances_zero_spread() {
        let b = batch(&[0.4, 0.4, 0.9], &[1, 1, 0]);
        let (v0, v1) = class_variances(&b, class_means(&b));
        assert_eq!(v0, 0.0);
        assert_eq!(v1, 0.0);
    }

    #[test]
    fn variances_two_point_class() {
        let b = batch(&[0.0, 1.0], &[1, 1]);
        let (v0, v1) = class_variances(&b, class_means(&b));
        assert_eq!(v0, 0.0);
        assert!((v1 - 0.5).abs() < 1e-15);
    }

    #[test]
    fn dmean_uniform_over_class() {
        let s = stats_with_gradients(&batch(&[0.2, 0.8, 0.6], &[0, 1, 1]));
        assert_eq!(s.dmean[1], vec![0.0, 0.5, 0.5]);
        assert_eq!(s.dmean[0], vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn degenerate_class_has_zero_dvar_row() {
        let s = stats_with_gradients(&batch(&[0.2, 0.8, 0.6], &[0, 1, 1]));
        assert!(s.dvar[0].iter().all(|&g| g == 0.0)); // mass-1 class
        let s = stats_with_gradients(&batch(&[0.3, 0.9], &[1, 1]));
        assert!(s.dvar[0].iter().all(|&g| g == 0.0)); // empty class
        assert!(s.dmean[0].iter().all(|&g| g == 0.0));
    }

    /// Central finite differences of class_means / class_variances, the
    /// independent oracle for the analytic partials.
    fn fd_stats(values: &[f64], labels: &[u8], k: usize, h: f64) -> ([f64; 2], [f64; 2]) {
        let eval = |vals: &[f64]| {
            let b = batch(vals, labels);
            let means = class_means(&b);
            let vars = class_variances(&b, means);
            (
                [means.0.unwrap_or(0.0), means.1.unwrap_or(0.0)],
                [vars.0, vars.1],
            )
        };
        let mut plus = values.to_vec();
        plus[k] += h;
        let mut minus = values.to_vec();
        minus[k] -= h;
        let (mp, vp) = eval(&plus);
        let (mm, vm) = eval(&minus);
        (
            [(mp[0] - mm[0]) / (2.0 * h), (mp[1] - mm[1]) / (2.0 * h)],
            [(vp[0] - vm[0]) / (2.0 * h), (vp[1] - vm[1]) / (2.0 * h)],
        )
    }

    fn rel_err(a: f64, b: f64) -> f64 {
        let scale = a.abs().max(b.abs());
        if scale < 1e-8 {
            (a - b).abs()
        } else {
            (a - b).abs() / scale
        }
    }

    #[test]
    fn gradients_match_finite_differences() {
        use rand::Rng;
        let mut rng = crate::rng::rng_from(101);
        for _ in 0..50 {
            let n = rng.gen_range(2..=64);
            // keep values interior so +-h stays inside [0, 1]
            let values: Vec<f64> = (0..n).map(|_| rng.gen_range(0.01..0.99)).collect();
            let labels: Vec<u8> = (0..n).map(|_| u8::from(rng.gen_bool(0.5))).collect();
            let s = stats_with_gradients(&batch(&values, &labels));
            for k in 0..n {
                let (dm, dv) = fd_stats(&values, &labels, k, 1e-6);
                for i in 0..2 {
                    assert!(
                        rel_err(s.dmean[i][k], dm[i]) <= 1e-6,
                        "dmean[{i}][{k}]: analytic {} vs fd {}",
                        s.dmean[i][k],
                        dm[i]
                    );
                    assert!(
                        rel_err(s.dvar[i][k], dv[i]) <= 1e-6,
                        "dvar[{i}][{k}]: analytic {} vs fd {}",
                        s.dvar[i][k],
                        dv[i]
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn masses_sum_to_n(data in proptest::collection::vec((0.0f64..=1.0, any::<bool>()), 1..64)) {
            let (values, labels): (Vec<f64>, Vec<bool>) = data.into_iter().unzip();
            let n = values.len() as f64;
            let b = ProjectedBatch::new(values, labels).unwrap();
            let (n0, n1) = class_masses(&b);
            prop_assert_eq!(n0 + n1, n);
        }

        #[test]
        fn variance_nonnegative_and_dmean_sums_to_one(
            data in proptest::collection::vec((0.0f64..=1.0, any::<bool>()), 1..64)
        ) {
            let (values, labels): (Vec<f64>, Vec<bool>) = data.into_iter().unzip();
            let b = ProjectedBatch::new(values, labels).unwrap();
            let s = stats_with_gradients(&b);
            prop_assert!(s.var[0] >= 0.0 && s.var[1] >= 0.0);
            for i in 0..2 {
                if s.mass[i] >= 1.0 {
                    let sum: f64 = s.dmean[i].iter().sum();
                    prop_assert!((sum - 1.0).abs() < 1e-12);
                }
            }
        }

        #[test]
        fn permutation_invariance(
            data in proptest::collection::vec((0.0f64..=1.0, any::<bool>()), 2..32),
            shift in 0usize..31,
        ) {
            let (values, labels): (Vec<f64>, Vec<bool>) = data.iter().cloned().unzip();
            let rot = shift % values.len();
            let mut pv = values.clone();
            pv.rotate_left(rot);
            let mut pl = labels.clone();
            pl.rotate_left(rot);

            let a = stats_with_gradients(&ProjectedBatch::new(values, labels).unwrap());
            let b = stats_with_gradients(&ProjectedBatch::new(pv, pl).unwrap());
            prop_assert_eq!(a.mass, b.mass);
            for i in 0..2 {
                match (a.mean[i], b.mean[i]) {
                    (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-12),
                    (None, None) => {}
                    _ => prop_assert!(false, "mean definedness changed under permutation"),
                }
                prop_assert!((a.var[i] - b.var[i]).abs() < 1e-12);
                // gradient rows permute with the elements
                let mut da = a.dmean[i].clone();
                da.rotate_left(rot);
                for (x, y) in da.iter().zip(&b.dmean[i]) {
                    prop_assert!((x - y).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn shift_covariance_of_mean() {
        let values = [0.2, 0.3, 0.6, 0.7];
        let labels = [1u8, 1, 0, 0];
        let b0 = batch(&values, &labels);
        let m0 = class_means(&b0);
        let v0 = class_variances(&b0, m0);
        let delta = 0.15;
        let shifted: Vec<f64> = values
            .iter()
            .zip(&labels)
            .map(|(&v, &l)| if l == 1 { v + delta } else { v })
            .collect();
        let b1 = batch(&shifted, &labels);
        let m1 = class_means(&b1);
        let v1 = class_variances(&b1, m1);
        assert!((m1.1.unwrap() - m0.1.unwrap() - delta).abs() < 1e-12);
        assert!((m1.0.unwrap() - m0.0.unwrap()).abs() < 1e-12);
        assert!((v1.1 - v0.1).abs() < 1e-12);
    }
}
