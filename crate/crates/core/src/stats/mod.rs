//! Shared numerical machinery: logistic regression with a seeded
//! train/test split protocol and percentile confidence intervals,
//! proportion-difference intervals, and the group–synset correlation
//! heuristic.

mod correlation;
mod logistic;
mod splits;

pub use correlation::{group_synset_correlation, CooccurrenceTable};
pub use logistic::{train_logistic, LogisticConfig, LogisticModel};
pub use splits::{split_and_estimate, CoefficientCi, SplitOutcome, SplitProtocol};

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One observation: a dense feature vector with a binary label.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub features: Vec<f64>,
    pub label: bool,
    pub image_id: String,
}

impl FeatureRow {
    pub fn validate(&self, expected_len: usize) -> Result<()> {
        if self.features.len() != expected_len {
            return Err(Error::Domain(format!(
                "feature length {} differs from {} (image {})",
                self.features.len(),
                expected_len,
                self.image_id
            )));
        }
        if self.features.iter().any(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "non-finite feature for image {}",
                self.image_id
            )));
        }
        Ok(())
    }
}

/// Difference of two proportions with a symmetric normal-approximation
/// 95% interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProportionCi {
    pub diff: f64,
    pub halfwidth: f64,
    pub n_a: usize,
    pub n_b: usize,
}

/// diff = hits_a/n_a − hits_b/n_b with halfwidth
/// 1.96·sqrt(p_a(1−p_a)/n_a + p_b(1−p_b)/n_b).
pub fn proportion_diff_ci(
    hits_a: usize,
    n_a: usize,
    hits_b: usize,
    n_b: usize,
) -> Result<ProportionCi> {
    if n_a == 0 || n_b == 0 {
        return Err(Error::Domain("proportion over an empty sample".to_string()));
    }
    if hits_a > n_a || hits_b > n_b {
        return Err(Error::Domain(format!(
            "hits exceed sample size: {hits_a}/{n_a}, {hits_b}/{n_b}"
        )));
    }
    let p_a = hits_a as f64 / n_a as f64;
    let p_b = hits_b as f64 / n_b as f64;
    let halfwidth =
        1.96 * (p_a * (1.0 - p_a) / n_a as f64 + p_b * (1.0 - p_b) / n_b as f64).sqrt();
    Ok(ProportionCi {
        diff: p_a - p_b,
        halfwidth,
        n_a,
        n_b,
    })
}

/// Linear-interpolation percentile of a sorted slice (q in [0,1]).
pub fn percentile_of_sorted(sorted: &[f64], q: f64) -> f64 {
    debug_assert!(!sorted.is_empty());
    let idx = q * (sorted.len() - 1) as f64;
    let lo = idx.floor() as usize;
    let hi = idx.ceil() as usize;
    let frac = idx - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn proportion_ci_matches_hand_computation() {
        // degenerate proportions
        let ci = proportion_diff_ci(0, 100, 0, 100).unwrap();
        assert_eq!(ci.diff, 0.0);
        assert_eq!(ci.halfwidth, 0.0);

        // closed form by hand: 1.96*sqrt(.3*.7/100 + .1*.9/100)
        let ci = proportion_diff_ci(30, 100, 10, 100).unwrap();
        assert!((ci.diff - 0.20).abs() < 1e-12);
        let want = 1.96 * (0.3 * 0.7 / 100.0 + 0.1 * 0.9 / 100.0_f64).sqrt();
        assert!((ci.halfwidth - want).abs() < 1e-12);
        assert!((ci.halfwidth - 0.1073).abs() < 5e-4);

        // tiny samples stay finite
        let ci = proportion_diff_ci(1, 2, 0, 1).unwrap();
        assert!(ci.halfwidth.is_finite());

        assert!(proportion_diff_ci(1, 0, 0, 1).is_err());
    }

    #[test]
    fn proportion_ci_is_antisymmetric() {
        let ab = proportion_diff_ci(13, 40, 5, 60).unwrap();
        let ba = proportion_diff_ci(5, 60, 13, 40).unwrap();
        assert!((ab.diff + ba.diff).abs() < 1e-15);
        assert!((ab.halfwidth - ba.halfwidth).abs() < 1e-15);
    }

    #[test]
    fn percentile_interpolates() {
        let v = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(percentile_of_sorted(&v, 0.0), 1.0);
        assert_eq!(percentile_of_sorted(&v, 1.0), 4.0);
        assert!((percentile_of_sorted(&v, 0.5) - 2.5).abs() < 1e-12);
    }
}
