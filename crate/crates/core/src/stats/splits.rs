//! Seeded train/test split protocol: many splits, per-split fits, and a
//! percentile confidence interval for one coefficient of interest.

use super::logistic::{train_logistic, LogisticConfig};
use super::{percentile_of_sorted, FeatureRow};
use crate::error::Result;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitProtocol {
    pub n_splits: usize,
    pub train_fraction: f64,
    /// Below this many usable splits the estimate is not reported.
    pub min_valid_splits: usize,
    pub seed: u64,
}

impl Default for SplitProtocol {
    fn default() -> Self {
        SplitProtocol {
            n_splits: 1000,
            train_fraction: 0.70,
            min_valid_splits: 900,
            seed: 0,
        }
    }
}

/// Mean coefficient with 2.5th/97.5th percentile bounds across splits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientCi {
    pub point: f64,
    pub lower: f64,
    pub upper: f64,
    pub mean_test_accuracy: f64,
    pub n_valid_splits: usize,
}

impl CoefficientCi {
    pub fn excludes_zero(&self) -> bool {
        self.lower > 0.0 || self.upper < 0.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum SplitOutcome {
    /// Too few splits had both classes in training; the caller skips this
    /// object type.
    Insufficient { n_valid_splits: usize },
    Estimated(CoefficientCi),
}

/// Standardize train columns to zero mean and unit variance, applying the
/// train statistics to test. Constant columns are left centered only.
fn standardize(train: &mut [FeatureRow], test: &mut [FeatureRow]) {
    if train.is_empty() {
        return;
    }
    let d = train[0].features.len();
    let n = train.len() as f64;
    for k in 0..d {
        let mean = train.iter().map(|r| r.features[k]).sum::<f64>() / n;
        let var = train
            .iter()
            .map(|r| {
                let c = r.features[k] - mean;
                c * c
            })
            .sum::<f64>()
            / n;
        let std = var.sqrt();
        let denom = if std > 1e-12 { std } else { 1.0 };
        for r in train.iter_mut().chain(test.iter_mut()) {
            r.features[k] = (r.features[k] - mean) / denom;
        }
    }
}

/// Runs the protocol and aggregates the coefficient at
/// `coefficient_index` over all valid splits.
pub fn split_and_estimate(
    rows: &[FeatureRow],
    coefficient_index: usize,
    protocol: &SplitProtocol,
    config: &LogisticConfig,
) -> Result<SplitOutcome> {
    if rows.len() < 10 {
        return Ok(SplitOutcome::Insufficient { n_valid_splits: 0 });
    }
    let n = rows.len();
    let train_n = ((n as f64 * protocol.train_fraction).round() as usize).clamp(1, n - 1);

    let per_split: Vec<Option<(f64, f64)>> = (0..protocol.n_splits)
        .into_par_iter()
        .map(|split| {
            let mut rng = ChaCha8Rng::seed_from_u64(protocol.seed);
            rng.set_stream(split as u64 + 1);
            let mut order: Vec<usize> = (0..n).collect();
            order.shuffle(&mut rng);
            let mut train: Vec<FeatureRow> =
                order[..train_n].iter().map(|i| rows[*i].clone()).collect();
            let mut test: Vec<FeatureRow> =
                order[train_n..].iter().map(|i| rows[*i].clone()).collect();

            let pos = train.iter().filter(|r| r.label).count();
            if pos == 0 || pos == train.len() {
                return None; // training set lacks a class
            }
            standardize(&mut train, &mut test);
            let model = train_logistic(&train, config).ok()?;
            let correct = test.iter().filter(|r| model.predict(&r.features) == r.label).count();
            let accuracy = if test.is_empty() {
                0.0
            } else {
                correct as f64 / test.len() as f64
            };
            Some((model.weights[coefficient_index], accuracy))
        })
        .collect();

    let valid: Vec<(f64, f64)> = per_split.into_iter().flatten().collect();
    if valid.len() < protocol.min_valid_splits {
        return Ok(SplitOutcome::Insufficient {
            n_valid_splits: valid.len(),
        });
    }
    let mut coefs: Vec<f64> = valid.iter().map(|(c, _)| *c).collect();
    coefs.sort_by(f64::total_cmp);
    let point = coefs.iter().sum::<f64>() / coefs.len() as f64;
    let mean_test_accuracy = valid.iter().map(|(_, a)| *a).sum::<f64>() / valid.len() as f64;
    Ok(SplitOutcome::Estimated(CoefficientCi {
        point,
        lower: percentile_of_sorted(&coefs, 0.025),
        upper: percentile_of_sorted(&coefs, 0.975),
        mean_test_accuracy,
        n_valid_splits: valid.len(),
    }))
}
