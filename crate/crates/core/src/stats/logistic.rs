//! L2-regularized logistic regression fit by full-batch gradient descent
//! with backtracking line search. Deterministic given data order.

use super::FeatureRow;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy)]
pub struct LogisticConfig {
    /// L2 penalty on the weights (the intercept is not penalized).
    pub l2: f64,
    pub max_iter: usize,
    /// Stop when the gradient norm falls below this.
    pub tol: f64,
}

impl Default for LogisticConfig {
    fn default() -> Self {
        LogisticConfig {
            l2: 1.0,
            max_iter: 5000,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LogisticModel {
    pub fn decision(&self, features: &[f64]) -> f64 {
        self.intercept
            + self
                .weights
                .iter()
                .zip(features)
                .map(|(w, x)| w * x)
                .sum::<f64>()
    }

    pub fn predict(&self, features: &[f64]) -> bool {
        self.decision(features) > 0.0
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z), stable for large |z|.
fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

/// Penalized negative log-likelihood and its gradient over (weights, b).
fn objective(rows: &[FeatureRow], w: &[f64], b: f64, l2: f64) -> (f64, Vec<f64>, f64) {
    let d = w.len();
    let mut nll = 0.0;
    let mut grad_w = vec![0.0; d];
    let mut grad_b = 0.0;
    for row in rows {
        let z = b + w.iter().zip(&row.features).map(|(wi, xi)| wi * xi).sum::<f64>();
        let y = if row.label { 1.0 } else { 0.0 };
        // -[y z - log(1+e^z)]
        nll += log1p_exp(z) - y * z;
        let resid = sigmoid(z) - y;
        for (g, x) in grad_w.iter_mut().zip(&row.features) {
            *g += resid * x;
        }
        grad_b += resid;
    }
    let penalty: f64 = 0.5 * l2 * w.iter().map(|v| v * v).sum::<f64>();
    for (g, wi) in grad_w.iter_mut().zip(w) {
        *g += l2 * wi;
    }
    (nll + penalty, grad_w, grad_b)
}

/// Fits the model. Errors on single-class or non-finite input.
pub fn train_logistic(rows: &[FeatureRow], config: &LogisticConfig) -> Result<LogisticModel> {
    let Some(first) = rows.first() else {
        return Err(Error::Degenerate("no rows to fit".to_string()));
    };
    let d = first.features.len();
    for row in rows {
        row.validate(d)?;
    }
    let positives = rows.iter().filter(|r| r.label).count();
    if positives == 0 || positives == rows.len() {
        return Err(Error::Degenerate(format!(
            "single-class input ({positives} of {} positive)",
            rows.len()
        )));
    }

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let (mut value, mut grad_w, mut grad_b) = objective(rows, &w, b, config.l2);
    for _ in 0..config.max_iter {
        let grad_norm = (grad_w.iter().map(|g| g * g).sum::<f64>() + grad_b * grad_b).sqrt();
        if grad_norm <= config.tol {
            break;
        }
        // Backtracking line search on the steepest-descent direction.
        let mut step = 1.0;
        let dir_dot_grad = -(grad_w.iter().map(|g| g * g).sum::<f64>() + grad_b * grad_b);
        loop {
            let w_new: Vec<f64> = w.iter().zip(&grad_w).map(|(wi, g)| wi - step * g).collect();
            let b_new = b - step * grad_b;
            let (v_new, gw_new, gb_new) = objective(rows, &w_new, b_new, config.l2);
            if v_new <= value + 1e-4 * step * dir_dot_grad {
                w = w_new;
                b = b_new;
                value = v_new;
                grad_w = gw_new;
                grad_b = gb_new;
                break;
            }
            step *= 0.5;
            if step < 1e-12 {
                // no further progress possible at floating-point resolution
                return Ok(LogisticModel { weights: w, intercept: b });
            }
        }
    }
    Ok(LogisticModel { weights: w, intercept: b })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rows_1d(spec: &[(f64, bool, usize)]) -> Vec<FeatureRow> {
        let mut out = Vec::new();
        for (i, (x, y, n)) in spec.iter().enumerate() {
            for j in 0..*n {
                out.push(FeatureRow {
                    features: vec![*x],
                    label: *y,
                    image_id: format!("{i}-{j}"),
                });
            }
        }
        out
    }

    #[test]
    fn separated_data_forces_a_positive_weight() {
        let rows = rows_1d(&[(-1.0, false, 50), (1.0, true, 50)]);
        let model = train_logistic(
            &rows,
            &LogisticConfig {
                l2: 0.1,
                ..LogisticConfig::default()
            },
        )
        .unwrap();
        assert!(model.weights[0] > 0.5, "weight {}", model.weights[0]);
    }

    #[test]
    fn all_zero_feature_column_shrinks_to_zero() {
        let mut rows = rows_1d(&[(-1.0, false, 30), (1.0, true, 30)]);
        for r in &mut rows {
            r.features.push(0.0);
        }
        let model = train_logistic(&rows, &LogisticConfig::default()).unwrap();
        assert!(model.weights[1].abs() <= 1e-8, "weight {}", model.weights[1]);
    }

    #[test]
    fn single_class_and_bad_values_are_rejected() {
        let rows = rows_1d(&[(0.5, true, 20)]);
        assert!(train_logistic(&rows, &LogisticConfig::default()).is_err());

        let mut rows = rows_1d(&[(-1.0, false, 5), (1.0, true, 5)]);
        rows[0].features[0] = f64::NAN;
        assert!(train_logistic(&rows, &LogisticConfig::default()).is_err());
    }

    /// Central finite differences around a random point agree with the
    /// analytic gradient to 1e-5 relative error.
    #[test]
    fn analytic_gradient_matches_finite_differences() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let n = 20;
            let d = 5;
            let rows: Vec<FeatureRow> = (0..n)
                .map(|i| FeatureRow {
                    features: (0..d).map(|_| rng.gen_range(-2.0..2.0)).collect(),
                    label: rng.gen_bool(0.5),
                    image_id: i.to_string(),
                })
                .collect();
            if rows.iter().all(|r| r.label) || rows.iter().all(|r| !r.label) {
                continue;
            }
            let w: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let b: f64 = rng.gen_range(-1.0..1.0);
            let l2 = 0.7;
            let (_, grad_w, grad_b) = objective(&rows, &w, b, l2);

            let h = 1e-6;
            let mut max_rel = 0.0_f64;
            for k in 0..d {
                let mut wp = w.clone();
                let mut wm = w.clone();
                wp[k] += h;
                wm[k] -= h;
                let (vp, _, _) = objective(&rows, &wp, b, l2);
                let (vm, _, _) = objective(&rows, &wm, b, l2);
                let numeric = (vp - vm) / (2.0 * h);
                let rel = (numeric - grad_w[k]).abs() / grad_w[k].abs().max(1.0);
                max_rel = max_rel.max(rel);
            }
            let (vp, _, _) = objective(&rows, &w, b + h, l2);
            let (vm, _, _) = objective(&rows, &w, b - h, l2);
            let numeric = (vp - vm) / (2.0 * h);
            let rel = (numeric - grad_b).abs() / grad_b.abs().max(1.0);
            max_rel = max_rel.max(rel);

            assert!(max_rel <= 1e-5, "max relative error {max_rel}");
        }
    }
}
