//! L2-regularized logistic regression by full-batch gradient descent with
//! backtracking line search.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Dataset, Task};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LogisticModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub lambda: f64,
    pub n_iterations: usize,
    pub converged: bool,
    /// Objective value after each accepted step, starting at the initial point.
    pub loss_trace: Vec<f64>,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// log(1 + e^z) without overflow.
fn log1p_exp(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

impl LogisticModel {
    fn margin(&self, row: &[f64]) -> f64 {
        self.intercept
            + row
                .iter()
                .zip(&self.weights)
                .map(|(v, w)| v * w)
                .sum::<f64>()
    }

    /// Positive-class probability per row.
    pub fn predict_score(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter().map(|row| sigmoid(self.margin(row))).collect()
    }

    /// Class labels; score >= 0.5 maps to 1.
    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        self.predict_score(x)
            .iter()
            .map(|&s| f64::from(u8::from(s >= 0.5)))
            .collect()
    }
}

/// Objective: mean log-loss + (lambda/2) * ||w||^2, intercept unpenalized.
pub(crate) fn objective(x: &[Vec<f64>], y: &[f64], w: &[f64], b: f64, lambda: f64) -> f64 {
    let n = x.len() as f64;
    let data: f64 = x
        .iter()
        .zip(y)
        .map(|(row, &target)| {
            let z = b + row.iter().zip(w).map(|(v, wi)| v * wi).sum::<f64>();
            log1p_exp(z) - target * z
        })
        .sum::<f64>()
        / n;
    data + 0.5 * lambda * w.iter().map(|wi| wi * wi).sum::<f64>()
}

/// Gradient of the objective, (weights, intercept).
pub(crate) fn gradient(
    x: &[Vec<f64>],
    y: &[f64],
    w: &[f64],
    b: f64,
    lambda: f64,
) -> (Vec<f64>, f64) {
    let n = x.len() as f64;
    let mut gw = vec![0.0; w.len()];
    let mut gb = 0.0;
    for (row, &target) in x.iter().zip(y) {
        let z = b + row.iter().zip(w).map(|(v, wi)| v * wi).sum::<f64>();
        let err = sigmoid(z) - target;
        gb += err;
        for (g, v) in gw.iter_mut().zip(row) {
            *g += err * v;
        }
    }
    for (g, wi) in gw.iter_mut().zip(w) {
        *g = *g / n + lambda * wi;
    }
    (gw, gb / n)
}

pub fn fit_logistic_regression(
    train: &Dataset,
    lambda: f64,
    max_iter: usize,
    tol: f64,
) -> Result<LogisticModel> {
    if train.task != Task::Classification {
        return Err(Error::Argument("logistic regression needs binary labels".into()));
    }
    if train.n() == 0 {
        return Err(Error::Argument("empty training set".into()));
    }
    let ones = train.y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == train.n() {
        return Err(Error::Argument(
            "single-class training labels leave the decision boundary undefined".into(),
        ));
    }

    let d = train.d();
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let mut loss = objective(&train.x, &train.y, &w, b, lambda);
    let mut trace = vec![loss];
    let mut converged = false;
    let mut iterations = 0;

    const ARMIJO_C: f64 = 1e-4;
    for _ in 0..max_iter {
        let (gw, gb) = gradient(&train.x, &train.y, &w, b, lambda);
        let grad_inf = gw
            .iter()
            .chain(std::iter::once(&gb))
            .fold(0.0f64, |acc, g| acc.max(g.abs()));
        if grad_inf < tol {
            converged = true;
            break;
        }
        iterations += 1;

        let grad_sq: f64 = gw.iter().map(|g| g * g).sum::<f64>() + gb * gb;
        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let w_next: Vec<f64> = w.iter().zip(&gw).map(|(wi, g)| wi - step * g).collect();
            let b_next = b - step * gb;
            let next = objective(&train.x, &train.y, &w_next, b_next, lambda);
            if next <= loss - ARMIJO_C * step * grad_sq {
                w = w_next;
                b = b_next;
                loss = next;
                trace.push(loss);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // No acceptable step at machine precision; treat as converged.
            converged = true;
            break;
        }
    }

    Ok(LogisticModel {
        weights: w,
        intercept: b,
        lambda,
        n_iterations: iterations,
        converged,
        loss_trace: trace,
    })
}
