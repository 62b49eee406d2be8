//! Gaussian naive Bayes with a variance floor.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Dataset, Task};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GnbModel {
    /// Class priors [p(0), p(1)] from training frequencies.
    pub priors: [f64; 2],
    /// Per-class per-feature means.
    pub means: [Vec<f64>; 2],
    /// Per-class per-feature variances, floored by the smoothing term.
    pub variances: [Vec<f64>; 2],
    pub var_smoothing: f64,
}

impl GnbModel {
    pub fn n_features(&self) -> usize {
        self.means[0].len()
    }

    /// Unnormalized log posterior per class.
    fn log_posteriors(&self, row: &[f64]) -> [f64; 2] {
        let mut out = [0.0; 2];
        for (class, lp_out) in out.iter_mut().enumerate() {
            let mut lp = self.priors[class].ln();
            for ((v, m), s2) in row.iter().zip(&self.means[class]).zip(&self.variances[class]) {
                lp += -0.5 * (2.0 * std::f64::consts::PI * s2).ln() - (v - m) * (v - m) / (2.0 * s2);
            }
            *lp_out = lp;
        }
        out
    }

    /// Argmax class; ties go to class 0.
    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter()
            .map(|row| {
                let [lp0, lp1] = self.log_posteriors(row);
                f64::from(u8::from(lp1 > lp0))
            })
            .collect()
    }

    /// Normalized positive-class posterior.
    pub fn predict_score(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter()
            .map(|row| {
                let [lp0, lp1] = self.log_posteriors(row);
                // 1 / (1 + e^{lp0 - lp1}) without overflow.
                let diff = lp0 - lp1;
                if diff >= 0.0 {
                    let e = (-diff).exp();
                    e / (1.0 + e)
                } else {
                    1.0 / (1.0 + diff.exp())
                }
            })
            .collect()
    }
}

pub fn fit_gaussian_nb(train: &Dataset, var_smoothing: f64) -> Result<GnbModel> {
    if train.task != Task::Classification {
        return Err(Error::Argument("Gaussian NB needs binary labels".into()));
    }
    let n = train.n();
    if n == 0 {
        return Err(Error::Argument("empty training set".into()));
    }
    let ones = train.y.iter().filter(|&&v| v == 1.0).count();
    if ones == 0 || ones == n {
        return Err(Error::Argument(
            "single-class training labels leave the posterior degenerate".into(),
        ));
    }

    let d = train.d();
    let moments = |rows: Vec<&Vec<f64>>| -> (Vec<f64>, Vec<f64>) {
        let count = rows.len() as f64;
        let mut mean = vec![0.0; d];
        for row in &rows {
            for (m, v) in mean.iter_mut().zip(row.iter()) {
                *m += v;
            }
        }
        for m in mean.iter_mut() {
            *m /= count;
        }
        let mut var = vec![0.0; d];
        for row in &rows {
            for ((s, v), m) in var.iter_mut().zip(row.iter()).zip(&mean) {
                *s += (v - m) * (v - m);
            }
        }
        for s in var.iter_mut() {
            *s /= count;
        }
        (mean, var)
    };

    let class_rows = |class: f64| -> Vec<&Vec<f64>> {
        train
            .x
            .iter()
            .zip(&train.y)
            .filter(|(_, &y)| y == class)
            .map(|(row, _)| row)
            .collect()
    };
    let (mean0, var0) = moments(class_rows(0.0));
    let (mean1, var1) = moments(class_rows(1.0));
    let (_, var_all) = moments(train.x.iter().collect());

    // Floor: var_smoothing times the largest whole-train feature variance,
    // falling back to var_smoothing itself when everything is constant.
    let mut eps = var_smoothing * var_all.iter().cloned().fold(0.0f64, f64::max);
    if eps <= 0.0 {
        eps = var_smoothing;
    }
    let floor = |vars: Vec<f64>| vars.into_iter().map(|v| v.max(eps)).collect();

    Ok(GnbModel {
        priors: [1.0 - ones as f64 / n as f64, ones as f64 / n as f64],
        means: [mean0, mean1],
        variances: [floor(var0), floor(var1)],
        var_smoothing,
    })
}
