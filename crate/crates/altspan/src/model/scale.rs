//! Z-score standardization fitted on training rows only.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub mean: Vec<f64>,
    /// Per-feature standard deviation; zero-variance features keep 0 here and
    /// pass through unscaled (divisor treated as 1).
    pub std: Vec<f64>,
}

pub fn fit_standardizer(x_train: &[Vec<f64>]) -> Result<ScalerParams> {
    let Some(first) = x_train.first() else {
        return Err(Error::Argument("cannot fit a scaler on no rows".into()));
    };
    let d = first.len();
    let n = x_train.len() as f64;
    let mut mean = vec![0.0; d];
    for row in x_train {
        if row.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite feature value".into()));
        }
        for (m, v) in mean.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= n;
    }
    let mut var = vec![0.0; d];
    for row in x_train {
        for ((s, v), m) in var.iter_mut().zip(row).zip(&mean) {
            *s += (v - m) * (v - m);
        }
    }
    let std = var.iter().map(|v| (v / n).sqrt()).collect();
    Ok(ScalerParams { mean, std })
}

pub fn apply_standardizer(params: &ScalerParams, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    x.iter()
        .map(|row| {
            row.iter()
                .zip(&params.mean)
                .zip(&params.std)
                .map(|((v, m), s)| if *s > 0.0 { (v - m) / s } else { v - m })
                .collect()
        })
        .collect()
}
