//! Multiple linear regression by normal equations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Dataset, Task};

/// Diagonal jitter on the Gram matrix; guards rank deficiency without
/// meaningfully biasing well-posed problems.
const RIDGE_JITTER: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearModel {
    pub weights: Vec<f64>,
    pub intercept: f64,
}

impl LinearModel {
    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter()
            .map(|row| {
                self.intercept
                    + row
                        .iter()
                        .zip(&self.weights)
                        .map(|(v, w)| v * w)
                        .sum::<f64>()
            })
            .collect()
    }
}

/// Ordinary least squares with a fitted intercept.
#[allow(clippy::needless_range_loop)] // index loops mirror the matrix math
pub fn fit_linear_regression(train: &Dataset) -> Result<LinearModel> {
    if train.task != Task::Regression {
        return Err(Error::Argument("linear regression needs a regression task".into()));
    }
    if train.n() == 0 {
        return Err(Error::Argument("empty training set".into()));
    }
    let d = train.d();
    let m = d + 1; // augmented with the all-ones column

    // Gram matrix X'ᵀX' and moment vector X'ᵀy, intercept column last.
    let mut gram = vec![vec![0.0; m]; m];
    let mut moment = vec![0.0; m];
    for (row, &target) in train.x.iter().zip(&train.y) {
        let aug = |i: usize| if i < d { row[i] } else { 1.0 };
        for i in 0..m {
            moment[i] += aug(i) * target;
            for j in i..m {
                gram[i][j] += aug(i) * aug(j);
            }
        }
    }
    for i in 0..m {
        for j in 0..i {
            gram[i][j] = gram[j][i];
        }
        gram[i][i] += RIDGE_JITTER;
    }

    let solution = solve(gram, moment)?;
    let (weights, intercept) = solution.split_at(d);
    Ok(LinearModel {
        weights: weights.to_vec(),
        intercept: intercept[0],
    })
}

/// Gaussian elimination with partial pivoting; systems here are tiny (<= 22).
#[allow(clippy::needless_range_loop)]
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Result<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).expect("finite"))
            .expect("non-empty");
        if a[pivot][col].abs() < 1e-300 {
            return Err(Error::Internal("singular normal equations".into()));
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..n {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = b[i];
        for j in i + 1..n {
            acc -= a[i][j] * x[j];
        }
        x[i] = acc / a[i][i];
    }
    Ok(x)
}
