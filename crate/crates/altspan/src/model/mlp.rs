//! One-hidden-layer MLP regressor: ReLU, linear output, MSE loss, Adam.
//!
//! Callers are expected to standardize features first; pathological scales
//! are not detected. Weight init is seeded Glorot uniform, mini-batches are
//! reshuffled every epoch, and training stops early once the held-out
//! validation loss stops improving.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::stream;

use super::{Dataset, Task};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpConfig {
    pub hidden: usize,
    pub epochs: usize,
    pub batch: usize,
    pub learning_rate: f64,
    /// Stop after this many epochs without the validation loss improving
    /// by at least `min_delta`.
    pub patience: usize,
    pub min_delta: f64,
    pub validation_fraction: f64,
}

impl Default for MlpConfig {
    fn default() -> Self {
        MlpConfig {
            hidden: 100,
            epochs: 200,
            batch: 32,
            learning_rate: 1e-3,
            patience: 10,
            min_delta: 1e-4,
            validation_fraction: 0.1,
        }
    }
}

/// Network parameters; exposed so gradients can be checked externally.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpNet {
    /// hidden x input weights.
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    /// output weights over hidden units.
    pub w2: Vec<f64>,
    pub b2: f64,
}

#[derive(Debug, Clone)]
pub struct MlpGradients {
    pub w1: Vec<Vec<f64>>,
    pub b1: Vec<f64>,
    pub w2: Vec<f64>,
    pub b2: f64,
}

impl MlpNet {
    /// Glorot-uniform init: U(-sqrt(6/(fan_in+fan_out)), +), biases zero.
    pub fn init(d: usize, hidden: usize, rng: &mut ChaCha8Rng) -> Self {
        let bound1 = (6.0 / (d + hidden) as f64).sqrt();
        let bound2 = (6.0 / (hidden + 1) as f64).sqrt();
        MlpNet {
            w1: (0..hidden)
                .map(|_| (0..d).map(|_| rng.gen_range(-bound1..bound1)).collect())
                .collect(),
            b1: vec![0.0; hidden],
            w2: (0..hidden).map(|_| rng.gen_range(-bound2..bound2)).collect(),
            b2: 0.0,
        }
    }

    pub fn n_inputs(&self) -> usize {
        self.w1.first().map_or(0, Vec::len)
    }

    fn hidden_pre(&self, row: &[f64]) -> Vec<f64> {
        self.w1
            .iter()
            .zip(&self.b1)
            .map(|(weights, bias)| bias + weights.iter().zip(row).map(|(w, v)| w * v).sum::<f64>())
            .collect()
    }

    pub fn predict_one(&self, row: &[f64]) -> f64 {
        let z = self.hidden_pre(row);
        self.b2
            + z.iter()
                .zip(&self.w2)
                .map(|(&zi, w)| w * zi.max(0.0))
                .sum::<f64>()
    }

    /// Mean squared error over a batch.
    pub fn loss(&self, x: &[Vec<f64>], y: &[f64]) -> f64 {
        let n = x.len() as f64;
        x.iter()
            .zip(y)
            .map(|(row, &t)| {
                let e = self.predict_one(row) - t;
                e * e
            })
            .sum::<f64>()
            / n
    }

    /// Analytic batch gradients of the MSE loss.
    pub fn gradients(&self, x: &[Vec<f64>], y: &[f64]) -> MlpGradients {
        let hidden = self.w2.len();
        let d = self.n_inputs();
        let n = x.len() as f64;
        let mut gw1 = vec![vec![0.0; d]; hidden];
        let mut gb1 = vec![0.0; hidden];
        let mut gw2 = vec![0.0; hidden];
        let mut gb2 = 0.0;

        for (row, &target) in x.iter().zip(y) {
            let z = self.hidden_pre(row);
            let a: Vec<f64> = z.iter().map(|&v| v.max(0.0)).collect();
            let out = self.b2 + a.iter().zip(&self.w2).map(|(ai, w)| ai * w).sum::<f64>();
            let dout = 2.0 * (out - target) / n;
            gb2 += dout;
            for j in 0..hidden {
                gw2[j] += dout * a[j];
                if z[j] > 0.0 {
                    let dz = dout * self.w2[j];
                    gb1[j] += dz;
                    for (g, v) in gw1[j].iter_mut().zip(row) {
                        *g += dz * v;
                    }
                }
            }
        }
        MlpGradients {
            w1: gw1,
            b1: gb1,
            w2: gw2,
            b2: gb2,
        }
    }
}

/// Adam moment buffers, one pair per parameter tensor.
struct Adam {
    m_w1: Vec<Vec<f64>>,
    v_w1: Vec<Vec<f64>>,
    m_b1: Vec<f64>,
    v_b1: Vec<f64>,
    m_w2: Vec<f64>,
    v_w2: Vec<f64>,
    m_b2: f64,
    v_b2: f64,
    t: u32,
}

const BETA1: f64 = 0.9;
const BETA2: f64 = 0.999;
const ADAM_EPS: f64 = 1e-8;

impl Adam {
    fn new(hidden: usize, d: usize) -> Self {
        Adam {
            m_w1: vec![vec![0.0; d]; hidden],
            v_w1: vec![vec![0.0; d]; hidden],
            m_b1: vec![0.0; hidden],
            v_b1: vec![0.0; hidden],
            m_w2: vec![0.0; hidden],
            v_w2: vec![0.0; hidden],
            m_b2: 0.0,
            v_b2: 0.0,
            t: 0,
        }
    }

    fn step(&mut self, net: &mut MlpNet, grads: &MlpGradients, lr: f64) {
        self.t += 1;
        let bc1 = 1.0 - BETA1.powi(self.t as i32);
        let bc2 = 1.0 - BETA2.powi(self.t as i32);
        let update = |p: &mut f64, g: f64, m: &mut f64, v: &mut f64| {
            *m = BETA1 * *m + (1.0 - BETA1) * g;
            *v = BETA2 * *v + (1.0 - BETA2) * g * g;
            *p -= lr * (*m / bc1) / ((*v / bc2).sqrt() + ADAM_EPS);
        };
        for j in 0..net.w1.len() {
            for k in 0..net.w1[j].len() {
                update(
                    &mut net.w1[j][k],
                    grads.w1[j][k],
                    &mut self.m_w1[j][k],
                    &mut self.v_w1[j][k],
                );
            }
            update(&mut net.b1[j], grads.b1[j], &mut self.m_b1[j], &mut self.v_b1[j]);
            update(&mut net.w2[j], grads.w2[j], &mut self.m_w2[j], &mut self.v_w2[j]);
        }
        update(&mut net.b2, grads.b2, &mut self.m_b2, &mut self.v_b2);
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MlpModel {
    pub net: MlpNet,
    pub config: MlpConfig,
    /// Target standardization applied during training and inverted at
    /// prediction, so the net always optimizes on unit-scale targets.
    pub target_mean: f64,
    pub target_std: f64,
    /// Per-epoch training loss (standardized target scale).
    pub train_curve: Vec<f64>,
    /// Per-epoch loss on the held-out validation rows.
    pub val_curve: Vec<f64>,
}

impl MlpModel {
    pub fn n_features(&self) -> usize {
        self.net.n_inputs()
    }

    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter()
            .map(|row| self.net.predict_one(row) * self.target_std + self.target_mean)
            .collect()
    }
}

pub fn fit_mlp_regressor(train: &Dataset, config: &MlpConfig, seed: u64) -> Result<MlpModel> {
    if train.task != Task::Regression {
        return Err(Error::Argument("the MLP here is a regressor".into()));
    }
    let n = train.n();
    if n < 2 {
        return Err(Error::Argument("need at least 2 rows to hold out validation".into()));
    }
    if config.hidden == 0 || config.batch == 0 {
        return Err(Error::Argument("hidden units and batch size must be positive".into()));
    }

    // Standardize the target so optimization starts at the right scale.
    let target_mean = train.y.iter().sum::<f64>() / n as f64;
    let target_var = train.y.iter().map(|v| (v - target_mean).powi(2)).sum::<f64>() / n as f64;
    let target_std = if target_var > 0.0 { target_var.sqrt() } else { 1.0 };
    let scaled_y: Vec<f64> = train.y.iter().map(|v| (v - target_mean) / target_std).collect();

    // Held-out validation split.
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut stream(seed, "mlp-val-split", 0));
    let n_val = ((config.validation_fraction * n as f64).floor() as usize).clamp(1, n - 1);
    let (val_idx, fit_idx) = order.split_at(n_val);
    let fit_x: Vec<Vec<f64>> = fit_idx.iter().map(|&i| train.x[i].clone()).collect();
    let fit_y: Vec<f64> = fit_idx.iter().map(|&i| scaled_y[i]).collect();
    let val_x: Vec<Vec<f64>> = val_idx.iter().map(|&i| train.x[i].clone()).collect();
    let val_y: Vec<f64> = val_idx.iter().map(|&i| scaled_y[i]).collect();

    let d = train.d();
    let mut net = MlpNet::init(d, config.hidden, &mut stream(seed, "mlp-init", 0));
    let mut adam = Adam::new(config.hidden, d);

    let mut train_curve = Vec::new();
    let mut val_curve = Vec::new();
    let mut best_val = f64::INFINITY;
    let mut stale_epochs = 0;

    for epoch in 0..config.epochs {
        let mut batch_order: Vec<usize> = (0..fit_x.len()).collect();
        batch_order.shuffle(&mut stream(seed, "mlp-epoch", epoch as u64));
        for chunk in batch_order.chunks(config.batch) {
            let bx: Vec<Vec<f64>> = chunk.iter().map(|&i| fit_x[i].clone()).collect();
            let by: Vec<f64> = chunk.iter().map(|&i| fit_y[i]).collect();
            let grads = net.gradients(&bx, &by);
            adam.step(&mut net, &grads, config.learning_rate);
        }
        train_curve.push(net.loss(&fit_x, &fit_y));
        let val_loss = net.loss(&val_x, &val_y);
        val_curve.push(val_loss);

        if val_loss < best_val - config.min_delta {
            best_val = val_loss;
            stale_epochs = 0;
        } else {
            stale_epochs += 1;
            if stale_epochs >= config.patience {
                break;
            }
        }
    }

    Ok(MlpModel {
        net,
        config: config.clone(),
        target_mean,
        target_std,
        train_curve,
        val_curve,
    })
}
