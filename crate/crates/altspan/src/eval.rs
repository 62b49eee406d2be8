//! Model evaluation: regression errors, confusion-based classification
//! metrics with support-weighted averages, ROC curves with trapezoid AUC,
//! and Gini feature importance with top-k extraction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{ModelFamily, TrainedModel};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionMetrics {
    pub mae: f64,
    pub rmse: f64,
    /// `None` when the target has zero variance and residuals are nonzero;
    /// reported as "undefined" instead of a spurious number.
    pub r_squared: Option<f64>,
}

pub fn regression_metrics(y: &[f64], pred: &[f64]) -> Result<RegressionMetrics> {
    if y.is_empty() || y.len() != pred.len() {
        return Err(Error::Argument(format!(
            "metric inputs must be equal-length and non-empty ({} vs {})",
            y.len(),
            pred.len()
        )));
    }
    let n = y.len() as f64;
    let mae = y.iter().zip(pred).map(|(a, b)| (a - b).abs()).sum::<f64>() / n;
    let ss_res: f64 = y.iter().zip(pred).map(|(a, b)| (a - b) * (a - b)).sum();
    let rmse = (ss_res / n).sqrt();
    let mean = y.iter().sum::<f64>() / n;
    let ss_tot: f64 = y.iter().map(|v| (v - mean) * (v - mean)).sum();
    let r_squared = if ss_tot > 0.0 {
        Some(1.0 - ss_res / ss_tot)
    } else if ss_res == 0.0 {
        Some(1.0)
    } else {
        None
    };
    Ok(RegressionMetrics { mae, rmse, r_squared })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationMetrics {
    pub accuracy: f64,
    /// Per-class precision/recall/F1, indexed by class 0 and 1.
    pub precision: [f64; 2],
    pub recall: [f64; 2],
    pub f1: [f64; 2],
    pub weighted_precision: f64,
    pub weighted_recall: f64,
    pub weighted_f1: f64,
    /// Confusion counts [tn, fp, fn, tp].
    pub confusion: [u64; 4],
}

pub fn classification_metrics(y: &[f64], pred: &[f64]) -> Result<ClassificationMetrics> {
    if y.is_empty() || y.len() != pred.len() {
        return Err(Error::Argument(format!(
            "metric inputs must be equal-length and non-empty ({} vs {})",
            y.len(),
            pred.len()
        )));
    }
    if y.iter().chain(pred).any(|&v| v != 0.0 && v != 1.0) {
        return Err(Error::Argument("labels and predictions must be 0 or 1".into()));
    }
    let mut tn = 0u64;
    let mut fp = 0u64;
    let mut fn_ = 0u64;
    let mut tp = 0u64;
    for (&t, &p) in y.iter().zip(pred) {
        match (t == 1.0, p == 1.0) {
            (false, false) => tn += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (true, true) => tp += 1,
        }
    }
    let n = y.len() as f64;
    // Precision with no predicted positives is defined as 0.
    let ratio = |num: u64, den: u64| if den > 0 { num as f64 / den as f64 } else { 0.0 };
    let precision = [ratio(tn, tn + fn_), ratio(tp, tp + fp)];
    let recall = [ratio(tn, tn + fp), ratio(tp, tp + fn_)];
    let f1_of = |p: f64, r: f64| if p + r > 0.0 { 2.0 * p * r / (p + r) } else { 0.0 };
    let f1 = [f1_of(precision[0], recall[0]), f1_of(precision[1], recall[1])];
    let support = [(tn + fp) as f64, (tp + fn_) as f64];
    let weighted = |v: [f64; 2]| (v[0] * support[0] + v[1] * support[1]) / n;

    Ok(ClassificationMetrics {
        accuracy: (tp + tn) as f64 / n,
        precision,
        recall,
        f1,
        weighted_precision: weighted(precision),
        weighted_recall: weighted(recall),
        weighted_f1: weighted(f1),
        confusion: [tn, fp, fn_, tp],
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    /// (false-positive rate, true-positive rate), from (0,0) to (1,1).
    pub points: Vec<(f64, f64)>,
    pub auc: f64,
}

/// Threshold sweep over distinct scores, descending; tied scores collapse to
/// one point, AUC by the trapezoid rule.
pub fn roc_auc(y: &[f64], scores: &[f64]) -> Result<RocCurve> {
    if y.is_empty() || y.len() != scores.len() {
        return Err(Error::Argument("labels and scores must be equal-length".into()));
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::Validation("non-finite score".into()));
    }
    let positives = y.iter().filter(|&&t| t == 1.0).count();
    let negatives = y.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::Argument("ROC needs both classes present".into()));
    }

    let mut order: Vec<usize> = (0..y.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]));

    let mut points = vec![(0.0, 0.0)];
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut i = 0;
    while i < order.len() {
        let score = scores[order[i]];
        // Consume the whole tie group before emitting a point.
        while i < order.len() && scores[order[i]] == score {
            if y[order[i]] == 1.0 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push((fp as f64 / negatives as f64, tp as f64 / positives as f64));
    }

    let auc = points
        .windows(2)
        .map(|w| (w[1].0 - w[0].0) * (w[1].1 + w[0].1) / 2.0)
        .sum();
    Ok(RocCurve { points, auc })
}

/// Normalized per-feature importance from a tree-family model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceVector {
    pub weights: Vec<f64>,
    pub source: ModelFamily,
    /// True when no tree made a split and the vector was defined as uniform.
    pub uniform_fallback: bool,
}

/// Mean impurity-decrease attribution, normalized to sum to one.
///
/// Each split contributes (node sample fraction) x (impurity decrease) to its
/// feature; per-tree vectors are normalized, forests average them. A model
/// with no splits anywhere yields the uniform vector, flagged as such.
pub fn gini_importance(model: &TrainedModel) -> Result<ImportanceVector> {
    let tree_vector = |tree: &crate::model::TreeModel| -> (Vec<f64>, bool) {
        let mut weights = vec![0.0; tree.n_features];
        for (feature, contribution) in tree.split_contributions() {
            weights[feature] += contribution;
        }
        normalize_or_uniform(weights)
    };

    let (weights, uniform_fallback) = match model {
        TrainedModel::Tree(tree) => tree_vector(tree),
        TrainedModel::Forest(forest) => {
            let mut acc = vec![0.0; forest.n_features];
            let mut all_splitless = true;
            for tree in &forest.trees {
                let (w, splitless) = tree_vector(tree);
                all_splitless &= splitless;
                for (a, wi) in acc.iter_mut().zip(w) {
                    *a += wi;
                }
            }
            let n = forest.trees.len() as f64;
            for a in acc.iter_mut() {
                *a /= n;
            }
            let (w, _) = normalize_or_uniform(acc);
            (w, all_splitless)
        }
        other => {
            return Err(Error::Argument(format!(
                "Gini importance is defined for tree-family models, not {:?}",
                other.family()
            )))
        }
    };
    Ok(ImportanceVector {
        weights,
        source: model.family(),
        uniform_fallback,
    })
}

fn normalize_or_uniform(mut weights: Vec<f64>) -> (Vec<f64>, bool) {
    let total: f64 = weights.iter().sum();
    if total > 0.0 {
        for w in weights.iter_mut() {
            *w /= total;
        }
        (weights, false)
    } else {
        let u = 1.0 / weights.len() as f64;
        weights.fill(u);
        (weights, true)
    }
}

/// Top-k (feature index, weight) pairs, descending; ties keep canonical
/// feature order. k is clamped to the vector length.
pub fn top_k_features(importance: &ImportanceVector, k: usize) -> Vec<(usize, f64)> {
    let mut order: Vec<usize> = (0..importance.weights.len()).collect();
    order.sort_by(|&a, &b| {
        importance.weights[b]
            .total_cmp(&importance.weights[a])
            .then(a.cmp(&b))
    });
    order
        .into_iter()
        .take(k.min(importance.weights.len()))
        .map(|i| (i, importance.weights[i]))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{fit_with_params, Dataset, ModelParams, Task};
    use crate::platform::N_PLATFORMS;
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn perfect_and_baseline_regression() {
        let y = [3.0, 1.0, 4.0, 1.5];
        let m = regression_metrics(&y, &y).unwrap();
        assert_eq!((m.mae, m.rmse, m.r_squared), (0.0, 0.0, Some(1.0)));

        let mean = y.iter().sum::<f64>() / 4.0;
        let m = regression_metrics(&y, &[mean; 4]).unwrap();
        assert!(m.r_squared.unwrap().abs() < 1e-12);
    }

    #[test]
    fn hand_computed_regression_case() {
        // y=[0,2,4], pred=[1,2,3]: mae = 2/3, rmse = sqrt(2/3), r2 = 1 - 2/8.
        let m = regression_metrics(&[0.0, 2.0, 4.0], &[1.0, 2.0, 3.0]).unwrap();
        assert!((m.mae - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.rmse - (2.0f64 / 3.0).sqrt()).abs() < 1e-12);
        assert!((m.r_squared.unwrap() - 0.75).abs() < 1e-12);
    }

    #[test]
    fn constant_target_with_errors_is_undefined() {
        let m = regression_metrics(&[5.0, 5.0, 5.0], &[5.0, 6.0, 5.0]).unwrap();
        assert_eq!(m.r_squared, None);
        assert!(regression_metrics(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn regression_metrics_permutation_invariant() {
        let y = [1.0, 5.0, 2.0, 8.0, 3.0];
        let p = [1.5, 4.0, 2.5, 9.0, 2.0];
        let a = regression_metrics(&y, &p).unwrap();
        let perm = [3usize, 0, 4, 1, 2];
        let yp: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
        let pp: Vec<f64> = perm.iter().map(|&i| p[i]).collect();
        let b = regression_metrics(&yp, &pp).unwrap();
        assert!((a.mae - b.mae).abs() < 1e-12);
        assert!((a.rmse - b.rmse).abs() < 1e-12);
        assert!((a.r_squared.unwrap() - b.r_squared.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn confusion_table_hand_case() {
        // y=[1,1,1,0], pred=[1,0,1,0]
        let m = classification_metrics(&[1.0, 1.0, 1.0, 0.0], &[1.0, 0.0, 1.0, 0.0]).unwrap();
        assert_eq!(m.accuracy, 0.75);
        assert_eq!(m.precision[1], 1.0);
        assert!((m.recall[1] - 2.0 / 3.0).abs() < 1e-12);
        assert!((m.f1[1] - 0.8).abs() < 1e-12);
        assert_eq!(m.precision[0], 0.5);
        assert_eq!(m.recall[0], 1.0);
        assert!((m.f1[0] - 2.0 / 3.0).abs() < 1e-12);
        let expected_wf1 = (3.0 * 0.8 + 1.0 * (2.0 / 3.0)) / 4.0;
        assert!((m.weighted_f1 - expected_wf1).abs() < 1e-12);
    }

    #[test]
    fn degenerate_support_and_zero_precision() {
        let m = classification_metrics(&[1.0, 1.0, 1.0], &[1.0, 1.0, 1.0]).unwrap();
        assert_eq!(m.accuracy, 1.0);
        assert_eq!(m.weighted_f1, 1.0); // class 0 has weight 0
        // No predicted positives: precision for class 1 is 0 by convention.
        let m = classification_metrics(&[1.0, 0.0], &[0.0, 0.0]).unwrap();
        assert_eq!(m.precision[1], 0.0);
        assert_eq!(m.f1[1], 0.0);
    }

    #[test]
    fn weighted_recall_equals_accuracy() {
        let mut rng = stream(61, "wrecall", 0);
        for _ in 0..300 {
            let n = rng.gen_range(2..50);
            let y: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..2))).collect();
            let p: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..2))).collect();
            let m = classification_metrics(&y, &p).unwrap();
            assert!(
                (m.weighted_recall - m.accuracy).abs() < 1e-12,
                "recall {} vs accuracy {}",
                m.weighted_recall,
                m.accuracy
            );
        }
    }

    #[test]
    fn roc_perfect_and_tied() {
        let curve = roc_auc(&[0.0, 0.0, 1.0, 1.0], &[0.1, 0.2, 0.8, 0.9]).unwrap();
        assert_eq!(curve.auc, 1.0);
        assert_eq!(curve.points.first(), Some(&(0.0, 0.0)));
        assert_eq!(curve.points.last(), Some(&(1.0, 1.0)));

        // All scores equal: the diagonal, AUC one half.
        let curve = roc_auc(&[0.0, 1.0, 0.0, 1.0], &[0.5; 4]).unwrap();
        assert_eq!(curve.points, vec![(0.0, 0.0), (1.0, 1.0)]);
        assert!((curve.auc - 0.5).abs() < 1e-12);

        assert!(roc_auc(&[1.0, 1.0], &[0.3, 0.4]).is_err());
    }

    #[test]
    fn roc_curve_is_monotone() {
        let mut rng = stream(62, "roc-mono", 0);
        for _ in 0..50 {
            let n = rng.gen_range(4..60);
            let y: Vec<f64> = (0..n).map(|i| f64::from(u8::from(i % 3 == 0))).collect();
            let s: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
            let curve = roc_auc(&y, &s).unwrap();
            for w in curve.points.windows(2) {
                assert!(w[1].0 >= w[0].0 && w[1].1 >= w[0].1);
            }
        }
    }

    /// AUC equals the probability a random positive outranks a random
    /// negative, ties counted one half.
    #[test]
    fn trapezoid_auc_equals_pairwise_rank_statistic() {
        let mut rng = stream(63, "roc-pairs", 0);
        for trial in 0..100 {
            let n = rng.gen_range(4..=10);
            let y: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..2))).collect();
            if y.iter().all(|&v| v == 0.0) || y.iter().all(|&v| v == 1.0) {
                continue;
            }
            // Coarse scores force plenty of ties.
            let s: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..4)) / 4.0).collect();
            let curve = roc_auc(&y, &s).unwrap();

            let mut wins = 0.0;
            let mut pairs = 0.0;
            for i in 0..n {
                for j in 0..n {
                    if y[i] == 1.0 && y[j] == 0.0 {
                        pairs += 1.0;
                        if s[i] > s[j] {
                            wins += 1.0;
                        } else if s[i] == s[j] {
                            wins += 0.5;
                        }
                    }
                }
            }
            assert!(
                (curve.auc - wins / pairs).abs() < 1e-12,
                "trial {trial}: trapezoid {} vs pairwise {}",
                curve.auc,
                wins / pairs
            );
        }
    }

    fn planted_dataset(n: usize, informative: usize, seed: u64) -> Dataset {
        let mut rng = stream(seed, "planted", 0);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..N_PLATFORMS).map(|_| rng.gen_range(0.0..10.0)).collect())
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|r| f64::from(u8::from(r[informative] > 5.0)))
            .collect();
        Dataset::new(
            crate::platform::PlatformId::names(),
            x,
            y,
            Task::Classification,
            "test".into(),
        )
        .unwrap()
    }

    #[test]
    fn single_split_tree_gets_full_importance() {
        let x: Vec<Vec<f64>> = (-6..6).map(|i| vec![0.0, f64::from(i) + 0.5, 1.0]).collect();
        let y: Vec<f64> = x.iter().map(|r| f64::from(u8::from(r[1] > 0.0))).collect();
        let ds = Dataset::new(
            vec!["a".into(), "b".into(), "c".into()],
            x,
            y,
            Task::Classification,
            "test".into(),
        )
        .unwrap();
        let model = fit_with_params(
            &ds,
            &ModelParams::Tree {
                max_depth: 4,
                min_samples_leaf: 1,
            },
            0,
        )
        .unwrap();
        let imp = gini_importance(&model).unwrap();
        assert_eq!(imp.weights, vec![0.0, 1.0, 0.0]);
    }

    #[test]
    fn forest_importance_finds_planted_feature() {
        let ds = planted_dataset(800, 4, 77);
        let model = fit_with_params(
            &ds,
            &ModelParams::Forest {
                n_trees: 30,
                max_depth: 12,
                min_samples_leaf: 1,
                feature_rule: crate::model::FeatureRule::Sqrt,
            },
            7,
        )
        .unwrap();
        let imp = gini_importance(&model).unwrap();
        let total: f64 = imp.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-9);
        let top = top_k_features(&imp, 10);
        assert_eq!(top[0].0, 4, "top feature {:?}", &top[..3]);
        assert!(top[0].1 > 0.5, "planted weight {}", top[0].1);
    }

    #[test]
    fn splitless_tree_gets_uniform_importance() {
        let ds = Dataset::new(
            vec!["a".into(), "b".into()],
            vec![vec![1.0, 2.0]; 6],
            vec![1.0; 6],
            Task::Classification,
            "test".into(),
        )
        .unwrap();
        let model = fit_with_params(
            &ds,
            &ModelParams::Tree {
                max_depth: 4,
                min_samples_leaf: 1,
            },
            0,
        )
        .unwrap();
        let imp = gini_importance(&model).unwrap();
        assert_eq!(imp.weights, vec![0.5, 0.5]);
        assert!(imp.uniform_fallback);
    }

    #[test]
    fn non_tree_models_are_rejected() {
        let ds = Dataset::new(
            vec!["a".into()],
            vec![vec![0.0], vec![1.0], vec![2.0]],
            vec![0.0, 1.0, 2.0],
            Task::Regression,
            "test".into(),
        )
        .unwrap();
        let model = fit_with_params(&ds, &ModelParams::Linear, 0).unwrap();
        assert!(gini_importance(&model).is_err());
    }

    #[test]
    fn importance_ranks_survive_monotone_feature_transforms() {
        // Splits depend only on order, so a rank transform of one column
        // leaves importance ranks unchanged.
        let ds = planted_dataset(300, 2, 78);
        let params = ModelParams::Tree {
            max_depth: 8,
            min_samples_leaf: 2,
        };
        let base = gini_importance(&fit_with_params(&ds, &params, 0).unwrap()).unwrap();

        let mut warped = ds.clone();
        for row in warped.x.iter_mut() {
            row[2] = row[2].exp(); // strictly monotone
        }
        let transformed = gini_importance(&fit_with_params(&warped, &params, 0).unwrap()).unwrap();

        let ranks = |v: &ImportanceVector| -> Vec<usize> {
            top_k_features(v, v.weights.len()).iter().map(|&(i, _)| i).collect()
        };
        assert_eq!(ranks(&base), ranks(&transformed));
    }

    #[test]
    fn top_k_ties_follow_canonical_order() {
        let imp = ImportanceVector {
            weights: vec![1.0 / 21.0; N_PLATFORMS],
            source: ModelFamily::Tree,
            uniform_fallback: true,
        };
        let top = top_k_features(&imp, 10);
        let indices: Vec<usize> = top.iter().map(|&(i, _)| i).collect();
        assert_eq!(indices, (0..10).collect::<Vec<_>>());
        // k beyond the width clamps.
        assert_eq!(top_k_features(&imp, 50).len(), N_PLATFORMS);

        let imp = ImportanceVector {
            weights: {
                let mut w = vec![0.0; 4];
                w[0] = 0.5;
                w[1] = 0.3;
                w[2] = 0.2;
                w
            },
            source: ModelFamily::Tree,
            uniform_fallback: false,
        };
        let top = top_k_features(&imp, 2);
        assert_eq!(top.iter().map(|&(i, _)| i).collect::<Vec<_>>(), vec![0, 1]);
    }
}
