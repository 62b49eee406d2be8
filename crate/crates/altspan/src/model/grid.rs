//! 5-fold cross-validated grid search.
//!
//! Scores are weighted F1 for classification and negative RMSE for
//! regression. The optimum is the best mean fold score; exact ties keep the
//! first combination in declared grid order. The chosen combination is refit
//! on the full training split with the caller's seed, so a singleton grid is
//! identical to a direct fit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eval::{classification_metrics, regression_metrics};
use crate::rng::derive_seed;

use super::{
    fit_with_params, kfold_assignments, Dataset, FeatureRule, MlpConfig, ModelFamily, ModelParams,
    Task, TrainedModel,
};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HyperGrid {
    /// Grid points in declared order; the tie-break order.
    pub combos: Vec<ModelParams>,
}

impl HyperGrid {
    pub fn singleton(params: ModelParams) -> Self {
        HyperGrid {
            combos: vec![params],
        }
    }

    /// Default grids. Tree-family models get real grids; the MLP runs one
    /// fixed configuration, linear regression and Gaussian NB have nothing
    /// to tune here.
    pub fn default_for(family: ModelFamily, task: Task) -> Self {
        let combos = match family {
            ModelFamily::Tree => {
                let mut combos = Vec::new();
                for &max_depth in &[4, 8, 16, 32] {
                    for &min_samples_leaf in &[1, 5, 10] {
                        combos.push(ModelParams::Tree {
                            max_depth,
                            min_samples_leaf,
                        });
                    }
                }
                combos
            }
            ModelFamily::Forest => [100, 200]
                .iter()
                .map(|&n_trees| ModelParams::Forest {
                    n_trees,
                    max_depth: 16,
                    min_samples_leaf: 1,
                    feature_rule: FeatureRule::default_for(task),
                })
                .collect(),
            ModelFamily::Logistic => [1e-4, 1e-2]
                .iter()
                .map(|&lambda| ModelParams::Logistic {
                    lambda,
                    max_iter: 1000,
                    tol: 1e-6,
                })
                .collect(),
            ModelFamily::Mlp => vec![ModelParams::Mlp(MlpConfig::default())],
            ModelFamily::Linear => vec![ModelParams::Linear],
            ModelFamily::Gnb => vec![ModelParams::Gnb {
                var_smoothing: 1e-9,
            }],
        };
        HyperGrid { combos }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvResult {
    pub combos: Vec<ModelParams>,
    /// Mean fold score per combination, in declared order.
    pub mean_scores: Vec<f64>,
    pub chosen: usize,
    pub folds: usize,
    /// The chosen combination refit on the full training split.
    pub model: TrainedModel,
}

impl CvResult {
    pub fn chosen_params(&self) -> &ModelParams {
        &self.combos[self.chosen]
    }
}

fn fold_score(task: Task, y: &[f64], model: &TrainedModel, x: &[Vec<f64>]) -> Result<f64> {
    let pred = model.predict(x)?;
    match task {
        Task::Classification => Ok(classification_metrics(y, &pred)?.weighted_f1),
        Task::Regression => Ok(-regression_metrics(y, &pred)?.rmse),
    }
}

pub fn kfold_grid_search(
    grid: &HyperGrid,
    dataset: &Dataset,
    folds: usize,
    seed: u64,
) -> Result<CvResult> {
    if grid.combos.is_empty() {
        return Err(Error::Argument("empty hyperparameter grid".into()));
    }
    if dataset.n() < folds {
        return Err(Error::Argument(format!(
            "{} rows cannot fill {folds} folds",
            dataset.n()
        )));
    }
    let labels = dataset.labels();
    let stratify = match dataset.task {
        Task::Classification => Some(labels.as_slice()),
        Task::Regression => None,
    };
    let fold_of = kfold_assignments(dataset.n(), folds, derive_seed(seed, "cv-folds", 0), stratify)?;

    let mut mean_scores = Vec::with_capacity(grid.combos.len());
    for (combo_idx, combo) in grid.combos.iter().enumerate() {
        let mut total = 0.0;
        for fold in 0..folds {
            let train_idx: Vec<usize> =
                (0..dataset.n()).filter(|&i| fold_of[i] != fold).collect();
            let val_idx: Vec<usize> = (0..dataset.n()).filter(|&i| fold_of[i] == fold).collect();
            let train = dataset.subset(&train_idx);
            let val = dataset.subset(&val_idx);
            let fit_seed = derive_seed(seed, "cv-fit", (combo_idx * folds + fold) as u64);
            let model = fit_with_params(&train, combo, fit_seed)?;
            total += fold_score(dataset.task, &val.y, &model, &val.x)?;
        }
        mean_scores.push(total / folds as f64);
    }

    // Strict > keeps the first combination on exact ties.
    let mut chosen = 0;
    for (i, &score) in mean_scores.iter().enumerate() {
        if score > mean_scores[chosen] {
            chosen = i;
        }
    }
    let model = fit_with_params(dataset, &grid.combos[chosen], seed)?;
    Ok(CvResult {
        combos: grid.combos.clone(),
        mean_scores,
        chosen,
        folds,
        model,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{normal, stream};
    use rand::Rng;

    fn planted_classification(n: usize, seed: u64) -> Dataset {
        let mut rng = stream(seed, "grid-data", 0);
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..5).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|r| f64::from(u8::from(r[1] > 0.5)))
            .collect();
        Dataset::new(
            (0..5).map(|i| format!("f{i}")).collect(),
            x,
            y,
            Task::Classification,
            "test".into(),
        )
        .unwrap()
    }

    #[test]
    fn singleton_grid_equals_direct_fit() {
        let ds = planted_classification(60, 3);
        let params = ModelParams::Tree {
            max_depth: 4,
            min_samples_leaf: 2,
        };
        let cv = kfold_grid_search(&HyperGrid::singleton(params.clone()), &ds, 5, 21).unwrap();
        assert_eq!(cv.chosen, 0);
        let direct = fit_with_params(&ds, &params, 21).unwrap();
        let probe: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![f64::from(i) / 20.0; 5])
            .collect();
        assert_eq!(cv.model.predict(&probe).unwrap(), direct.predict(&probe).unwrap());
    }

    #[test]
    fn singleton_mean_is_the_fold_average() {
        let ds = planted_classification(50, 5);
        let cv = kfold_grid_search(
            &HyperGrid::singleton(ModelParams::Gnb { var_smoothing: 1e-9 }),
            &ds,
            5,
            8,
        )
        .unwrap();
        assert_eq!(cv.mean_scores.len(), 1);
        assert!(cv.mean_scores[0].is_finite());
        assert_eq!(cv.folds, 5);
    }

    #[test]
    fn planted_better_setting_wins() {
        // Depth 1 cannot express the rule on feature 1 after a distractor
        // split; depth 8 can. The deeper tree must win.
        let mut rng = stream(9, "grid-planted", 0);
        let n = 120;
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..4).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|r| {
                let xor = (r[0] > 0.5) != (r[1] > 0.5);
                f64::from(u8::from(xor))
            })
            .collect();
        let ds = Dataset::new(
            (0..4).map(|i| format!("f{i}")).collect(),
            x,
            y,
            Task::Classification,
            "test".into(),
        )
        .unwrap();
        let grid = HyperGrid {
            combos: vec![
                ModelParams::Tree {
                    max_depth: 1,
                    min_samples_leaf: 1,
                },
                ModelParams::Tree {
                    max_depth: 8,
                    min_samples_leaf: 1,
                },
            ],
        };
        let cv = kfold_grid_search(&grid, &ds, 5, 13).unwrap();
        assert_eq!(cv.chosen, 1, "scores {:?}", cv.mean_scores);
        assert!(cv.mean_scores[1] > cv.mean_scores[0]);
    }

    #[test]
    fn regression_scoring_uses_negative_rmse() {
        let mut rng = stream(10, "grid-reg", 0);
        let x: Vec<Vec<f64>> = (0..80)
            .map(|_| (0..3).map(|_| normal(&mut rng)).collect())
            .collect();
        let y: Vec<f64> = x.iter().map(|r| 2.0 * r[0] + 0.1 * normal(&mut rng)).collect();
        let ds = Dataset::new(
            (0..3).map(|i| format!("f{i}")).collect(),
            x,
            y,
            Task::Regression,
            "test".into(),
        )
        .unwrap();
        let cv = kfold_grid_search(
            &HyperGrid::singleton(ModelParams::Linear),
            &ds,
            5,
            2,
        )
        .unwrap();
        assert!(cv.mean_scores[0] <= 0.0);
        assert!(cv.mean_scores[0] > -0.5, "rmse too high: {}", -cv.mean_scores[0]);
    }

    #[test]
    fn impossible_stratification_is_an_error() {
        let x: Vec<Vec<f64>> = (0..10).map(|i| vec![f64::from(i)]).collect();
        let mut y = vec![0.0; 10];
        y[0] = 1.0;
        y[1] = 1.0; // only two positives for five folds
        let ds = Dataset::new(
            vec!["f0".into()],
            x,
            y,
            Task::Classification,
            "test".into(),
        )
        .unwrap();
        let grid = HyperGrid::singleton(ModelParams::Gnb { var_smoothing: 1e-9 });
        assert!(kfold_grid_search(&grid, &ds, 5, 0).is_err());
    }
}
