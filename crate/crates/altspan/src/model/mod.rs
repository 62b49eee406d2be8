//! From-scratch model families over the 21-platform feature matrix.
//!
//! Multiple linear regression, CART decision trees, random forests, a
//! one-hidden-layer MLP regressor, logistic regression, and Gaussian naive
//! Bayes, plus standardization, splitting, and 5-fold cross-validated grid
//! search. No optimizer or estimator libraries behind any of it; every fit is
//! deterministic given its seed.

pub mod forest;
pub mod gnb;
pub mod grid;
pub mod linear;
pub mod logistic;
pub mod mlp;
pub mod scale;
pub mod split;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use forest::{fit_random_forest, FeatureRule, ForestModel};
pub use gnb::{fit_gaussian_nb, GnbModel};
pub use grid::{kfold_grid_search, CvResult, HyperGrid};
pub use linear::{fit_linear_regression, LinearModel};
pub use logistic::{fit_logistic_regression, LogisticModel};
pub use mlp::{fit_mlp_regressor, MlpConfig, MlpModel, MlpNet};
pub use scale::{apply_standardizer, fit_standardizer, ScalerParams};
pub use split::{kfold_assignments, train_test_split, SplitIndices};
pub use tree::{fit_decision_tree, TreeModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Task {
    Regression,
    Classification,
}

/// A feature matrix with its target and provenance tag.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Dataset {
    pub feature_names: Vec<String>,
    pub x: Vec<Vec<f64>>,
    /// Online Age months for regression; {0,1} labels for classification.
    pub y: Vec<f64>,
    pub task: Task,
    pub cluster_id: String,
}

impl Dataset {
    pub fn new(
        feature_names: Vec<String>,
        x: Vec<Vec<f64>>,
        y: Vec<f64>,
        task: Task,
        cluster_id: String,
    ) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Argument(format!(
                "feature rows ({}) and targets ({}) disagree",
                x.len(),
                y.len()
            )));
        }
        let d = feature_names.len();
        for row in &x {
            if row.len() != d {
                return Err(Error::Validation(format!(
                    "row width {} does not match {} feature names",
                    row.len(),
                    d
                )));
            }
            if row.iter().any(|v| !v.is_finite()) {
                return Err(Error::Validation("non-finite feature value".into()));
            }
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite target value".into()));
        }
        if task == Task::Classification && y.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::Validation(
                "classification targets must be 0 or 1".into(),
            ));
        }
        Ok(Dataset {
            feature_names,
            x,
            y,
            task,
            cluster_id,
        })
    }

    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.feature_names.len()
    }

    /// Rows at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            feature_names: self.feature_names.clone(),
            x: indices.iter().map(|&i| self.x[i].clone()).collect(),
            y: indices.iter().map(|&i| self.y[i]).collect(),
            task: self.task,
            cluster_id: self.cluster_id.clone(),
        }
    }

    pub fn labels(&self) -> Vec<u8> {
        self.y.iter().map(|&v| v as u8).collect()
    }
}

/// Model families, also the grid-search dispatch key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelFamily {
    Linear,
    Tree,
    Forest,
    Mlp,
    Logistic,
    Gnb,
}

impl ModelFamily {
    pub fn id(self) -> &'static str {
        match self {
            ModelFamily::Linear => "linear",
            ModelFamily::Tree => "tree",
            ModelFamily::Forest => "forest",
            ModelFamily::Mlp => "mlp",
            ModelFamily::Logistic => "logistic",
            ModelFamily::Gnb => "gnb",
        }
    }

    /// Human-readable name for report tables.
    pub fn display_name(self) -> &'static str {
        match self {
            ModelFamily::Linear => "Multiple Linear Regression",
            ModelFamily::Tree => "Decision Tree",
            ModelFamily::Forest => "Random Forest",
            ModelFamily::Mlp => "Multi-layer Perceptron",
            ModelFamily::Logistic => "Logistic Regression",
            ModelFamily::Gnb => "Gaussian Naive Bayes",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(ModelFamily::Linear),
            "tree" => Ok(ModelFamily::Tree),
            "forest" => Ok(ModelFamily::Forest),
            "mlp" => Ok(ModelFamily::Mlp),
            "logistic" => Ok(ModelFamily::Logistic),
            "gnb" => Ok(ModelFamily::Gnb),
            other => Err(Error::Config(format!("unknown model family {other:?}"))),
        }
    }

    pub fn supports(self, task: Task) -> bool {
        match self {
            ModelFamily::Linear | ModelFamily::Mlp => task == Task::Regression,
            ModelFamily::Logistic | ModelFamily::Gnb => task == Task::Classification,
            ModelFamily::Tree | ModelFamily::Forest => true,
        }
    }
}

/// Hyperparameters for one fit; one grid point in search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    Linear,
    Tree {
        max_depth: usize,
        min_samples_leaf: usize,
    },
    Forest {
        n_trees: usize,
        max_depth: usize,
        min_samples_leaf: usize,
        feature_rule: FeatureRule,
    },
    Mlp(MlpConfig),
    Logistic {
        lambda: f64,
        max_iter: usize,
        tol: f64,
    },
    Gnb {
        var_smoothing: f64,
    },
}

impl ModelParams {
    pub fn family(&self) -> ModelFamily {
        match self {
            ModelParams::Linear => ModelFamily::Linear,
            ModelParams::Tree { .. } => ModelFamily::Tree,
            ModelParams::Forest { .. } => ModelFamily::Forest,
            ModelParams::Mlp(_) => ModelFamily::Mlp,
            ModelParams::Logistic { .. } => ModelFamily::Logistic,
            ModelParams::Gnb { .. } => ModelFamily::Gnb,
        }
    }
}

/// A fitted model of any family.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum TrainedModel {
    Linear(LinearModel),
    Tree(TreeModel),
    Forest(ForestModel),
    Mlp(MlpModel),
    Logistic(LogisticModel),
    Gnb(GnbModel),
}

impl TrainedModel {
    pub fn family(&self) -> ModelFamily {
        match self {
            TrainedModel::Linear(_) => ModelFamily::Linear,
            TrainedModel::Tree(_) => ModelFamily::Tree,
            TrainedModel::Forest(_) => ModelFamily::Forest,
            TrainedModel::Mlp(_) => ModelFamily::Mlp,
            TrainedModel::Logistic(_) => ModelFamily::Logistic,
            TrainedModel::Gnb(_) => ModelFamily::Gnb,
        }
    }

    fn expected_width(&self) -> usize {
        match self {
            TrainedModel::Linear(m) => m.weights.len(),
            TrainedModel::Tree(m) => m.n_features,
            TrainedModel::Forest(m) => m.n_features,
            TrainedModel::Mlp(m) => m.n_features(),
            TrainedModel::Logistic(m) => m.weights.len(),
            TrainedModel::Gnb(m) => m.n_features(),
        }
    }

    fn check_width(&self, x: &[Vec<f64>]) -> Result<()> {
        let d = self.expected_width();
        if let Some(row) = x.iter().find(|row| row.len() != d) {
            return Err(Error::Argument(format!(
                "expected {d} feature columns, got {}",
                row.len()
            )));
        }
        Ok(())
    }

    /// Predictions: regression values, or {0,1} class labels.
    pub fn predict(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.check_width(x)?;
        Ok(match self {
            TrainedModel::Linear(m) => m.predict(x),
            TrainedModel::Tree(m) => m.predict(x),
            TrainedModel::Forest(m) => m.predict(x),
            TrainedModel::Mlp(m) => m.predict(x),
            TrainedModel::Logistic(m) => m.predict(x),
            TrainedModel::Gnb(m) => m.predict(x),
        })
    }

    /// Positive-class scores in [0, 1]; classifiers only.
    ///
    /// Sources per family: logistic sigmoid, normalized GNB posterior, tree
    /// leaf positive fraction, forest mean of tree scores.
    pub fn predict_score(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        self.check_width(x)?;
        match self {
            TrainedModel::Logistic(m) => Ok(m.predict_score(x)),
            TrainedModel::Gnb(m) => Ok(m.predict_score(x)),
            TrainedModel::Tree(m) => m.predict_score(x),
            TrainedModel::Forest(m) => m.predict_score(x),
            TrainedModel::Linear(_) | TrainedModel::Mlp(_) => Err(Error::Argument(
                "predict_score is defined for classifiers only".into(),
            )),
        }
    }
}

/// Fit one model with explicit hyperparameters.
pub fn fit_with_params(train: &Dataset, params: &ModelParams, seed: u64) -> Result<TrainedModel> {
    match params {
        ModelParams::Linear => linear::fit_linear_regression(train).map(TrainedModel::Linear),
        ModelParams::Tree {
            max_depth,
            min_samples_leaf,
        } => tree::fit_decision_tree(train, *max_depth, *min_samples_leaf).map(TrainedModel::Tree),
        ModelParams::Forest {
            n_trees,
            max_depth,
            min_samples_leaf,
            feature_rule,
        } => forest::fit_random_forest(
            train,
            *n_trees,
            *feature_rule,
            *max_depth,
            *min_samples_leaf,
            seed,
        )
        .map(TrainedModel::Forest),
        ModelParams::Mlp(config) => {
            mlp::fit_mlp_regressor(train, config, seed).map(TrainedModel::Mlp)
        }
        ModelParams::Logistic {
            lambda,
            max_iter,
            tol,
        } => logistic::fit_logistic_regression(train, *lambda, *max_iter, *tol)
            .map(TrainedModel::Logistic),
        ModelParams::Gnb { var_smoothing } => {
            gnb::fit_gaussian_nb(train, *var_smoothing).map(TrainedModel::Gnb)
        }
    }
}

/// Versioned on-disk model wrapper.
///
/// Self-describing JSON carrying the family, hyperparameters, fitted state,
/// the scaler learned on the training rows (when the family uses one), the
/// feature-name order, and the training seed. Loading against a different
/// feature-name order is an error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SavedModel {
    pub format_version: u32,
    pub family: ModelFamily,
    pub params: ModelParams,
    pub feature_names: Vec<String>,
    pub seed: u64,
    pub scaler: Option<ScalerParams>,
    pub model: TrainedModel,
}

pub const MODEL_FORMAT_VERSION: u32 = 1;

/// Apply the model's stored scaler when it has one; raw passthrough otherwise.
pub fn apply_params_scaler(saved: &SavedModel, x: &[Vec<f64>]) -> Vec<Vec<f64>> {
    match &saved.scaler {
        Some(scaler) => scale::apply_standardizer(scaler, x),
        None => x.to_vec(),
    }
}

impl SavedModel {
    pub fn save(&self, path: &std::path::Path) -> Result<()> {
        let json = serde_json::to_string_pretty(self)
            .map_err(|e| Error::Internal(format!("model serialization: {e}")))?;
        std::fs::write(path, json + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &std::path::Path, expected_features: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let saved: SavedModel = serde_json::from_str(&text)
            .map_err(|e| Error::Validation(format!("model file {}: {e}", path.display())))?;
        if saved.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Validation(format!(
                "model format version {} unsupported (expected {MODEL_FORMAT_VERSION})",
                saved.format_version
            )));
        }
        if saved.feature_names != expected_features {
            return Err(Error::Validation(format!(
                "model file {} was trained with a different feature-name order",
                path.display()
            )));
        }
        Ok(saved)
    }
}
