//! Run configuration: a flat key = value file, overridable by CLI flags.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{FeatureRule, HyperGrid, MlpConfig, ModelFamily, ModelParams, Task};

/// Hyperparameter lists swept by cross-validated grid search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridConfig {
    pub tree_max_depth: Vec<usize>,
    pub tree_min_samples_leaf: Vec<usize>,
    pub forest_n_trees: Vec<usize>,
    pub forest_max_depth: usize,
    pub logistic_lambda: Vec<f64>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            tree_max_depth: vec![4, 8, 16, 32],
            tree_min_samples_leaf: vec![1, 5, 10],
            forest_n_trees: vec![100, 200],
            forest_max_depth: 16,
            logistic_lambda: vec![1e-4, 1e-2],
        }
    }
}

impl GridConfig {
    /// The grid searched for one family; single-point grids for the families
    /// with nothing to tune.
    pub fn grid_for(&self, family: ModelFamily, task: Task) -> HyperGrid {
        let combos = match family {
            ModelFamily::Tree => {
                let mut combos = Vec::new();
                for &max_depth in &self.tree_max_depth {
                    for &min_samples_leaf in &self.tree_min_samples_leaf {
                        combos.push(ModelParams::Tree {
                            max_depth,
                            min_samples_leaf,
                        });
                    }
                }
                combos
            }
            ModelFamily::Forest => self
                .forest_n_trees
                .iter()
                .map(|&n_trees| ModelParams::Forest {
                    n_trees,
                    max_depth: self.forest_max_depth,
                    min_samples_leaf: 1,
                    feature_rule: FeatureRule::default_for(task),
                })
                .collect(),
            ModelFamily::Logistic => self
                .logistic_lambda
                .iter()
                .map(|&lambda| ModelParams::Logistic {
                    lambda,
                    max_iter: 1000,
                    tol: 1e-6,
                })
                .collect(),
            ModelFamily::Mlp => vec![ModelParams::Mlp(MlpConfig::default())],
            ModelFamily::Linear => vec![ModelParams::Linear],
            ModelFamily::Gnb => vec![ModelParams::Gnb { var_smoothing: 1e-9 }],
        };
        HyperGrid { combos }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub input: PathBuf,
    pub out: PathBuf,
    pub seed: u64,
    pub pub_start: i32,
    pub pub_end: i32,
    pub horizon: i32,
    pub min_platforms: usize,
    /// Fixed cluster count; `None` chooses k by the elbow method.
    pub k: Option<usize>,
    pub k_max: usize,
    pub cluster_with_year: bool,
    pub split_ratio: f64,
    pub folds: usize,
    /// Families trained for regression, in report order.
    pub regression_models: Vec<ModelFamily>,
    /// Families trained for classification, in report order.
    pub classification_models: Vec<ModelFamily>,
    pub grids: GridConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: PathBuf::new(),
            out: PathBuf::new(),
            seed: 0,
            pub_start: 1920,
            pub_end: 2016,
            horizon: 2018,
            min_platforms: 3,
            k: None,
            k_max: 10,
            cluster_with_year: false,
            split_ratio: 0.8,
            folds: 5,
            regression_models: vec![
                ModelFamily::Linear,
                ModelFamily::Tree,
                ModelFamily::Forest,
                ModelFamily::Mlp,
            ],
            classification_models: vec![
                ModelFamily::Logistic,
                ModelFamily::Gnb,
                ModelFamily::Tree,
                ModelFamily::Forest,
            ],
            grids: GridConfig::default(),
        }
    }
}

impl RunConfig {
    /// Parse the flat `key = value` config format. Unknown keys are errors;
    /// `#` starts a comment.
    pub fn parse_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut pairs = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected key = value",
                    path.display(),
                    lineno + 1
                )));
            };
            pairs.insert(key.trim().to_string(), value.trim().to_string());
        }
        let mut config = RunConfig::default();
        for (key, value) in &pairs {
            config.apply(key, value)?;
        }
        Ok(config)
    }

    /// Apply one key = value setting.
    pub fn apply(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::Config(format!("bad {what}: {value:?}"));
        match key {
            "input" => self.input = PathBuf::from(value),
            "out" => self.out = PathBuf::from(value),
            "seed" => self.seed = value.parse().map_err(|_| bad("seed"))?,
            "pub_start" => self.pub_start = value.parse().map_err(|_| bad("pub_start"))?,
            "pub_end" => self.pub_end = value.parse().map_err(|_| bad("pub_end"))?,
            "horizon" => self.horizon = value.parse().map_err(|_| bad("horizon"))?,
            "min_platforms" => {
                self.min_platforms = value.parse().map_err(|_| bad("min_platforms"))?
            }
            "k" => self.k = Some(value.parse().map_err(|_| bad("k"))?),
            "k_max" => self.k_max = value.parse().map_err(|_| bad("k_max"))?,
            "cluster_with_year" => {
                self.cluster_with_year = value.parse().map_err(|_| bad("cluster_with_year"))?
            }
            "split_ratio" => self.split_ratio = value.parse().map_err(|_| bad("split_ratio"))?,
            "folds" => self.folds = value.parse().map_err(|_| bad("folds"))?,
            "models" => self.set_models(value)?,
            "tree_max_depth" => self.grids.tree_max_depth = parse_list(value).ok_or_else(|| bad("tree_max_depth"))?,
            "tree_min_samples_leaf" => {
                self.grids.tree_min_samples_leaf = parse_list(value).ok_or_else(|| bad("tree_min_samples_leaf"))?
            }
            "forest_n_trees" => self.grids.forest_n_trees = parse_list(value).ok_or_else(|| bad("forest_n_trees"))?,
            "forest_max_depth" => self.grids.forest_max_depth = value.parse().map_err(|_| bad("forest_max_depth"))?,
            "logistic_lambda" => self.grids.logistic_lambda = parse_list(value).ok_or_else(|| bad("logistic_lambda"))?,
            other => return Err(Error::Config(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Restrict both model lists to the named families; regression keeps the
    /// regression-capable ones, classification the classification-capable.
    pub fn set_models(&mut self, list: &str) -> Result<()> {
        let families = list
            .split(',')
            .map(|s| ModelFamily::parse(s.trim()))
            .collect::<Result<Vec<_>>>()?;
        self.regression_models = RunConfig::default()
            .regression_models
            .into_iter()
            .filter(|f| families.contains(f))
            .collect();
        self.classification_models = RunConfig::default()
            .classification_models
            .into_iter()
            .filter(|f| families.contains(f))
            .collect();
        if self.regression_models.is_empty() && self.classification_models.is_empty() {
            return Err(Error::Config(format!("no usable model families in {list:?}")));
        }
        Ok(())
    }

    /// Validate ranges and referenced paths before running.
    pub fn validate(&self, needs_input: bool) -> Result<()> {
        if self.grids.tree_max_depth.is_empty()
            || self.grids.tree_min_samples_leaf.is_empty()
            || self.grids.forest_n_trees.is_empty()
            || self.grids.logistic_lambda.is_empty()
        {
            return Err(Error::Config("hyperparameter grids may not be empty".into()));
        }
        if needs_input {
            if self.input.as_os_str().is_empty() {
                return Err(Error::Config("no input path configured".into()));
            }
            if !self.input.is_file() {
                return Err(Error::Config(format!(
                    "input file {} does not exist",
                    self.input.display()
                )));
            }
        }
        if self.out.as_os_str().is_empty() {
            return Err(Error::Config("no output directory configured".into()));
        }
        if self.pub_start > self.pub_end {
            return Err(Error::Config(format!(
                "publication window {}..{} is empty",
                self.pub_start, self.pub_end
            )));
        }
        if self.horizon < self.pub_end {
            return Err(Error::Config(
                "horizon year precedes the publication window".into(),
            ));
        }
        if self.min_platforms == 0 {
            return Err(Error::Config("min_platforms must be at least 1".into()));
        }
        if !(0.0 < self.split_ratio && self.split_ratio < 1.0) {
            return Err(Error::Config(format!(
                "split ratio {} out of (0, 1)",
                self.split_ratio
            )));
        }
        if self.folds < 2 {
            return Err(Error::Config("need at least 2 folds".into()));
        }
        if self.k == Some(0) || self.k_max == 0 {
            return Err(Error::Config("cluster counts must be positive".into()));
        }
        for family in &self.regression_models {
            if !family.supports(crate::model::Task::Regression) {
                return Err(Error::Config(format!(
                    "{} cannot run regression",
                    family.id()
                )));
            }
        }
        for family in &self.classification_models {
            if !family.supports(crate::model::Task::Classification) {
                return Err(Error::Config(format!(
                    "{} cannot run classification",
                    family.id()
                )));
            }
        }
        Ok(())
    }
}

fn parse_list<T: std::str::FromStr>(value: &str) -> Option<Vec<T>> {
    let items: Vec<T> = value
        .split(',')
        .map(|s| s.trim().parse().ok())
        .collect::<Option<_>>()?;
    if items.is_empty() {
        None
    } else {
        Some(items)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_flat_key_values_with_comments() {
        let dir = std::env::temp_dir().join("altspan-config-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        std::fs::write(
            &path,
            "# a run\nseed = 42\npub_start = 1950\nk = 3\nmodels = linear, forest\nforest_n_trees = 50, 150\ntree_max_depth = 6\n",
        )
        .unwrap();
        let config = RunConfig::parse_file(&path).unwrap();
        assert_eq!(config.seed, 42);
        assert_eq!(config.pub_start, 1950);
        assert_eq!(config.k, Some(3));
        assert_eq!(
            config.regression_models,
            vec![ModelFamily::Linear, ModelFamily::Forest]
        );
        assert_eq!(config.classification_models, vec![ModelFamily::Forest]);
        assert_eq!(config.grids.forest_n_trees, vec![50, 150]);
        assert_eq!(config.grids.tree_max_depth, vec![6]);
        // Untouched grid entries keep their defaults.
        assert_eq!(config.grids.tree_min_samples_leaf, vec![1, 5, 10]);
        std::fs::remove_file(&path).ok();
    }

    #[test]
    fn unknown_keys_and_bad_values_are_config_errors() {
        let mut config = RunConfig::default();
        assert!(matches!(
            config.apply("bogus", "1").unwrap_err(),
            Error::Config(_)
        ));
        assert!(matches!(
            config.apply("seed", "not-a-number").unwrap_err(),
            Error::Config(_)
        ));
    }

    #[test]
    fn validation_catches_missing_input() {
        let config = RunConfig {
            out: PathBuf::from("/tmp/out"),
            input: PathBuf::from("/definitely/not/here.jsonl"),
            ..RunConfig::default()
        };
        let err = config.validate(true).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
