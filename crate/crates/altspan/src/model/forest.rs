//! Random forests over the CART trees.
//!
//! Each tree trains on a size-n bootstrap drawn from its own RNG stream
//! derived from (seed, tree index), with a fresh feature subset drawn at
//! every node. Trees are combined in index order, so predictions are
//! identical whatever the degree of parallelism.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream};

use super::tree::{grow_tree, FeatureSampler, TreeModel};
use super::{Dataset, Task};

/// Per-node feature-subset size rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FeatureRule {
    /// ceil(sqrt(d)) — the classification default.
    Sqrt,
    /// ceil(d / 3) — the regression default.
    Third,
    /// All features at every node.
    All,
}

impl FeatureRule {
    pub fn default_for(task: Task) -> Self {
        match task {
            Task::Classification => FeatureRule::Sqrt,
            Task::Regression => FeatureRule::Third,
        }
    }

    pub fn subset_size(self, d: usize) -> usize {
        match self {
            FeatureRule::Sqrt => (d as f64).sqrt().ceil() as usize,
            FeatureRule::Third => d.div_ceil(3),
            FeatureRule::All => d,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForestModel {
    pub trees: Vec<TreeModel>,
    /// Derived seed per tree, recorded for replay.
    pub tree_seeds: Vec<u64>,
    pub feature_rule: FeatureRule,
    pub n_features: usize,
    pub task: Task,
}

impl ForestModel {
    /// Mean of tree outputs (regression) or majority over the trees' argmax
    /// classes with ties to class 0 (classification).
    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        match self.task {
            Task::Regression => {
                let mut acc = vec![0.0; x.len()];
                for tree in &self.trees {
                    for (a, p) in acc.iter_mut().zip(tree.predict(x)) {
                        *a += p;
                    }
                }
                let n = self.trees.len() as f64;
                acc.iter().map(|a| a / n).collect()
            }
            Task::Classification => {
                let mut votes = vec![0usize; x.len()];
                for tree in &self.trees {
                    for (v, p) in votes.iter_mut().zip(tree.predict(x)) {
                        *v += usize::from(p == 1.0);
                    }
                }
                votes
                    .iter()
                    .map(|&v| f64::from(u8::from(2 * v > self.trees.len())))
                    .collect()
            }
        }
    }

    /// Mean of per-tree leaf fractions; classification forests only.
    pub fn predict_score(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        if self.task != Task::Classification {
            return Err(Error::Argument(
                "scores are defined for classification forests only".into(),
            ));
        }
        let mut acc = vec![0.0; x.len()];
        for tree in &self.trees {
            for (a, s) in acc.iter_mut().zip(tree.predict_score(x)?) {
                *a += s;
            }
        }
        let n = self.trees.len() as f64;
        Ok(acc.iter().map(|a| a / n).collect())
    }
}

pub fn fit_random_forest(
    train: &Dataset,
    n_trees: usize,
    feature_rule: FeatureRule,
    max_depth: usize,
    min_samples_leaf: usize,
    seed: u64,
) -> Result<ForestModel> {
    if n_trees == 0 {
        return Err(Error::Argument("a forest needs at least one tree".into()));
    }
    if train.n() == 0 {
        return Err(Error::Argument("empty training set".into()));
    }
    if min_samples_leaf == 0 {
        return Err(Error::Argument("min_samples_leaf must be at least 1".into()));
    }

    let n = train.n();
    let d = train.d();
    let subset = feature_rule.subset_size(d);
    let tree_seeds: Vec<u64> = (0..n_trees)
        .map(|i| derive_seed(seed, "forest-tree", i as u64))
        .collect();

    let trees: Vec<TreeModel> = tree_seeds
        .par_iter()
        .map(|&tree_seed| {
            let mut rng = stream(tree_seed, "bootstrap-and-splits", 0);
            let bootstrap: Vec<usize> = (0..n).map(|_| rng.gen_range(0..n)).collect();
            let nodes = grow_tree(
                &train.x,
                &train.y,
                bootstrap,
                train.task,
                max_depth,
                min_samples_leaf,
                &mut FeatureSampler::Subset {
                    size: subset,
                    rng: &mut rng,
                },
            );
            TreeModel {
                nodes,
                n_features: d,
                task: train.task,
            }
        })
        .collect();

    Ok(ForestModel {
        trees,
        tree_seeds,
        feature_rule,
        n_features: d,
        task: train.task,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::tree::fit_decision_tree;
    use rand::Rng;

    fn dataset(x: Vec<Vec<f64>>, y: Vec<f64>, task: Task) -> Dataset {
        let d = x[0].len();
        Dataset::new(
            (0..d).map(|i| format!("f{i}")).collect(),
            x,
            y,
            task,
            "test".into(),
        )
        .unwrap()
    }

    #[test]
    fn degenerate_forest_equals_single_tree() {
        // Constant rows: every bootstrap is the same multiset, and with all
        // features in play the one tree is exactly the plain decision tree.
        let x = vec![vec![2.0, 3.0]; 10];
        let y = vec![1.0; 10];
        let ds = dataset(x.clone(), y, Task::Classification);
        let forest = fit_random_forest(&ds, 1, FeatureRule::All, 4, 1, 7).unwrap();
        let tree = fit_decision_tree(&ds, 4, 1).unwrap();
        assert_eq!(forest.predict(&x), tree.predict(&x));
    }

    #[test]
    fn learns_planted_single_feature_rule() {
        let mut rng = crate::rng::stream(33, "forest-planted", 0);
        let n = 2_000;
        let d = 21;
        let informative = 4;
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..d).map(|_| rng.gen_range(0.0..10.0)).collect())
            .collect();
        let y: Vec<f64> = x
            .iter()
            .map(|r| f64::from(u8::from(r[informative] > 5.0)))
            .collect();
        let ds = dataset(x, y, Task::Classification);
        let split = crate::model::split::train_test_split(n, 0.8, 1, Some(&ds.labels())).unwrap();
        let train = ds.subset(&split.train);
        let test = ds.subset(&split.test);
        let forest = fit_random_forest(&train, 50, FeatureRule::Sqrt, 16, 1, 5).unwrap();
        let pred = forest.predict(&test.x);
        let correct = pred
            .iter()
            .zip(&test.y)
            .filter(|(a, b)| a == b)
            .count();
        let accuracy = correct as f64 / test.n() as f64;
        assert!(accuracy >= 0.95, "accuracy {accuracy}");
    }

    #[test]
    fn identical_across_thread_counts() {
        let mut rng = crate::rng::stream(34, "forest-threads", 0);
        let n = 200;
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..6).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = x.iter().map(|r| r[0] * 3.0 + r[1]).collect();
        let ds = dataset(x.clone(), y, Task::Regression);

        let run = |threads: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap();
            pool.install(|| {
                fit_random_forest(&ds, 20, FeatureRule::Third, 8, 2, 9)
                    .unwrap()
                    .predict(&x)
            })
        };
        assert_eq!(run(1), run(2));
    }

    #[test]
    fn all_positive_stumps_score_one() {
        let x = vec![vec![0.0], vec![1.0], vec![2.0], vec![3.0]];
        let y = vec![1.0; 4];
        let ds = dataset(x.clone(), y, Task::Classification);
        let forest = fit_random_forest(&ds, 5, FeatureRule::All, 1, 1, 3).unwrap();
        let scores = forest.predict_score(&x).unwrap();
        assert!(scores.iter().all(|&s| s == 1.0));
        assert!(forest.predict(&x).iter().all(|&p| p == 1.0));
    }

    #[test]
    fn vote_ties_go_to_class_zero() {
        // Two stump trees forced to disagree: train each on one-class data.
        let ones = fit_random_forest(
            &dataset(vec![vec![0.0]; 4], vec![1.0; 4], Task::Classification),
            1,
            FeatureRule::All,
            1,
            1,
            0,
        )
        .unwrap();
        let zeros = fit_random_forest(
            &dataset(vec![vec![0.0]; 4], vec![0.0; 4], Task::Classification),
            1,
            FeatureRule::All,
            1,
            1,
            0,
        )
        .unwrap();
        let mixed = ForestModel {
            trees: vec![ones.trees[0].clone(), zeros.trees[0].clone()],
            tree_seeds: vec![0, 1],
            feature_rule: FeatureRule::All,
            n_features: 1,
            task: Task::Classification,
        };
        assert_eq!(mixed.predict(&[vec![0.0]]), vec![0.0]);
        let score = mixed.predict_score(&[vec![0.0]]).unwrap()[0];
        assert!((score - 0.5).abs() < 1e-12);
    }
}
