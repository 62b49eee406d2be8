//! CART decision trees for regression and binary classification.
//!
//! Splits scan every candidate feature and every midpoint between consecutive
//! distinct sorted values; the criterion is weighted Gini decrease for
//! classification and weighted variance decrease for regression. Ties go to
//! the lowest feature index, then the lowest threshold. Growth stops at the
//! depth limit, the leaf-size limit, an all-equal target, or when no split
//! has positive gain.

use rand::seq::SliceRandom;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{Dataset, Task};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum LeafValue {
    /// Mean target (regression).
    Mean(f64),
    /// Class fractions `[p0, p1]` (classification).
    ClassFractions([f64; 2]),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum Node {
    Split {
        feature: usize,
        threshold: f64,
        left: usize,
        right: usize,
        impurity: f64,
        n_samples: usize,
    },
    Leaf {
        value: LeafValue,
        impurity: f64,
        n_samples: usize,
    },
}

impl Node {
    pub fn impurity(&self) -> f64 {
        match self {
            Node::Split { impurity, .. } | Node::Leaf { impurity, .. } => *impurity,
        }
    }

    pub fn n_samples(&self) -> usize {
        match self {
            Node::Split { n_samples, .. } | Node::Leaf { n_samples, .. } => *n_samples,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeModel {
    /// Nodes in build order; index 0 is the root.
    pub nodes: Vec<Node>,
    pub n_features: usize,
    pub task: Task,
}

impl TreeModel {
    fn leaf_for(&self, row: &[f64]) -> &Node {
        let mut idx = 0;
        loop {
            match &self.nodes[idx] {
                Node::Split {
                    feature,
                    threshold,
                    left,
                    right,
                    ..
                } => {
                    idx = if row[*feature] <= *threshold { *left } else { *right };
                }
                leaf => return leaf,
            }
        }
    }

    /// Mean target (regression) or argmax class with ties to 0
    /// (classification).
    pub fn predict(&self, x: &[Vec<f64>]) -> Vec<f64> {
        x.iter()
            .map(|row| match self.leaf_for(row) {
                Node::Leaf {
                    value: LeafValue::Mean(m),
                    ..
                } => *m,
                Node::Leaf {
                    value: LeafValue::ClassFractions(f),
                    ..
                } => f64::from(u8::from(f[1] > f[0])),
                Node::Split { .. } => unreachable!("leaf_for returns leaves"),
            })
            .collect()
    }

    /// Leaf positive-class fraction; classification trees only.
    pub fn predict_score(&self, x: &[Vec<f64>]) -> Result<Vec<f64>> {
        if self.task != Task::Classification {
            return Err(Error::Argument(
                "scores are defined for classification trees only".into(),
            ));
        }
        Ok(x.iter()
            .map(|row| match self.leaf_for(row) {
                Node::Leaf {
                    value: LeafValue::ClassFractions(f),
                    ..
                } => f[1],
                _ => unreachable!("classification tree leaves hold fractions"),
            })
            .collect())
    }

    /// (left child, right child, weighted impurity decrease) per split node,
    /// keyed by split feature. Decreases are clamped at zero.
    pub fn split_contributions(&self) -> Vec<(usize, f64)> {
        let root_n = self.nodes[0].n_samples() as f64;
        self.nodes
            .iter()
            .filter_map(|node| match node {
                Node::Split {
                    feature,
                    left,
                    right,
                    impurity,
                    n_samples,
                    ..
                } => {
                    let n = *n_samples as f64;
                    let l = &self.nodes[*left];
                    let r = &self.nodes[*right];
                    let child = (l.n_samples() as f64 * l.impurity()
                        + r.n_samples() as f64 * r.impurity())
                        / n;
                    let decrease = (impurity - child).max(0.0);
                    Some((*feature, (n / root_n) * decrease))
                }
                Node::Leaf { .. } => None,
            })
            .collect()
    }
}

/// Per-node candidate feature selection.
pub(crate) enum FeatureSampler<'a> {
    /// All features at every node.
    All,
    /// A fresh uniform subset of the given size at every node.
    Subset { size: usize, rng: &'a mut ChaCha8Rng },
}

impl FeatureSampler<'_> {
    fn draw(&mut self, d: usize) -> Vec<usize> {
        match self {
            FeatureSampler::All => (0..d).collect(),
            FeatureSampler::Subset { size, rng } => {
                let mut all: Vec<usize> = (0..d).collect();
                all.shuffle(rng);
                all.truncate((*size).clamp(1, d));
                all.sort_unstable();
                all
            }
        }
    }
}

fn impurity_of(task: Task, targets: &[f64]) -> f64 {
    let n = targets.len() as f64;
    match task {
        Task::Classification => {
            let ones = targets.iter().filter(|&&t| t == 1.0).count() as f64;
            let p1 = ones / n;
            let p0 = 1.0 - p1;
            1.0 - p0 * p0 - p1 * p1
        }
        Task::Regression => {
            let mean = targets.iter().sum::<f64>() / n;
            targets.iter().map(|t| (t - mean) * (t - mean)).sum::<f64>() / n
        }
    }
}

fn leaf_value(task: Task, targets: &[f64]) -> LeafValue {
    let n = targets.len() as f64;
    match task {
        Task::Regression => LeafValue::Mean(targets.iter().sum::<f64>() / n),
        Task::Classification => {
            let ones = targets.iter().filter(|&&t| t == 1.0).count() as f64;
            LeafValue::ClassFractions([1.0 - ones / n, ones / n])
        }
    }
}

pub(crate) struct BestSplit {
    pub feature: usize,
    pub threshold: f64,
    pub gain: f64,
}

/// Exhaustive best split over the candidate features.
fn best_split(
    x: &[Vec<f64>],
    y: &[f64],
    samples: &[usize],
    features: &[usize],
    task: Task,
    min_samples_leaf: usize,
    parent_impurity: f64,
) -> Option<BestSplit> {
    let n = samples.len();
    let nf = n as f64;
    let mut best: Option<BestSplit> = None;

    let mut column: Vec<(f64, f64)> = Vec::with_capacity(n);
    for &feature in features {
        column.clear();
        column.extend(samples.iter().map(|&i| (x[i][feature], y[i])));
        column.sort_unstable_by(|a, b| a.0.total_cmp(&b.0));

        // Prefix aggregates for O(n) scanning after the sort.
        let mut left_n = 0usize;
        let mut left_sum = 0.0;
        let mut left_sumsq = 0.0;
        let mut left_ones = 0.0;
        let total_sum: f64 = column.iter().map(|(_, t)| t).sum();
        let total_sumsq: f64 = column.iter().map(|(_, t)| t * t).sum();
        let total_ones: f64 = column.iter().filter(|(_, t)| *t == 1.0).count() as f64;

        for i in 0..n - 1 {
            let (value, target) = column[i];
            left_n += 1;
            left_sum += target;
            left_sumsq += target * target;
            left_ones += f64::from(target == 1.0);

            let next = column[i + 1].0;
            if next <= value {
                continue; // no boundary between equal values
            }
            let right_n = n - left_n;
            if left_n < min_samples_leaf || right_n < min_samples_leaf {
                continue;
            }

            let (imp_l, imp_r) = match task {
                Task::Classification => {
                    let gini = |ones: f64, count: f64| {
                        let p1 = ones / count;
                        let p0 = 1.0 - p1;
                        1.0 - p0 * p0 - p1 * p1
                    };
                    (
                        gini(left_ones, left_n as f64),
                        gini(total_ones - left_ones, right_n as f64),
                    )
                }
                Task::Regression => {
                    let var = |sum: f64, sumsq: f64, count: f64| {
                        (sumsq / count - (sum / count) * (sum / count)).max(0.0)
                    };
                    (
                        var(left_sum, left_sumsq, left_n as f64),
                        var(total_sum - left_sum, total_sumsq - left_sumsq, right_n as f64),
                    )
                }
            };
            let weighted = (left_n as f64 * imp_l + right_n as f64 * imp_r) / nf;
            let gain = parent_impurity - weighted;
            if gain <= 0.0 {
                continue;
            }

            let mut threshold = (value + next) / 2.0;
            if threshold >= next {
                // Adjacent floats can round the midpoint up; keep the
                // train-time partition consistent with `<= threshold`.
                threshold = value;
            }
            // Strict > keeps the first candidate: lowest feature index, then
            // lowest threshold, per the declared tie rules.
            if best.as_ref().is_none_or(|b| gain > b.gain) {
                best = Some(BestSplit {
                    feature,
                    threshold,
                    gain,
                });
            }
        }
    }
    best
}

pub(crate) fn grow_tree(
    x: &[Vec<f64>],
    y: &[f64],
    samples: Vec<usize>,
    task: Task,
    max_depth: usize,
    min_samples_leaf: usize,
    sampler: &mut FeatureSampler,
) -> Vec<Node> {
    let d = x[0].len();
    let mut nodes = Vec::new();
    build(
        x,
        y,
        samples,
        task,
        max_depth,
        min_samples_leaf,
        sampler,
        d,
        0,
        &mut nodes,
    );
    nodes
}

#[allow(clippy::too_many_arguments)]
fn build(
    x: &[Vec<f64>],
    y: &[f64],
    samples: Vec<usize>,
    task: Task,
    max_depth: usize,
    min_samples_leaf: usize,
    sampler: &mut FeatureSampler,
    d: usize,
    depth: usize,
    nodes: &mut Vec<Node>,
) -> usize {
    let targets: Vec<f64> = samples.iter().map(|&i| y[i]).collect();
    let impurity = impurity_of(task, &targets);
    let n_samples = samples.len();

    let pure = targets.windows(2).all(|w| w[0] == w[1]);
    let can_split = depth < max_depth && n_samples >= 2 * min_samples_leaf && !pure;

    let split = if can_split {
        let features = sampler.draw(d);
        best_split(x, y, &samples, &features, task, min_samples_leaf, impurity)
    } else {
        None
    };

    let idx = nodes.len();
    match split {
        None => {
            nodes.push(Node::Leaf {
                value: leaf_value(task, &targets),
                impurity,
                n_samples,
            });
        }
        Some(s) => {
            nodes.push(Node::Split {
                feature: s.feature,
                threshold: s.threshold,
                left: 0,
                right: 0,
                impurity,
                n_samples,
            });
            let (left_samples, right_samples): (Vec<usize>, Vec<usize>) = samples
                .into_iter()
                .partition(|&i| x[i][s.feature] <= s.threshold);
            let left = build(
                x, y, left_samples, task, max_depth, min_samples_leaf, sampler, d,
                depth + 1, nodes,
            );
            let right = build(
                x, y, right_samples, task, max_depth, min_samples_leaf, sampler, d,
                depth + 1, nodes,
            );
            if let Node::Split {
                left: l, right: r, ..
            } = &mut nodes[idx]
            {
                *l = left;
                *r = right;
            }
        }
    }
    idx
}

/// Fit a CART tree on all features.
pub fn fit_decision_tree(
    train: &Dataset,
    max_depth: usize,
    min_samples_leaf: usize,
) -> Result<TreeModel> {
    if train.n() == 0 {
        return Err(Error::Argument("empty training set".into()));
    }
    if min_samples_leaf == 0 {
        return Err(Error::Argument("min_samples_leaf must be at least 1".into()));
    }
    let samples: Vec<usize> = (0..train.n()).collect();
    let nodes = grow_tree(
        &train.x,
        &train.y,
        samples,
        train.task,
        max_depth,
        min_samples_leaf,
        &mut FeatureSampler::All,
    );
    Ok(TreeModel {
        nodes,
        n_features: train.d(),
        task: train.task,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
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
    fn axis_separable_data_needs_one_split() {
        let x: Vec<Vec<f64>> = (-10..10).map(|i| vec![f64::from(i) + 0.5]).collect();
        let y: Vec<f64> = x.iter().map(|r| f64::from(u8::from(r[0] >= 0.0))).collect();
        let ds = dataset(x.clone(), y.clone(), Task::Classification);
        let tree = fit_decision_tree(&ds, 8, 1).unwrap();
        let splits = tree
            .nodes
            .iter()
            .filter(|n| matches!(n, Node::Split { .. }))
            .count();
        assert_eq!(splits, 1);
        assert_eq!(tree.predict(&x), y);
    }

    #[test]
    fn pure_labels_give_a_single_leaf() {
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![f64::from(i)]).collect();
        let ds = dataset(x, vec![1.0; 12], Task::Classification);
        let tree = fit_decision_tree(&ds, 8, 1).unwrap();
        assert_eq!(tree.nodes.len(), 1);
        assert!(matches!(tree.nodes[0], Node::Leaf { .. }));

        // Same for a constant regression target.
        let x: Vec<Vec<f64>> = (0..12).map(|i| vec![f64::from(i)]).collect();
        let ds = dataset(x, vec![0.1; 12], Task::Regression);
        let tree = fit_decision_tree(&ds, 8, 1).unwrap();
        assert_eq!(tree.nodes.len(), 1);
    }

    /// Exhaustive oracle: enumerate every (feature, boundary) pair with
    /// direct two-pass impurities, applying the same tie rules.
    fn oracle_root_split(
        x: &[Vec<f64>],
        y: &[f64],
        task: Task,
        min_samples_leaf: usize,
    ) -> Option<(usize, f64, f64)> {
        let parent = impurity_of(task, y);
        let n = y.len();
        let mut best: Option<(usize, f64, f64)> = None;
        for feature in 0..x[0].len() {
            let mut values: Vec<f64> = x.iter().map(|r| r[feature]).collect();
            values.sort_unstable_by(f64::total_cmp);
            values.dedup();
            for pair in values.windows(2) {
                let mut t = (pair[0] + pair[1]) / 2.0;
                if t >= pair[1] {
                    t = pair[0];
                }
                let left: Vec<f64> = (0..n).filter(|&i| x[i][feature] <= t).map(|i| y[i]).collect();
                let right: Vec<f64> = (0..n).filter(|&i| x[i][feature] > t).map(|i| y[i]).collect();
                if left.len() < min_samples_leaf || right.len() < min_samples_leaf {
                    continue;
                }
                let weighted = (left.len() as f64 * impurity_of(task, &left)
                    + right.len() as f64 * impurity_of(task, &right))
                    / n as f64;
                let gain = parent - weighted;
                if gain <= 0.0 {
                    continue;
                }
                let better = match &best {
                    None => true,
                    Some((bf, bt, bg)) => {
                        gain > *bg + 1e-12
                            || ((gain - bg).abs() <= 1e-12
                                && (feature < *bf || (feature == *bf && t < *bt)))
                    }
                };
                if better {
                    best = Some((feature, t, gain));
                }
            }
        }
        best
    }

    #[test]
    fn root_split_matches_exhaustive_oracle() {
        let mut rng = stream(19, "cart-oracle", 0);
        for trial in 0..60 {
            let n = rng.gen_range(6..=20);
            let d = rng.gen_range(1..=3);
            let task = if trial % 2 == 0 {
                Task::Classification
            } else {
                Task::Regression
            };
            let x: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.gen_range(-4.0..4.0)).collect())
                .collect();
            let y: Vec<f64> = match task {
                Task::Classification => (0..n).map(|_| f64::from(rng.gen_range(0..2))).collect(),
                Task::Regression => (0..n).map(|_| rng.gen_range(-10.0..10.0)).collect(),
            };
            let min_leaf = rng.gen_range(1..=2);

            let expected = oracle_root_split(&x, &y, task, min_leaf);
            let ds = dataset(x, y, task);
            let tree = fit_decision_tree(&ds, 1, min_leaf).unwrap();
            match (&tree.nodes[0], expected) {
                (Node::Leaf { .. }, None) => {}
                (
                    Node::Split {
                        feature, threshold, ..
                    },
                    Some((ef, et, _)),
                ) => {
                    assert_eq!(*feature, ef, "trial {trial}");
                    assert_eq!(*threshold, et, "trial {trial}");
                }
                (node, expected) => {
                    panic!("trial {trial}: tree {node:?} vs oracle {expected:?}")
                }
            }
        }
    }

    #[test]
    fn depth_and_leaf_limits_hold() {
        let mut rng = stream(20, "cart-limits", 0);
        let n = 200;
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..3).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..1.0)).collect();
        let ds = dataset(x, y, Task::Regression);
        let tree = fit_decision_tree(&ds, 3, 10).unwrap();
        // Depth check by walking from the root.
        fn depth_of(nodes: &[Node], idx: usize) -> usize {
            match &nodes[idx] {
                Node::Leaf { .. } => 0,
                Node::Split { left, right, .. } => {
                    1 + depth_of(nodes, *left).max(depth_of(nodes, *right))
                }
            }
        }
        assert!(depth_of(&tree.nodes, 0) <= 3);
        for node in &tree.nodes {
            if let Node::Leaf { n_samples, .. } = node {
                assert!(*n_samples >= 10);
            }
        }
    }

    #[test]
    fn children_impurities_never_exceed_parent() {
        let mut rng = stream(21, "cart-gain", 0);
        let n = 150;
        let x: Vec<Vec<f64>> = (0..n)
            .map(|_| (0..4).map(|_| rng.gen_range(0.0..1.0)).collect())
            .collect();
        let y: Vec<f64> = (0..n).map(|_| f64::from(rng.gen_range(0..2))).collect();
        let ds = dataset(x, y, Task::Classification);
        let tree = fit_decision_tree(&ds, 16, 1).unwrap();
        for node in &tree.nodes {
            if let Node::Split {
                left,
                right,
                impurity,
                n_samples,
                ..
            } = node
            {
                let l = &tree.nodes[*left];
                let r = &tree.nodes[*right];
                let weighted = (l.n_samples() as f64 * l.impurity()
                    + r.n_samples() as f64 * r.impurity())
                    / *n_samples as f64;
                assert!(weighted <= impurity + 1e-9);
            }
        }
    }

    #[test]
    fn score_is_leaf_fraction() {
        // Force a leaf with fractions (0.25, 0.75): three 1s and one 0 on the
        // right side of a clear split.
        let x = vec![
            vec![0.0],
            vec![0.1],
            vec![5.0],
            vec![5.1],
            vec![5.2],
            vec![5.3],
        ];
        let y = vec![0.0, 0.0, 1.0, 1.0, 1.0, 0.0];
        let ds = dataset(x, y, Task::Classification);
        let tree = fit_decision_tree(&ds, 1, 2).unwrap();
        let scores = tree.predict_score(&[vec![6.0], vec![-1.0]]).unwrap();
        assert!((scores[0] - 0.75).abs() < 1e-12);
        assert_eq!(scores[1], 0.0);
        // Regression trees have no scores.
        let ds = dataset(vec![vec![0.0], vec![1.0]], vec![0.0, 2.0], Task::Regression);
        let tree = fit_decision_tree(&ds, 1, 1).unwrap();
        assert!(tree.predict_score(&[vec![0.5]]).is_err());
    }

    #[test]
    fn empty_training_set_is_rejected() {
        let ds = dataset(vec![vec![1.0]], vec![1.0], Task::Regression);
        assert!(fit_decision_tree(&ds.subset(&[]), 4, 1).is_err());
    }
}
