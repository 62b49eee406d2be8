//! Gini feature importance and ROC curves from a planted-signal forest.
//!
//! ```bash
//! cargo run --release --example feature_importance
//! ```

use altspan::eval::{gini_importance, roc_auc, top_k_features};
use altspan::model::{fit_with_params, train_test_split, FeatureRule, ModelParams};
use altspan::platform::{PlatformId, ALL_PLATFORMS};
use altspan::synth::{generate_planted_supervised, PlantedRelation};

fn main() -> altspan::Result<()> {
    let (ds, truth) = generate_planted_supervised(
        3_000,
        &[PlatformId::Patent],
        &PlantedRelation::Threshold { cutoff: 4.0 },
        0.5,
        5,
    )?;
    println!("planted informative platforms: {:?}", truth.informative);

    let split = train_test_split(ds.n(), 0.8, 1, Some(&ds.labels()))?;
    let train = ds.subset(&split.train);
    let test = ds.subset(&split.test);
    let forest = fit_with_params(
        &train,
        &ModelParams::Forest {
            n_trees: 100,
            max_depth: 16,
            min_samples_leaf: 1,
            feature_rule: FeatureRule::Sqrt,
        },
        9,
    )?;

    let importance = gini_importance(&forest)?;
    println!("\ntop 10 features by Gini importance:");
    for (rank, (idx, weight)) in top_k_features(&importance, 10).iter().enumerate() {
        let bar = "#".repeat((weight * 60.0).ceil() as usize);
        println!("{:>2}. {:<13} {weight:.4}  {bar}", rank + 1, ALL_PLATFORMS[*idx].as_str());
    }

    let scores = forest.predict_score(&test.x)?;
    let roc = roc_auc(&test.y, &scores)?;
    println!("\nROC: {} points, AUC {:.4}", roc.points.len(), roc.auc);
    println!("curve sample (fpr, tpr):");
    let step = (roc.points.len() / 8).max(1);
    for point in roc.points.iter().step_by(step) {
        println!("  ({:.3}, {:.3})", point.0, point.1);
    }
    Ok(())
}
