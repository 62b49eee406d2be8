//! Train every model family on planted data and evaluate on a held-out
//! split: regression on a smooth target, classification on a threshold rule,
//! with 5-fold cross-validated tuning for the tree families.
//!
//! ```bash
//! cargo run --release --example train_and_evaluate
//! ```

use altspan::eval::{classification_metrics, regression_metrics};
use altspan::model::{
    apply_standardizer, fit_standardizer, fit_with_params, kfold_grid_search, train_test_split,
    Dataset, HyperGrid, MlpConfig, ModelFamily, ModelParams, Task,
};
use altspan::platform::PlatformId;
use altspan::synth::{generate_planted_supervised, PlantedRelation};

fn main() -> altspan::Result<()> {
    // Regression: a smooth function of twitter and mendeley counts.
    let (ds, _) = generate_planted_supervised(
        2_000,
        &[PlatformId::Twitter, PlatformId::Mendeley],
        &PlantedRelation::Smooth,
        0.5,
        1,
    )?;
    let split = train_test_split(ds.n(), 0.8, 2, None)?;
    let train = ds.subset(&split.train);
    let test = ds.subset(&split.test);
    let scaler = fit_standardizer(&train.x)?;

    println!("regression (smooth planted target):");
    println!("  model                        mae     rmse    r^2");
    for family in [ModelFamily::Linear, ModelFamily::Tree, ModelFamily::Forest, ModelFamily::Mlp] {
        let scaled = matches!(family, ModelFamily::Linear | ModelFamily::Mlp);
        let train_view = Dataset::new(
            train.feature_names.clone(),
            if scaled { apply_standardizer(&scaler, &train.x) } else { train.x.clone() },
            train.y.clone(),
            Task::Regression,
            "example".into(),
        )?;
        let model = match family {
            // Tree families go through 5-fold cross-validated tuning.
            ModelFamily::Tree | ModelFamily::Forest => {
                kfold_grid_search(&HyperGrid::default_for(family, Task::Regression), &train_view, 5, 7)?.model
            }
            ModelFamily::Linear => fit_with_params(&train_view, &ModelParams::Linear, 7)?,
            ModelFamily::Mlp => fit_with_params(&train_view, &ModelParams::Mlp(MlpConfig::default()), 7)?,
            _ => unreachable!(),
        };
        let test_x = if scaled { apply_standardizer(&scaler, &test.x) } else { test.x.clone() };
        let m = regression_metrics(&test.y, &model.predict(&test_x)?)?;
        println!(
            "  {:<27} {:>6.3}  {:>6.3}  {:>5.3}",
            family.display_name(),
            m.mae,
            m.rmse,
            m.r_squared.unwrap_or(f64::NAN)
        );
    }

    // Classification: label 1 when the patent count clears a cutoff.
    let (ds, _) = generate_planted_supervised(
        2_000,
        &[PlatformId::Patent],
        &PlantedRelation::Threshold { cutoff: 4.0 },
        1.0,
        2,
    )?;
    let split = train_test_split(ds.n(), 0.8, 3, Some(&ds.labels()))?;
    let train = ds.subset(&split.train);
    let test = ds.subset(&split.test);
    let scaler = fit_standardizer(&train.x)?;

    println!("\nclassification (patent-threshold labels):");
    println!("  model                        acc     wP      wR      wF1");
    for family in [ModelFamily::Logistic, ModelFamily::Gnb, ModelFamily::Tree, ModelFamily::Forest] {
        let scaled = matches!(family, ModelFamily::Logistic);
        let train_view = Dataset::new(
            train.feature_names.clone(),
            if scaled { apply_standardizer(&scaler, &train.x) } else { train.x.clone() },
            train.y.clone(),
            Task::Classification,
            "example".into(),
        )?;
        let cv = kfold_grid_search(&HyperGrid::default_for(family, Task::Classification), &train_view, 5, 8)?;
        let test_x = if scaled { apply_standardizer(&scaler, &test.x) } else { test.x.clone() };
        let m = classification_metrics(&test.y, &cv.model.predict(&test_x)?)?;
        println!(
            "  {:<27} {:>5.3}  {:>5.3}  {:>5.3}  {:>5.3}   (chose {:?})",
            family.display_name(),
            m.accuracy,
            m.weighted_precision,
            m.weighted_recall,
            m.weighted_f1,
            cv.chosen_params()
        );
    }
    Ok(())
}
