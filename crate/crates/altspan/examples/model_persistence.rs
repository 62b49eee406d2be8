//! Save a trained model to the versioned JSON format and load it back,
//! including the feature-name order check.
//!
//! ```bash
//! cargo run --release --example model_persistence
//! ```

use altspan::model::{
    fit_standardizer, fit_with_params, ModelFamily, ModelParams, SavedModel,
    MODEL_FORMAT_VERSION,
};
use altspan::platform::PlatformId;
use altspan::synth::{generate_planted_supervised, PlantedRelation};

fn main() -> altspan::Result<()> {
    let (ds, _) = generate_planted_supervised(
        500,
        &[PlatformId::News],
        &PlantedRelation::Linear {
            coeffs: vec![3.0],
            intercept: 10.0,
        },
        0.5,
        4,
    )?;
    let scaler = fit_standardizer(&ds.x)?;
    let params = ModelParams::Tree {
        max_depth: 8,
        min_samples_leaf: 5,
    };
    let model = fit_with_params(&ds, &params, 17)?;

    let saved = SavedModel {
        format_version: MODEL_FORMAT_VERSION,
        family: ModelFamily::Tree,
        params,
        feature_names: PlatformId::names(),
        seed: 17,
        scaler: Some(scaler),
        model,
    };
    let path = std::env::temp_dir().join("altspan-example-model.json");
    saved.save(&path)?;
    println!("saved {} ({} bytes)", path.display(), std::fs::metadata(&path).unwrap().len());

    let loaded = SavedModel::load(&path, &PlatformId::names())?;
    println!(
        "loaded a {} (format v{}, seed {})",
        loaded.family.display_name(),
        loaded.format_version,
        loaded.seed
    );
    let probe = vec![vec![5.0; 21]];
    assert_eq!(loaded.model.predict(&probe)?, saved.model.predict(&probe)?);
    println!("predictions identical before and after the round trip");

    // A permuted feature order must be rejected.
    let mut shuffled = PlatformId::names();
    shuffled.swap(0, 20);
    match SavedModel::load(&path, &shuffled) {
        Err(err) => println!("reordered features rejected as expected: {err}"),
        Ok(_) => panic!("feature-name order check failed to fire"),
    }
    Ok(())
}
