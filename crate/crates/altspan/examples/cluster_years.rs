//! Cluster publication years by yearly mention volume: the inertia curve,
//! the elbow choice of k, and the per-cluster bookkeeping.
//!
//! ```bash
//! cargo run --release --example cluster_years
//! ```

use std::collections::BTreeSet;

use altspan::cluster::{assign_year_clusters, detect_elbow, ClusterOptions};
use altspan::ingest::PubWindow;
use altspan::longevity::active_set;
use altspan::synth::{generate_corpus, SynthConfig};

fn main() -> altspan::Result<()> {
    let config = SynthConfig {
        n_articles: 6_000,
        seed: 3,
        ..SynthConfig::default()
    };
    let (records, _) = generate_corpus(&config)?;
    let window = PubWindow::new(1920, 2016)?;
    let active_ids: BTreeSet<String> = active_set(&records, 2018, 3, window)?
        .iter()
        .map(|(r, _)| r.article_id().to_string())
        .collect();

    let model = assign_year_clusters(
        &records,
        &active_ids,
        &ClusterOptions {
            seed: 42,
            ..ClusterOptions::default()
        },
    )?;

    println!("inertia curve (best of 10 restarts per k):");
    for (&k, &inertia) in model.elbow.k_values.iter().zip(&model.elbow.inertias) {
        let bar = "#".repeat((inertia / model.elbow.inertias[0] * 40.0).ceil() as usize);
        println!("  k={k:<2} {inertia:>10.4}  {bar}");
    }
    println!("elbow chooses k = {}", detect_elbow(&model.elbow)?);

    println!("\ncluster  years        articles  mentions  active");
    for spec in &model.specs {
        println!(
            "{:>7}  {}-{}    {:>7}  {:>8}  {:>6}",
            spec.cluster_id, spec.year_min, spec.year_max, spec.n_articles,
            spec.n_online_mentions, spec.n_active
        );
    }
    if !model.contiguous {
        println!("(warning: some cluster year sets are non-contiguous)");
    }
    Ok(())
}
