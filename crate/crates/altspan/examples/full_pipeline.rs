//! The whole workflow in one call: synthesize a corpus, run every stage, and
//! print the report tables from the artifact directory.
//!
//! ```bash
//! cargo run --release --example full_pipeline
//! ```

use altspan::pipeline::{run_pipeline, RunConfig};
use altspan::synth::{generate_corpus, SynthConfig};

fn main() -> altspan::Result<()> {
    let dir = std::env::temp_dir().join("altspan-example-pipeline");
    std::fs::create_dir_all(&dir).map_err(|e| altspan::Error::io(&dir, e))?;

    let corpus_path = dir.join("corpus.jsonl");
    let (records, _) = generate_corpus(&SynthConfig {
        n_articles: 5_000,
        seed: 7,
        ..SynthConfig::default()
    })?;
    altspan::ingest::write_corpus(&corpus_path, &records)?;

    let config = RunConfig {
        input: corpus_path,
        out: dir.join("out"),
        seed: 42,
        ..RunConfig::default()
    };
    run_pipeline(&config)?;
    println!("artifacts in {}", config.out.display());

    for table in [
        "clusters.csv",
        "medians.csv",
        "regression_results.csv",
        "classification_results.csv",
        "summary.csv",
    ] {
        let text = std::fs::read_to_string(config.out.join(table))
            .map_err(|e| altspan::Error::io(config.out.join(table), e))?;
        println!("\n--- {table} ---\n{}", text.trim_end());
    }
    Ok(())
}
