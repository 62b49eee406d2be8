//! Longevity analytics for scholarly online mentions.
//!
//! `altspan` ingests altmetric-style mention records, derives the *Online
//! Age* of each article (months between its first and last online mention),
//! identifies the actively-discussed article set, clusters publication years
//! by yearly mention volume, and trains classical machine-learning models —
//! all implemented from scratch — that predict long-term online interest per
//! cluster, as regression on Online Age and as classification against each
//! cluster's median.
//!
//! The `examples/` directory is the best starting point; each example is a
//! runnable walkthrough of one capability:
//!
//! ```bash
//! cargo run --release --example synthesize_corpus
//! cargo run --release --example ingest_and_stats
//! cargo run --release --example longevity_metrics
//! cargo run --release --example cluster_years
//! cargo run --release --example train_and_evaluate
//! cargo run --release --example feature_importance
//! cargo run --release --example model_persistence
//! cargo run --release --example full_pipeline
//! ```
//!
//! A thin `altspan` binary exposes the same stages as subcommands
//! (`synth`, `ingest`, `metrics`, `cluster`, `train`, `evaluate`, `report`,
//! `run-all`) for scripted use.
//!
//! Everything is seeded: one run seed is expanded through named streams
//! ([`rng::derive_seed`]) so every stage, restart, tree, and synthetic article
//! is reproducible in isolation, and repeated runs are byte-identical.

pub mod cluster;
pub mod date;
pub mod error;
pub mod eval;
pub mod ingest;
pub mod longevity;
pub mod model;
pub mod pipeline;
pub mod platform;
pub mod record;
pub mod rng;
pub mod synth;

pub use date::Date;
pub use error::{Error, Result};
pub use platform::{PlatformId, ALL_PLATFORMS, N_PLATFORMS};
pub use record::ArticleRecord;
