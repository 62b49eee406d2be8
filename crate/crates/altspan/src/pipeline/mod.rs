//! End-to-end orchestration: ingest, metrics, clustering, per-cluster
//! training and evaluation, and report emission, with per-stage derived seeds
//! and a run manifest.

pub mod config;
pub mod manifest;
pub mod report;
pub mod stages;

pub use config::RunConfig;
pub use manifest::RunManifest;
pub use stages::{run_pipeline, run_stage, Stage};
