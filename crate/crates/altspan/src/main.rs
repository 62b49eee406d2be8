//! Thin CLI over the altspan library: stage subcommands, a monolithic
//! `run-all`, and the synthetic-corpus generator.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use altspan::error::{Error, Result};
use altspan::pipeline::{run_pipeline, run_stage, RunConfig, Stage};
use altspan::synth::{generate_corpus, SynthConfig};

#[derive(Parser)]
#[command(name = "altspan", version, about = "Longevity analytics for scholarly online mentions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Default)]
struct ConfigFlags {
    /// Flat key = value config file; flags below override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// JSON-lines corpus to ingest.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Artifact directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run seed; every stage derives its own stream from it.
    #[arg(long)]
    seed: Option<u64>,
    /// First publication year kept.
    #[arg(long)]
    pub_start: Option<i32>,
    /// Last publication year kept.
    #[arg(long)]
    pub_end: Option<i32>,
    /// Last year an active article must be mentioned through.
    #[arg(long)]
    horizon: Option<i32>,
    /// Distinct platforms required per year for activity.
    #[arg(long)]
    min_platforms: Option<usize>,
    /// Fixed cluster count, skipping elbow selection.
    #[arg(long)]
    k: Option<usize>,
    /// Largest k scanned by the elbow method.
    #[arg(long)]
    k_max: Option<usize>,
    /// Comma-separated model families (linear,tree,forest,mlp,logistic,gnb).
    #[arg(long)]
    models: Option<String>,
    /// Cluster on (mentions, year) instead of mentions alone.
    #[arg(long)]
    cluster_with_year: bool,
}

impl ConfigFlags {
    fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(path) => RunConfig::parse_file(path)?,
            None => RunConfig::default(),
        };
        if let Some(v) = &self.input {
            config.input = v.clone();
        }
        if let Some(v) = &self.out {
            config.out = v.clone();
        }
        if let Some(v) = self.seed {
            config.seed = v;
        }
        if let Some(v) = self.pub_start {
            config.pub_start = v;
        }
        if let Some(v) = self.pub_end {
            config.pub_end = v;
        }
        if let Some(v) = self.horizon {
            config.horizon = v;
        }
        if let Some(v) = self.min_platforms {
            config.min_platforms = v;
        }
        if let Some(v) = self.k {
            config.k = Some(v);
        }
        if let Some(v) = self.k_max {
            config.k_max = v;
        }
        if let Some(v) = &self.models {
            config.set_models(v)?;
        }
        if self.cluster_with_year {
            config.cluster_with_year = true;
        }
        Ok(config)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic corpus with planted ground truth.
    Synth {
        /// Corpus output path (JSON lines); ground_truth.json lands beside it.
        #[arg(long)]
        out: PathBuf,
        /// Number of articles.
        #[arg(long, default_value_t = 10_000)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Parse and window-filter the input corpus.
    Ingest(ConfigFlags),
    /// Online Age, active flags, growth series, platform shares.
    Metrics(ConfigFlags),
    /// K-means year clusters with elbow selection.
    Cluster(ConfigFlags),
    /// Per-cluster model training with cross-validated tuning.
    Train(ConfigFlags),
    /// Test-split metrics, ROC curves, and feature importances.
    Evaluate(ConfigFlags),
    /// Growth and summary report files.
    Report(ConfigFlags),
    /// Every stage in order.
    RunAll(ConfigFlags),
}

fn synth_command(out: &Path, n: usize, seed: u64) -> Result<()> {
    let config = SynthConfig {
        n_articles: n,
        seed,
        ..SynthConfig::default()
    };
    let (records, truth) = generate_corpus(&config)?;
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    altspan::ingest::write_corpus(out, &records)?;
    let truth_path = out.with_file_name("ground_truth.json");
    let json = serde_json::to_string_pretty(&truth)
        .map_err(|e| Error::Internal(format!("ground truth serialization: {e}")))?;
    std::fs::write(&truth_path, json + "\n").map_err(|e| Error::io(&truth_path, e))?;
    eprintln!(
        "wrote {} articles to {} (+ {})",
        records.len(),
        out.display(),
        truth_path.display()
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Synth { out, n, seed } => synth_command(&out, n, seed),
        Command::Ingest(flags) => run_stage(&flags.resolve()?, Stage::Ingest),
        Command::Metrics(flags) => run_stage(&flags.resolve()?, Stage::Metrics),
        Command::Cluster(flags) => run_stage(&flags.resolve()?, Stage::Cluster),
        Command::Train(flags) => run_stage(&flags.resolve()?, Stage::Train),
        Command::Evaluate(flags) => run_stage(&flags.resolve()?, Stage::Evaluate),
        Command::Report(flags) => run_stage(&flags.resolve()?, Stage::Report),
        Command::RunAll(flags) => run_pipeline(&flags.resolve()?),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
