//! The staged workflow: ingest -> metrics -> cluster -> train -> evaluate ->
//! report. Each stage consumes the previous stage's on-disk artifacts and
//! derives its seed from (run seed, stage name), so running stages one at a
//! time produces byte-identical artifacts to one monolithic run.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::cluster::{assign_year_clusters, ClusterOptions};
use crate::date::Date;
use crate::error::{Error, Result};
use crate::eval::{
    classification_metrics, gini_importance, regression_metrics, roc_auc, top_k_features,
};
use crate::ingest::{load_corpus, write_corpus, PubWindow};
use crate::longevity::{
    longevity_records, median_threshold_labels, platform_share_matrix, yearly_series,
    LongevityRecord,
};
use crate::model::{
    apply_params_scaler, fit_with_params, kfold_grid_search, train_test_split, Dataset,
    MlpConfig, ModelFamily, ModelParams, SavedModel, ScalerParams, Task, TrainedModel,
    MODEL_FORMAT_VERSION,
};
use crate::platform::{PlatformId, ALL_PLATFORMS};
use crate::record::ArticleRecord;
use crate::rng::derive_seed;

use super::config::RunConfig;
use super::manifest::{file_digest, RunManifest, StageRecord};
use super::report::{fmt_sig, read_csv, Table};

pub const RECORDS_FILE: &str = "records.jsonl";
pub const CORPUS_STATS_FILE: &str = "corpus_stats.json";
pub const SPLITS_FILE: &str = "splits.json";
pub const MODELS_DIR: &str = "models";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Metrics,
    Cluster,
    Train,
    Evaluate,
    Report,
}

impl Stage {
    pub const ALL: [Stage; 6] = [
        Stage::Ingest,
        Stage::Metrics,
        Stage::Cluster,
        Stage::Train,
        Stage::Evaluate,
        Stage::Report,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Metrics => "metrics",
            Stage::Cluster => "cluster",
            Stage::Train => "train",
            Stage::Evaluate => "evaluate",
            Stage::Report => "report",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Stage::ALL
            .into_iter()
            .find(|stage| stage.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown stage {s:?}")))
    }

    /// The stage seed: derived from the run seed and the stage name, so
    /// inserting a stage never perturbs the others.
    pub fn seed(self, config: &RunConfig) -> u64 {
        derive_seed(config.seed, self.name(), 0)
    }

    fn declared_inputs(self, config: &RunConfig) -> Vec<PathBuf> {
        let out = |name: &str| config.out.join(name);
        match self {
            Stage::Ingest => vec![config.input.clone()],
            Stage::Metrics => vec![out(RECORDS_FILE)],
            Stage::Cluster => vec![out(RECORDS_FILE), out("longevity.csv")],
            Stage::Train => vec![
                out(RECORDS_FILE),
                out("longevity.csv"),
                out("year_clusters.csv"),
            ],
            Stage::Evaluate => vec![
                out(RECORDS_FILE),
                out("longevity.csv"),
                out("year_clusters.csv"),
                out("medians.csv"),
                out(SPLITS_FILE),
            ],
            Stage::Report => vec![
                out("yearly_series.csv"),
                out("clusters.csv"),
                out("medians.csv"),
            ],
        }
    }

    fn execute(self, config: &RunConfig, seed: u64) -> Result<Vec<PathBuf>> {
        match self {
            Stage::Ingest => stage_ingest(config),
            Stage::Metrics => stage_metrics(config),
            Stage::Cluster => stage_cluster(config, seed),
            Stage::Train => stage_train(config, seed),
            Stage::Evaluate => stage_evaluate(config),
            Stage::Report => stage_report(config),
        }
    }
}

/// Run one stage with manifest bookkeeping.
pub fn run_stage(config: &RunConfig, stage: Stage) -> Result<()> {
    config.validate(stage == Stage::Ingest)?;
    std::fs::create_dir_all(&config.out).map_err(|e| Error::io(&config.out, e))?;

    let mut manifest = RunManifest::load_or_new(&config.out, config);
    let seed = stage.seed(config);
    let started = Instant::now();

    let digest_list = |paths: &[PathBuf]| -> Vec<(String, String)> {
        paths
            .iter()
            .filter(|p| p.is_file())
            .map(|p| {
                (
                    p.file_name().unwrap_or_default().to_string_lossy().into_owned(),
                    file_digest(p).unwrap_or_else(|_| "unreadable".into()),
                )
            })
            .collect()
    };
    let inputs = digest_list(&stage.declared_inputs(config));

    match stage.execute(config, seed) {
        Ok(outputs) => {
            manifest.upsert_stage(StageRecord {
                name: stage.name().into(),
                seed,
                inputs,
                outputs: digest_list(&outputs),
                wall_ms: started.elapsed().as_millis() as u64,
                status: "ok".into(),
            });
            manifest.save(&config.out)?;
            Ok(())
        }
        Err(err) => {
            manifest.upsert_stage(StageRecord {
                name: stage.name().into(),
                seed,
                inputs,
                outputs: vec![],
                wall_ms: started.elapsed().as_millis() as u64,
                status: format!("failed: {err}"),
            });
            manifest.save(&config.out)?;
            Err(err)
        }
    }
}

/// Run every stage in order; stops at the first failure, which stays marked
/// in the manifest alongside any partial outputs.
pub fn run_pipeline(config: &RunConfig) -> Result<()> {
    for stage in Stage::ALL {
        run_stage(config, stage)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Stage bodies
// ---------------------------------------------------------------------------

fn stage_ingest(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let window = PubWindow::new(config.pub_start, config.pub_end)?;
    let (records, stats) = load_corpus(&config.input, window)?;

    let records_path = config.out.join(RECORDS_FILE);
    write_corpus(&records_path, &records)?;
    let stats_path = config.out.join(CORPUS_STATS_FILE);
    let json = serde_json::to_string_pretty(&stats)
        .map_err(|e| Error::Internal(format!("stats serialization: {e}")))?;
    std::fs::write(&stats_path, json + "\n").map_err(|e| Error::io(&stats_path, e))?;
    Ok(vec![records_path, stats_path])
}

fn load_kept_records(config: &RunConfig) -> Result<Vec<ArticleRecord>> {
    let path = config.out.join(RECORDS_FILE);
    if !path.is_file() {
        return Err(Error::Dependency(path.display().to_string()));
    }
    let window = PubWindow::new(config.pub_start, config.pub_end)?;
    let (records, stats) = load_corpus(&path, window)?;
    if stats.n_malformed > 0 {
        return Err(Error::Validation(format!(
            "{} malformed lines in canonical {}",
            stats.n_malformed,
            path.display()
        )));
    }
    Ok(records)
}

fn stage_metrics(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let records = load_kept_records(config)?;
    let longevity = longevity_records(&records, config.horizon, config.min_platforms)?;

    let mut table = Table::new(&[
        "article_id",
        "first_online_mention",
        "last_online_mention",
        "online_age_months",
        "active",
    ]);
    for lr in &longevity {
        table.push(vec![
            lr.article_id.clone(),
            lr.first_online_mention.to_string(),
            lr.last_online_mention.to_string(),
            lr.online_age_months.to_string(),
            u8::from(lr.active).to_string(),
        ]);
    }
    table.write(&config.out, "longevity")?;

    let series = yearly_series(&records);
    let mut table = Table::new(&["year", "published", "with_dates", "total_mentions"]);
    for (i, &year) in series.years.iter().enumerate() {
        table.push(vec![
            year.to_string(),
            series.published[i].to_string(),
            series.with_dates[i].to_string(),
            series.total_mentions[i].to_string(),
        ]);
    }
    table.write(&config.out, "yearly_series")?;

    let shares = platform_share_matrix(&records);
    let mut columns = vec!["year".to_string()];
    columns.extend(PlatformId::names());
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    for (i, &year) in shares.years.iter().enumerate() {
        let mut row = vec![year.to_string()];
        row.extend(shares.normalized[i].iter().map(|&v| fmt_sig(v)));
        table.push(row);
    }
    table.write(&config.out, "platform_shares")?;

    Ok(out_files(
        &config.out,
        &[
            "longevity.csv",
            "longevity.json",
            "yearly_series.csv",
            "yearly_series.json",
            "platform_shares.csv",
            "platform_shares.json",
        ],
    ))
}

fn load_longevity(config: &RunConfig) -> Result<Vec<LongevityRecord>> {
    let path = config.out.join("longevity.csv");
    let (_, rows) = read_csv(&path)?;
    rows.iter()
        .map(|row| {
            if row.len() != 5 {
                return Err(Error::Validation(format!(
                    "{}: malformed row {row:?}",
                    path.display()
                )));
            }
            Ok(LongevityRecord {
                article_id: row[0].clone(),
                first_online_mention: Date::parse_iso(&row[1])?,
                last_online_mention: Date::parse_iso(&row[2])?,
                online_age_months: row[3]
                    .parse()
                    .map_err(|_| Error::Validation(format!("bad age {:?}", row[3])))?,
                active: row[4] == "1",
            })
        })
        .collect()
}

fn load_year_clusters(config: &RunConfig) -> Result<BTreeMap<i32, usize>> {
    let path = config.out.join("year_clusters.csv");
    let (_, rows) = read_csv(&path)?;
    let mut map = BTreeMap::new();
    for row in rows {
        let [year, cluster] = row.as_slice() else {
            return Err(Error::Validation(format!(
                "{}: malformed row {row:?}",
                path.display()
            )));
        };
        let year: i32 = year
            .parse()
            .map_err(|_| Error::Validation(format!("bad year {year:?}")))?;
        let cluster: usize = cluster
            .parse()
            .map_err(|_| Error::Validation(format!("bad cluster {cluster:?}")))?;
        map.insert(year, cluster);
    }
    Ok(map)
}

fn stage_cluster(config: &RunConfig, seed: u64) -> Result<Vec<PathBuf>> {
    let records = load_kept_records(config)?;
    let longevity = load_longevity(config)?;
    let active_ids: BTreeSet<String> = longevity
        .iter()
        .filter(|lr| lr.active)
        .map(|lr| lr.article_id.clone())
        .collect();

    // Clustering runs on the dated subset, the analog of the filtered
    // modeling corpus.
    let dated_ids: BTreeSet<&str> = longevity.iter().map(|lr| lr.article_id.as_str()).collect();
    let dated: Vec<ArticleRecord> = records
        .iter()
        .filter(|r| dated_ids.contains(r.article_id()))
        .cloned()
        .collect();
    if dated.is_empty() {
        return Err(Error::Validation("no dated records to cluster".into()));
    }

    let model = assign_year_clusters(
        &dated,
        &active_ids,
        &ClusterOptions {
            k: config.k,
            k_max: config.k_max,
            seed,
            restarts: 10,
            max_iter: 300,
            with_year: config.cluster_with_year,
        },
    )?;

    let mut table = Table::new(&[
        "cluster",
        "year_min",
        "year_max",
        "n_articles",
        "n_online_mentions",
        "n_active",
    ]);
    for spec in &model.specs {
        table.push(vec![
            spec.cluster_id.to_string(),
            spec.year_min.to_string(),
            spec.year_max.to_string(),
            spec.n_articles.to_string(),
            spec.n_online_mentions.to_string(),
            spec.n_active.to_string(),
        ]);
    }
    table.write(&config.out, "clusters")?;

    let mut table = Table::new(&["k", "inertia"]);
    for (&k, &inertia) in model.elbow.k_values.iter().zip(&model.elbow.inertias) {
        table.push(vec![k.to_string(), fmt_sig(inertia)]);
    }
    table.write(&config.out, "elbow")?;

    let mut table = Table::new(&["year", "cluster"]);
    for (&year, &cluster) in &model.year_to_cluster {
        table.push(vec![year.to_string(), cluster.to_string()]);
    }
    table.write(&config.out, "year_clusters")?;

    if !model.contiguous {
        eprintln!("warning: non-contiguous year clusters (degenerate yearly totals)");
    }

    Ok(out_files(
        &config.out,
        &[
            "clusters.csv",
            "clusters.json",
            "elbow.csv",
            "elbow.json",
            "year_clusters.csv",
            "year_clusters.json",
        ],
    ))
}

/// Per-cluster modeling data: the active articles, in corpus order.
struct ClusterData {
    cluster_id: usize,
    x: Vec<Vec<f64>>,
    ages: Vec<u32>,
}

fn build_cluster_data(
    records: &[ArticleRecord],
    longevity: &[LongevityRecord],
    year_clusters: &BTreeMap<i32, usize>,
) -> Result<Vec<ClusterData>> {
    let active_ages: BTreeMap<&str, u32> = longevity
        .iter()
        .filter(|lr| lr.active)
        .map(|lr| (lr.article_id.as_str(), lr.online_age_months))
        .collect();
    let n_clusters = year_clusters.values().copied().max().map_or(0, |m| m + 1);
    let mut clusters: Vec<ClusterData> = (0..n_clusters)
        .map(|cluster_id| ClusterData {
            cluster_id,
            x: Vec::new(),
            ages: Vec::new(),
        })
        .collect();
    for record in records {
        let Some(&age) = active_ages.get(record.article_id()) else {
            continue;
        };
        let Some(&cluster) = year_clusters.get(&record.publication_year()) else {
            return Err(Error::Validation(format!(
                "{}: publication year {} missing from year_clusters.csv",
                record.article_id(),
                record.publication_year()
            )));
        };
        clusters[cluster]
            .x
            .push(record.counts().iter().map(|&c| c as f64).collect());
        clusters[cluster].ages.push(age);
    }
    Ok(clusters)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SplitEntry {
    cluster_id: usize,
    task: String,
    train: Vec<usize>,
    test: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct SplitsFile {
    splits: Vec<SplitEntry>,
}

fn task_tag(task: Task) -> &'static str {
    match task {
        Task::Regression => "regression",
        Task::Classification => "classification",
    }
}

fn model_file(cluster_id: usize, task: Task, family: ModelFamily) -> String {
    format!("c{cluster_id}_{}_{}.json", task_tag(task), family.id())
}

/// Families that consume standardized features.
fn needs_scaling(family: ModelFamily) -> bool {
    matches!(family, ModelFamily::Linear | ModelFamily::Mlp | ModelFamily::Logistic)
}

fn scale_if_needed(
    family: ModelFamily,
    scaler: &ScalerParams,
    x: &[Vec<f64>],
) -> Vec<Vec<f64>> {
    if needs_scaling(family) {
        crate::model::scale::apply_standardizer(scaler, x)
    } else {
        x.to_vec()
    }
}

fn stage_train(config: &RunConfig, seed: u64) -> Result<Vec<PathBuf>> {
    let records = load_kept_records(config)?;
    let longevity = load_longevity(config)?;
    let year_clusters = load_year_clusters(config)?;
    let clusters = build_cluster_data(&records, &longevity, &year_clusters)?;

    let models_dir = config.out.join(MODELS_DIR);
    std::fs::create_dir_all(&models_dir).map_err(|e| Error::io(&models_dir, e))?;

    let feature_names = PlatformId::names();
    let mut medians = Table::new(&["cluster", "year_min", "year_max", "median_online_age_months"]);
    let mut splits = SplitsFile { splits: Vec::new() };
    let mut outputs = Vec::new();

    for data in &clusters {
        let n = data.ages.len();
        if n < 10 {
            return Err(Error::Validation(format!(
                "cluster {} has only {n} active articles; too few to model",
                data.cluster_id
            )));
        }
        let labeling = median_threshold_labels(&data.ages)?;
        let (year_min, year_max) = cluster_year_range(&year_clusters, data.cluster_id);
        medians.push(vec![
            data.cluster_id.to_string(),
            year_min.to_string(),
            year_max.to_string(),
            labeling.median_months.to_string(),
        ]);

        for task in [Task::Regression, Task::Classification] {
            let y: Vec<f64> = match task {
                Task::Regression => data.ages.iter().map(|&a| f64::from(a)).collect(),
                Task::Classification => labeling.labels.iter().map(|&l| f64::from(l)).collect(),
            };
            let families: &[ModelFamily] = match task {
                Task::Regression => &config.regression_models,
                Task::Classification => &config.classification_models,
            };
            if families.is_empty() {
                continue;
            }
            if task == Task::Classification && labeling.labels.iter().all(|&l| l == 1) {
                return Err(Error::Validation(format!(
                    "cluster {}: every Online Age equals the median; labels are single-class",
                    data.cluster_id
                )));
            }

            let split_seed = derive_seed(seed, &format!("split-{}", task_tag(task)), data.cluster_id as u64);
            let stratify = match task {
                Task::Classification => Some(labeling.labels.clone()),
                Task::Regression => None,
            };
            let split = train_test_split(n, config.split_ratio, split_seed, stratify.as_deref())?;
            splits.splits.push(SplitEntry {
                cluster_id: data.cluster_id,
                task: task_tag(task).into(),
                train: split.train.clone(),
                test: split.test.clone(),
            });

            let train_x_raw: Vec<Vec<f64>> =
                split.train.iter().map(|&i| data.x[i].clone()).collect();
            let train_y: Vec<f64> = split.train.iter().map(|&i| y[i]).collect();
            let scaler = crate::model::scale::fit_standardizer(&train_x_raw)?;

            for &family in families {
                let fit_seed = derive_seed(
                    seed,
                    &format!("fit-c{}-{}-{}", data.cluster_id, task_tag(task), family.id()),
                    0,
                );
                let train_x = scale_if_needed(family, &scaler, &train_x_raw);
                let dataset = Dataset::new(
                    feature_names.clone(),
                    train_x,
                    train_y.clone(),
                    task,
                    data.cluster_id.to_string(),
                )?;

                // Cross-validated tuning for tree-family models (and every
                // classifier); single-configuration direct fits elsewhere.
                let tuned = match (task, family) {
                    (Task::Regression, ModelFamily::Linear) => None,
                    (Task::Regression, ModelFamily::Mlp) => None,
                    _ => Some(kfold_grid_search(
                        &config.grids.grid_for(family, task),
                        &dataset,
                        config.folds,
                        fit_seed,
                    )?),
                };
                let (params, model): (ModelParams, TrainedModel) = match tuned {
                    Some(cv) => (cv.chosen_params().clone(), cv.model),
                    None => {
                        let params = match family {
                            ModelFamily::Linear => ModelParams::Linear,
                            ModelFamily::Mlp => ModelParams::Mlp(MlpConfig::default()),
                            _ => unreachable!("only direct-fit families reach here"),
                        };
                        (params.clone(), fit_with_params(&dataset, &params, fit_seed)?)
                    }
                };

                let saved = SavedModel {
                    format_version: MODEL_FORMAT_VERSION,
                    family,
                    params,
                    feature_names: feature_names.clone(),
                    seed: fit_seed,
                    scaler: needs_scaling(family).then(|| scaler.clone()),
                    model,
                };
                let path = models_dir.join(model_file(data.cluster_id, task, family));
                saved.save(&path)?;
                outputs.push(path);
            }
        }
    }

    medians.write(&config.out, "medians")?;
    let splits_path = config.out.join(SPLITS_FILE);
    let json = serde_json::to_string_pretty(&splits)
        .map_err(|e| Error::Internal(format!("splits serialization: {e}")))?;
    std::fs::write(&splits_path, json + "\n").map_err(|e| Error::io(&splits_path, e))?;

    outputs.extend(out_files(
        &config.out,
        &["medians.csv", "medians.json", SPLITS_FILE],
    ));
    Ok(outputs)
}

fn cluster_year_range(year_clusters: &BTreeMap<i32, usize>, cluster_id: usize) -> (i32, i32) {
    let years: Vec<i32> = year_clusters
        .iter()
        .filter(|(_, &c)| c == cluster_id)
        .map(|(&y, _)| y)
        .collect();
    (
        years.first().copied().unwrap_or_default(),
        years.last().copied().unwrap_or_default(),
    )
}

fn load_splits(config: &RunConfig) -> Result<SplitsFile> {
    let path = config.out.join(SPLITS_FILE);
    if !path.is_file() {
        return Err(Error::Dependency(path.display().to_string()));
    }
    let text = std::fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
}

fn stage_evaluate(config: &RunConfig) -> Result<Vec<PathBuf>> {
    let records = load_kept_records(config)?;
    let longevity = load_longevity(config)?;
    let year_clusters = load_year_clusters(config)?;
    let clusters = build_cluster_data(&records, &longevity, &year_clusters)?;
    let splits = load_splits(config)?;
    let models_dir = config.out.join(MODELS_DIR);
    let feature_names = PlatformId::names();

    // Medians rebuilt from the artifact keep labeling identical to train.
    let medians_path = config.out.join("medians.csv");
    let (_, median_rows) = read_csv(&medians_path)?;
    let medians: BTreeMap<usize, u32> = median_rows
        .iter()
        .map(|row| {
            let [cluster, _, _, median] = row.as_slice() else {
                return Err(Error::Validation(format!(
                    "{}: malformed row {row:?}",
                    medians_path.display()
                )));
            };
            let cluster: usize = cluster
                .parse()
                .map_err(|_| Error::Validation(format!("bad cluster {cluster:?}")))?;
            let median: u32 = median
                .parse()
                .map_err(|_| Error::Validation(format!("bad median {median:?}")))?;
            Ok((cluster, median))
        })
        .collect::<Result<_>>()?;

    let split_for = |cluster_id: usize, task: Task| -> Result<&SplitEntry> {
        splits
            .splits
            .iter()
            .find(|s| s.cluster_id == cluster_id && s.task == task_tag(task))
            .ok_or_else(|| {
                Error::Dependency(format!(
                    "{} entry for cluster {cluster_id} {}",
                    SPLITS_FILE,
                    task_tag(task)
                ))
            })
    };

    let mut regression = Table::new(&["cluster", "model", "mae", "rmse", "r_squared"]);
    let mut classification = Table::new(&[
        "cluster",
        "model",
        "accuracy",
        "weighted_precision",
        "weighted_recall",
        "weighted_f1",
        "auc",
    ]);
    let mut outputs = Vec::new();

    for data in &clusters {
        for task in [Task::Regression, Task::Classification] {
            let families: &[ModelFamily] = match task {
                Task::Regression => &config.regression_models,
                Task::Classification => &config.classification_models,
            };
            if families.is_empty() {
                continue;
            }
            let split = split_for(data.cluster_id, task)?;
            let median = *medians.get(&data.cluster_id).ok_or_else(|| {
                Error::Dependency(format!("medians.csv row for cluster {}", data.cluster_id))
            })?;
            let y: Vec<f64> = match task {
                Task::Regression => split.test.iter().map(|&i| f64::from(data.ages[i])).collect(),
                Task::Classification => split
                    .test
                    .iter()
                    .map(|&i| f64::from(u8::from(data.ages[i] >= median)))
                    .collect(),
            };
            let test_x_raw: Vec<Vec<f64>> =
                split.test.iter().map(|&i| data.x[i].clone()).collect();

            for &family in families {
                let path = models_dir.join(model_file(data.cluster_id, task, family));
                if !path.is_file() {
                    return Err(Error::Dependency(path.display().to_string()));
                }
                let saved = SavedModel::load(&path, &feature_names)?;
                let test_x = apply_params_scaler(&saved, &test_x_raw);
                let pred = saved.model.predict(&test_x)?;
                let cluster_label = data.cluster_id.to_string();

                match task {
                    Task::Regression => {
                        let m = regression_metrics(&y, &pred)?;
                        regression.push(vec![
                            cluster_label.clone(),
                            family.display_name().into(),
                            fmt_sig(m.mae),
                            fmt_sig(m.rmse),
                            m.r_squared.map_or("undefined".into(), fmt_sig),
                        ]);
                    }
                    Task::Classification => {
                        let m = classification_metrics(&y, &pred)?;
                        let scores = saved.model.predict_score(&test_x)?;
                        let roc = roc_auc(&y, &scores)?;
                        classification.push(vec![
                            cluster_label.clone(),
                            family.display_name().into(),
                            fmt_sig(m.accuracy),
                            fmt_sig(m.weighted_precision),
                            fmt_sig(m.weighted_recall),
                            fmt_sig(m.weighted_f1),
                            fmt_sig(roc.auc),
                        ]);
                        let mut table = Table::new(&["fpr", "tpr"]);
                        for (fpr, tpr) in &roc.points {
                            table.push(vec![fmt_sig(*fpr), fmt_sig(*tpr)]);
                        }
                        let name = format!("roc_c{}_{}", data.cluster_id, family.id());
                        table.write(&config.out, &name)?;
                        outputs.extend(out_files(
                            &config.out,
                            &[&format!("{name}.csv"), &format!("{name}.json")],
                        ));
                    }
                }

                if matches!(family, ModelFamily::Tree | ModelFamily::Forest) {
                    let importance = gini_importance(&saved.model)?;
                    if importance.uniform_fallback {
                        eprintln!(
                            "warning: cluster {} {} {} made no splits; importance is uniform",
                            data.cluster_id,
                            task_tag(task),
                            family.id()
                        );
                    }
                    let mut table = Table::new(&["platform", "importance"]);
                    for (idx, weight) in top_k_features(&importance, importance.weights.len()) {
                        table.push(vec![ALL_PLATFORMS[idx].as_str().into(), fmt_sig(weight)]);
                    }
                    let name = format!(
                        "importance_c{}_{}_{}",
                        data.cluster_id,
                        task_tag(task),
                        family.id()
                    );
                    table.write(&config.out, &name)?;
                    outputs.extend(out_files(
                        &config.out,
                        &[&format!("{name}.csv"), &format!("{name}.json")],
                    ));
                }
            }
        }
    }

    regression.write(&config.out, "regression_results")?;
    classification.write(&config.out, "classification_results")?;
    outputs.extend(out_files(
        &config.out,
        &[
            "regression_results.csv",
            "regression_results.json",
            "classification_results.csv",
            "classification_results.json",
        ],
    ));
    Ok(outputs)
}

fn stage_report(config: &RunConfig) -> Result<Vec<PathBuf>> {
    // Growth plot data mirrors the yearly series.
    let (columns, rows) = read_csv(&config.out.join("yearly_series.csv"))?;
    let mut growth = Table {
        columns,
        rows: Vec::new(),
    };
    for row in rows {
        growth.push(row);
    }
    growth.write(&config.out, "growth")?;

    let (_, cluster_rows) = read_csv(&config.out.join("clusters.csv"))?;
    let top_platforms = |cluster: &str, task: &str| -> Result<String> {
        for family in ["forest", "tree"] {
            let path = config
                .out
                .join(format!("importance_c{cluster}_{task}_{family}.csv"));
            if path.is_file() {
                let (_, rows) = read_csv(&path)?;
                let names: Vec<&str> = rows.iter().take(2).map(|r| r[0].as_str()).collect();
                return Ok(names.join(" + "));
            }
        }
        Ok("-".into())
    };

    let mut summary = Table::new(&[
        "cluster",
        "year_min",
        "year_max",
        "top_regression_platforms",
        "top_classification_platforms",
    ]);
    for row in &cluster_rows {
        let [cluster, year_min, year_max, ..] = row.as_slice() else {
            return Err(Error::Validation(format!("clusters.csv: malformed row {row:?}")));
        };
        summary.push(vec![
            cluster.clone(),
            year_min.clone(),
            year_max.clone(),
            top_platforms(cluster, "regression")?,
            top_platforms(cluster, "classification")?,
        ]);
    }
    summary.write(&config.out, "summary")?;

    Ok(out_files(
        &config.out,
        &["growth.csv", "growth.json", "summary.csv", "summary.json"],
    ))
}

fn out_files(dir: &Path, names: &[&str]) -> Vec<PathBuf> {
    names.iter().map(|n| dir.join(n)).collect()
}
