//! K-means over publication years and elbow-based choice of k.
//!
//! Years are clustered on their total online mentions (min-max normalized,
//! one point per year; optionally 2-D with the normalized year appended) and
//! every article inherits the cluster of its publication year. Restarts use
//! independent derived RNG streams and the winner is picked by
//! (inertia, restart index), so results do not depend on execution order.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::ArticleRecord;
use crate::rng::{derive_seed, stream};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KMeansModel {
    pub k: usize,
    pub centroids: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    /// Sum of squared distances to assigned centroids.
    pub inertia: f64,
    pub seed: u64,
    pub n_iterations: usize,
    /// Inertia after each assignment step; non-increasing within a run.
    pub inertia_trace: Vec<f64>,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Nearest centroid index, ties broken toward the lower index.
fn nearest(point: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = f64::INFINITY;
    for (i, c) in centroids.iter().enumerate() {
        let d = squared_distance(point, c);
        if d < best_d {
            best_d = d;
            best = i;
        }
    }
    best
}

fn total_inertia(points: &[Vec<f64>], centroids: &[Vec<f64>], assignments: &[usize]) -> f64 {
    points
        .iter()
        .zip(assignments)
        .map(|(p, &a)| squared_distance(p, &centroids[a]))
        .sum()
}

fn validate_points(points: &[Vec<f64>]) -> Result<usize> {
    let Some(first) = points.first() else {
        return Err(Error::Argument("no points to cluster".into()));
    };
    let dim = first.len();
    for p in points {
        if p.len() != dim {
            return Err(Error::Validation("inconsistent point dimensions".into()));
        }
        if p.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("non-finite coordinate in input".into()));
        }
    }
    Ok(dim)
}

/// K-means++ seeding: first centroid uniform, then proportional to squared
/// distance from the nearest chosen centroid.
fn kmeans_pp_init(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let mut centroids: Vec<Vec<f64>> = Vec::with_capacity(k);
    centroids.push(points[rng.gen_range(0..points.len())].clone());
    let mut d2: Vec<f64> = points
        .iter()
        .map(|p| squared_distance(p, &centroids[0]))
        .collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let chosen = if total > 0.0 {
            let mut u = rng.gen::<f64>() * total;
            let mut idx = points.len() - 1;
            for (i, &w) in d2.iter().enumerate() {
                if u < w {
                    idx = i;
                    break;
                }
                u -= w;
            }
            idx
        } else {
            // All remaining mass at the chosen centroids; any point works.
            rng.gen_range(0..points.len())
        };
        centroids.push(points[chosen].clone());
        for (i, p) in points.iter().enumerate() {
            let d = squared_distance(p, centroids.last().expect("just pushed"));
            if d < d2[i] {
                d2[i] = d;
            }
        }
    }
    centroids
}

fn lloyd_run(
    points: &[Vec<f64>],
    mut centroids: Vec<Vec<f64>>,
    max_iter: usize,
) -> (Vec<Vec<f64>>, Vec<usize>, f64, usize, Vec<f64>) {
    let k = centroids.len();
    let dim = points[0].len();
    let mut assignments: Vec<usize> = vec![usize::MAX; points.len()];
    let mut trace = Vec::new();
    let mut n_iterations = 0;

    for _ in 0..max_iter {
        let new_assignments: Vec<usize> = points.iter().map(|p| nearest(p, &centroids)).collect();
        n_iterations += 1;
        trace.push(total_inertia(points, &centroids, &new_assignments));
        let converged = new_assignments == assignments;
        assignments = new_assignments;
        if converged {
            break;
        }

        // Centroid update: mean of assigned points.
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignments) {
            counts[a] += 1;
            for (s, v) in sums[a].iter_mut().zip(p) {
                *s += v;
            }
        }
        for (c, (sum, &count)) in centroids.iter_mut().zip(sums.iter().zip(&counts)) {
            if count > 0 {
                for (ci, si) in c.iter_mut().zip(sum) {
                    *ci = si / count as f64;
                }
            }
        }
        // Repair empty clusters by reseeding from the farthest point.
        let empties: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
        let mut used: BTreeSet<usize> = BTreeSet::new();
        for empty in empties {
            let farthest = points
                .iter()
                .enumerate()
                .filter(|(i, _)| !used.contains(i))
                .max_by(|(_, a), (_, b)| {
                    let da = squared_distance(a, &centroids[nearest(a, &centroids)]);
                    let db = squared_distance(b, &centroids[nearest(b, &centroids)]);
                    da.partial_cmp(&db).expect("finite distances")
                })
                .map(|(i, _)| i);
            if let Some(i) = farthest {
                used.insert(i);
                centroids[empty] = points[i].clone();
            }
        }
    }

    let inertia = total_inertia(points, &centroids, &assignments);
    (centroids, assignments, inertia, n_iterations, trace)
}

/// Best-of-restarts Lloyd k-means with k-means++ seeding.
pub fn lloyd_kmeans(
    points: &[Vec<f64>],
    k: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
) -> Result<KMeansModel> {
    validate_points(points)?;
    if k == 0 {
        return Err(Error::Argument("k must be at least 1".into()));
    }
    if k > points.len() {
        return Err(Error::Argument(format!(
            "k = {k} exceeds the {} available points",
            points.len()
        )));
    }
    if restarts == 0 {
        return Err(Error::Argument("restarts must be at least 1".into()));
    }

    let mut best: Option<KMeansModel> = None;
    for restart in 0..restarts {
        let mut rng = stream(seed, "kmeans-restart", restart as u64);
        let init = kmeans_pp_init(points, k, &mut rng);
        let (centroids, assignments, inertia, n_iterations, trace) =
            lloyd_run(points, init, max_iter);
        let candidate = KMeansModel {
            k,
            centroids,
            assignments,
            inertia,
            seed,
            n_iterations,
            inertia_trace: trace,
        };
        // Strict less-than keeps the earliest restart on ties.
        if best.as_ref().is_none_or(|b| candidate.inertia < b.inertia) {
            best = Some(candidate);
        }
    }
    Ok(best.expect("restarts >= 1"))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ElbowResult {
    pub k_values: Vec<usize>,
    pub inertias: Vec<f64>,
    pub chosen_k: Option<usize>,
}

/// Best inertia per k in `1..=k_max`, each k reproducible independently.
///
/// If unlucky seeding ever makes inertia rise from k-1 to k, one extra run is
/// seeded from the k-1 solution with its widest cluster split at the median,
/// which restores the non-increasing curve the elbow detector assumes.
pub fn inertia_curve(
    points: &[Vec<f64>],
    k_max: usize,
    seed: u64,
    restarts: usize,
    max_iter: usize,
) -> Result<ElbowResult> {
    validate_points(points)?;
    if k_max == 0 || k_max > points.len() {
        return Err(Error::Argument(format!(
            "k_max = {k_max} out of range for {} points",
            points.len()
        )));
    }

    let mut k_values = Vec::with_capacity(k_max);
    let mut inertias: Vec<f64> = Vec::with_capacity(k_max);
    let mut models: Vec<KMeansModel> = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        let mut model = lloyd_kmeans(points, k, derive_seed(seed, "elbow-k", k as u64), restarts, max_iter)?;
        if let Some(prev) = models.last() {
            if model.inertia > prev.inertia {
                if let Some(repaired) = split_widest_and_rerun(points, prev, max_iter) {
                    if repaired.inertia < model.inertia {
                        model = repaired;
                    }
                }
            }
            if model.inertia > prev.inertia {
                // Last resort: duplicate a centroid of the k-1 solution. Same
                // assignments, bit-identical inertia, curve stays monotone.
                let mut centroids = prev.centroids.clone();
                centroids.push(prev.centroids[0].clone());
                model = KMeansModel {
                    k,
                    centroids,
                    assignments: prev.assignments.clone(),
                    inertia: prev.inertia,
                    seed: prev.seed,
                    n_iterations: 0,
                    inertia_trace: vec![prev.inertia],
                };
            }
        }
        k_values.push(k);
        inertias.push(model.inertia);
        models.push(model);
    }
    Ok(ElbowResult {
        k_values,
        inertias,
        chosen_k: None,
    })
}

fn split_widest_and_rerun(
    points: &[Vec<f64>],
    prev: &KMeansModel,
    max_iter: usize,
) -> Option<KMeansModel> {
    let dim = points[0].len();
    // Widest cluster = largest within-cluster SSE among clusters with >= 2 points.
    let mut sse = vec![0.0; prev.k];
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); prev.k];
    for (i, (&a, p)) in prev.assignments.iter().zip(points).enumerate() {
        sse[a] += squared_distance(p, &prev.centroids[a]);
        members[a].push(i);
    }
    let widest = (0..prev.k)
        .filter(|&c| members[c].len() >= 2)
        .max_by(|&a, &b| sse[a].partial_cmp(&sse[b]).expect("finite"))?;

    // Split along the dimension of largest variance, at the median.
    let split_dim = (0..dim)
        .max_by(|&a, &b| {
            let var = |d: usize| {
                let vals: Vec<f64> = members[widest].iter().map(|&i| points[i][d]).collect();
                let mean = vals.iter().sum::<f64>() / vals.len() as f64;
                vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>()
            };
            var(a).partial_cmp(&var(b)).expect("finite")
        })
        .unwrap_or(0);
    let mut sorted = members[widest].clone();
    sorted.sort_by(|&a, &b| {
        points[a][split_dim]
            .partial_cmp(&points[b][split_dim])
            .expect("finite")
            .then(a.cmp(&b))
    });
    let half = sorted.len().div_ceil(2);
    let mean_of = |idxs: &[usize]| -> Vec<f64> {
        let mut m = vec![0.0; dim];
        for &i in idxs {
            for (mi, v) in m.iter_mut().zip(&points[i]) {
                *mi += v;
            }
        }
        for mi in m.iter_mut() {
            *mi /= idxs.len() as f64;
        }
        m
    };

    let mut init = prev.centroids.clone();
    init[widest] = mean_of(&sorted[..half]);
    init.push(mean_of(&sorted[half..]));
    let (centroids, assignments, inertia, n_iterations, trace) = lloyd_run(points, init, max_iter);
    Some(KMeansModel {
        k: prev.k + 1,
        centroids,
        assignments,
        inertia,
        seed: prev.seed,
        n_iterations,
        inertia_trace: trace,
    })
}

/// Elbow choice: the interior k with maximum perpendicular distance to the
/// chord between the curve's endpoints, both axes min-max normalized.
/// Ties go to the smaller k.
pub fn detect_elbow(curve: &ElbowResult) -> Result<usize> {
    let n = curve.k_values.len();
    if n < 3 {
        return Err(Error::Argument(format!(
            "elbow detection needs at least 3 curve points, got {n}"
        )));
    }
    let norm = |values: &[f64]| -> Vec<f64> {
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            values.iter().map(|v| (v - lo) / (hi - lo)).collect()
        } else {
            vec![0.0; values.len()]
        }
    };
    let xs = norm(&curve.k_values.iter().map(|&k| k as f64).collect::<Vec<_>>());
    let ys = norm(&curve.inertias);

    let (x0, y0) = (xs[0], ys[0]);
    let (x1, y1) = (xs[n - 1], ys[n - 1]);
    let chord_len = ((x1 - x0).powi(2) + (y1 - y0).powi(2)).sqrt();

    let mut best_k = curve.k_values[1];
    let mut best_d = f64::NEG_INFINITY;
    for i in 1..n - 1 {
        let d = if chord_len > 0.0 {
            ((y1 - y0) * xs[i] - (x1 - x0) * ys[i] + x1 * y0 - y1 * x0).abs() / chord_len
        } else {
            0.0
        };
        if d > best_d {
            best_d = d;
            best_k = curve.k_values[i];
        }
    }
    Ok(best_k)
}

/// One cluster of publication years (Table-4-shaped bookkeeping).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterSpec {
    pub cluster_id: usize,
    pub year_min: i32,
    pub year_max: i32,
    pub n_articles: u64,
    pub n_online_mentions: u64,
    pub n_active: u64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct YearClusterModel {
    pub specs: Vec<ClusterSpec>,
    pub year_to_cluster: BTreeMap<i32, usize>,
    pub article_clusters: BTreeMap<String, usize>,
    pub elbow: ElbowResult,
    pub kmeans: KMeansModel,
    /// False if any cluster's year set is non-contiguous (degenerate inputs).
    pub contiguous: bool,
}

#[derive(Debug, Clone)]
pub struct ClusterOptions {
    /// Fixed k; `None` selects k by the elbow method.
    pub k: Option<usize>,
    pub k_max: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iter: usize,
    /// Cluster on (normalized mentions, normalized year) instead of 1-D.
    pub with_year: bool,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        ClusterOptions {
            k: None,
            k_max: 10,
            seed: 0,
            restarts: 10,
            max_iter: 300,
            with_year: false,
        }
    }
}

/// Cluster publication years by mention volume and assign every article the
/// cluster of its year. Cluster ids are relabeled in ascending year order.
pub fn assign_year_clusters(
    records: &[ArticleRecord],
    active_ids: &BTreeSet<String>,
    opts: &ClusterOptions,
) -> Result<YearClusterModel> {
    if records.is_empty() {
        return Err(Error::Argument("no records to cluster".into()));
    }

    let lo = records.iter().map(|r| r.publication_year()).min().expect("non-empty");
    let hi = records.iter().map(|r| r.publication_year()).max().expect("non-empty");
    let years: Vec<i32> = (lo..=hi).collect();
    let mut totals: BTreeMap<i32, u64> = years.iter().map(|&y| (y, 0)).collect();
    for r in records {
        *totals.get_mut(&r.publication_year()).expect("in range") += r.total_mentions();
    }
    let raw: Vec<f64> = years.iter().map(|y| totals[y] as f64).collect();

    let norm = |values: &[f64]| -> Vec<f64> {
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if hi > lo {
            values.iter().map(|v| (v - lo) / (hi - lo)).collect()
        } else {
            vec![0.0; values.len()]
        }
    };
    let mentions_n = norm(&raw);
    let years_n = norm(&years.iter().map(|&y| f64::from(y)).collect::<Vec<_>>());
    let points: Vec<Vec<f64>> = if opts.with_year {
        mentions_n.iter().zip(&years_n).map(|(&m, &y)| vec![m, y]).collect()
    } else {
        mentions_n.iter().map(|&m| vec![m]).collect()
    };

    let k_max = opts.k_max.min(points.len()).max(1);
    let mut elbow = inertia_curve(&points, k_max, opts.seed, opts.restarts, opts.max_iter)?;
    let k = match opts.k {
        Some(k) => k,
        None if points.len() < 3 => 1,
        None => detect_elbow(&elbow)?,
    };
    elbow.chosen_k = Some(k);

    let kmeans = lloyd_kmeans(
        &points,
        k,
        derive_seed(opts.seed, "final-kmeans", k as u64),
        opts.restarts,
        opts.max_iter,
    )?;

    // Relabel cluster ids in ascending order of their earliest year.
    let mut first_year_of: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, &a) in kmeans.assignments.iter().enumerate() {
        first_year_of.entry(a).or_insert(i);
    }
    let mut order: Vec<(usize, usize)> = first_year_of.iter().map(|(&c, &i)| (i, c)).collect();
    order.sort_unstable();
    let relabel: BTreeMap<usize, usize> =
        order.iter().enumerate().map(|(new, &(_, old))| (old, new)).collect();

    let year_to_cluster: BTreeMap<i32, usize> = years
        .iter()
        .zip(&kmeans.assignments)
        .map(|(&y, &a)| (y, relabel[&a]))
        .collect();

    let n_clusters = relabel.len();
    let mut specs: Vec<ClusterSpec> = (0..n_clusters)
        .map(|cluster_id| ClusterSpec {
            cluster_id,
            year_min: i32::MAX,
            year_max: i32::MIN,
            n_articles: 0,
            n_online_mentions: 0,
            n_active: 0,
        })
        .collect();
    for (&y, &c) in &year_to_cluster {
        specs[c].year_min = specs[c].year_min.min(y);
        specs[c].year_max = specs[c].year_max.max(y);
    }
    let mut article_clusters = BTreeMap::new();
    for r in records {
        let c = year_to_cluster[&r.publication_year()];
        specs[c].n_articles += 1;
        specs[c].n_online_mentions += r.total_mentions();
        if active_ids.contains(r.article_id()) {
            specs[c].n_active += 1;
        }
        article_clusters.insert(r.article_id().to_string(), c);
    }

    let contiguous = specs.iter().all(|s| {
        (s.year_min..=s.year_max).all(|y| year_to_cluster.get(&y) == Some(&s.cluster_id))
    });

    Ok(YearClusterModel {
        specs,
        year_to_cluster,
        article_clusters,
        elbow,
        kmeans,
        contiguous,
    })
}
