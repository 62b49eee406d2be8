//! Seeded generator of altmetric-like corpora with planted ground truth.
//!
//! Articles per year follow a multiplicative growth law, platform counts
//! follow era-specific weight profiles (syllabi-heavy early, patent-heavy
//! mid-century, twitter-heavy late, Mendeley dominant throughout), and every
//! article's mention dates are synthesized to realize a planted Online Age.
//! A designated subset is active by construction. Per-article RNG streams are
//! derived from (seed, article index), so any single article can be
//! regenerated without the rest.
//!
//! The generator is an oracle factory for the rest of the toolkit, not a
//! statistical model of any real dump.

use std::collections::BTreeMap;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::date::Date;
use crate::error::{Error, Result};
use crate::model::{Dataset, Task};
use crate::platform::{PlatformId, ALL_PLATFORMS, N_PLATFORMS};
use crate::record::ArticleRecord;
use crate::rng::{normal, stream};

/// One era of the platform mixture schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EraProfile {
    /// First publication year this era covers.
    pub start_year: i32,
    /// Per-platform mean-count weights, canonical order.
    pub weights: [f64; N_PLATFORMS],
    /// Target yearly mention volume for the era, relative to the other eras.
    ///
    /// Per-article means are deflated by the article growth factor inside the
    /// era, so each era's yearly totals form a flat band at this level. The
    /// separated bands are the planted year-cluster structure.
    pub mention_scale: f64,
}

/// Planted longevity law: online_age = intercept + sum(w * ln(1 + count)).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LongevityLaw {
    pub intercept: f64,
    pub coeffs: Vec<(PlatformId, f64)>,
    pub noise_sigma: f64,
}

impl LongevityLaw {
    pub fn evaluate(&self, counts: &[u64; N_PLATFORMS]) -> f64 {
        self.intercept
            + self
                .coeffs
                .iter()
                .map(|(p, w)| w * (1.0 + counts[p.index()] as f64).ln())
                .sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthConfig {
    pub n_articles: usize,
    pub year_start: i32,
    pub year_end: i32,
    /// Yearly multiplicative growth of article counts.
    pub growth_rate: f64,
    /// Era profiles sorted by start year; the first must cover `year_start`.
    pub eras: Vec<EraProfile>,
    /// Baseline mean mentions per unit platform weight.
    pub base_mean_mentions: f64,
    /// Negative-binomial r; smaller is more overdispersed.
    pub overdispersion: u32,
    pub longevity: LongevityLaw,
    /// Fraction of articles made active by construction.
    pub active_fraction: f64,
    /// Fraction of articles with counts but no mention dates.
    pub undated_fraction: f64,
    /// Platforms carrying yearly events for designated active articles.
    pub active_platforms: Vec<PlatformId>,
    pub horizon_year: i32,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        let weights = |pairs: &[(PlatformId, f64)]| {
            let mut w = [0.01; N_PLATFORMS];
            for (p, v) in pairs {
                w[p.index()] = *v;
            }
            w
        };
        SynthConfig {
            n_articles: 10_000,
            year_start: 1920,
            year_end: 2016,
            growth_rate: 0.05,
            eras: vec![
                EraProfile {
                    start_year: 1920,
                    weights: weights(&[
                        (PlatformId::Mendeley, 1.0),
                        (PlatformId::Syllabi, 0.6),
                        (PlatformId::Patent, 0.15),
                        (PlatformId::Wikipedia, 0.05),
                    ]),
                    mention_scale: 1.0,
                },
                EraProfile {
                    start_year: 1971,
                    weights: weights(&[
                        (PlatformId::Mendeley, 1.0),
                        (PlatformId::Patent, 0.6),
                        (PlatformId::Syllabi, 0.1),
                        (PlatformId::Twitter, 0.1),
                        (PlatformId::News, 0.05),
                    ]),
                    mention_scale: 22.5,
                },
                EraProfile {
                    start_year: 2010,
                    weights: weights(&[
                        (PlatformId::Mendeley, 1.0),
                        (PlatformId::Twitter, 0.7),
                        (PlatformId::Facebook, 0.25),
                        (PlatformId::News, 0.1),
                        (PlatformId::Patent, 0.05),
                    ]),
                    mention_scale: 50.0,
                },
            ],
            base_mean_mentions: 400.0,
            overdispersion: 2,
            longevity: LongevityLaw {
                intercept: 4.0,
                coeffs: vec![
                    (PlatformId::Patent, 9.0),
                    (PlatformId::Twitter, 4.0),
                    (PlatformId::Mendeley, 2.0),
                ],
                noise_sigma: 3.0,
            },
            active_fraction: 0.3,
            undated_fraction: 0.15,
            active_platforms: vec![PlatformId::Mendeley, PlatformId::Twitter, PlatformId::Patent],
            horizon_year: 2018,
            seed: 0,
        }
    }
}

impl SynthConfig {
    fn validate(&self) -> Result<()> {
        if self.n_articles == 0 {
            return Err(Error::Argument("n_articles must be positive".into()));
        }
        if self.year_start > self.year_end {
            return Err(Error::Argument("empty publication year range".into()));
        }
        if self.year_end >= self.horizon_year {
            return Err(Error::Argument(
                "horizon year must come after the publication range".into(),
            ));
        }
        if !(0.0..=1.0).contains(&self.active_fraction)
            || !(0.0..=1.0).contains(&self.undated_fraction)
            || self.active_fraction + self.undated_fraction > 1.0
        {
            return Err(Error::Argument("role fractions must partition [0, 1]".into()));
        }
        if self.active_fraction > 0.0 && self.active_platforms.len() < 3 {
            return Err(Error::Argument(
                "active articles need at least 3 designated platforms".into(),
            ));
        }
        if self.eras.is_empty() || self.eras[0].start_year > self.year_start {
            return Err(Error::Argument(
                "era profiles must cover the start of the year range".into(),
            ));
        }
        if self.eras.windows(2).any(|w| w[0].start_year >= w[1].start_year) {
            return Err(Error::Argument("era start years must be increasing".into()));
        }
        if self.longevity.noise_sigma < 0.0 || self.overdispersion == 0 {
            return Err(Error::Argument("bad noise or overdispersion setting".into()));
        }
        Ok(())
    }

    fn era_index(&self, year: i32) -> usize {
        self.eras
            .iter()
            .rposition(|e| e.start_year <= year)
            .expect("validated: first era covers year_start")
    }

    /// Articles per year: largest-remainder apportionment of the growth law.
    pub fn year_allocation(&self) -> Vec<(i32, usize)> {
        let years: Vec<i32> = (self.year_start..=self.year_end).collect();
        let weights: Vec<f64> = years
            .iter()
            .map(|&y| (1.0 + self.growth_rate).powi(y - self.year_start))
            .collect();
        let total: f64 = weights.iter().sum();
        let quotas: Vec<f64> = weights
            .iter()
            .map(|w| w / total * self.n_articles as f64)
            .collect();
        let mut counts: Vec<usize> = quotas.iter().map(|q| q.floor() as usize).collect();
        let assigned: usize = counts.iter().sum();
        let mut order: Vec<usize> = (0..years.len()).collect();
        order.sort_by(|&a, &b| {
            let frac = |i: usize| quotas[i] - quotas[i].floor();
            frac(b).partial_cmp(&frac(a)).expect("finite").then(a.cmp(&b))
        });
        for &i in order.iter().take(self.n_articles - assigned) {
            counts[i] += 1;
        }
        years.into_iter().zip(counts).collect()
    }
}

/// Planted truth aligned one-to-one with the generated records.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GroundTruth {
    /// Pre-noise longevity-law value per article.
    pub true_online_age: Vec<f64>,
    /// Realized Online Age in months; `None` for undated articles.
    pub realized_online_age: Vec<Option<u32>>,
    /// Whether the article was designated active by construction.
    pub active: Vec<bool>,
    /// The platforms the longevity law reads.
    pub informative: Vec<PlatformId>,
    /// Planted era index per publication year.
    pub year_eras: BTreeMap<i32, usize>,
}

/// Negative-binomial draw as a sum of `r` geometrics; mean is `mean`.
fn nb_draw(rng: &mut ChaCha8Rng, mean: f64, r: u32) -> u64 {
    if mean <= 0.0 {
        return 0;
    }
    let p = f64::from(r) / (f64::from(r) + mean);
    let base = (1.0 - p).ln();
    (0..r)
        .map(|_| {
            let u: f64 = rng.gen_range(0.0..1.0);
            if base == 0.0 {
                0
            } else {
                ((1.0 - u).ln() / base).floor() as u64
            }
        })
        .sum()
}

fn random_date_in_year(rng: &mut ChaCha8Rng, year: i32) -> Date {
    let month = rng.gen_range(1..=12u32);
    let day = rng.gen_range(1..=28u32);
    Date::new(year, month, day).expect("day <= 28 is always valid")
}

/// Months from `first` to the latest representable date in `year`.
fn months_until_year_end(first: Date, year: i32) -> i64 {
    let end = i64::from(year) * 12 + 11;
    end - first.month_index()
}

enum Role {
    Active,
    Undated,
    Dated,
}

fn article_role(rng: &mut ChaCha8Rng, config: &SynthConfig) -> Role {
    let u: f64 = rng.gen_range(0.0..1.0);
    if u < config.active_fraction {
        Role::Active
    } else if u < config.active_fraction + config.undated_fraction {
        Role::Undated
    } else {
        Role::Dated
    }
}

struct GeneratedArticle {
    record: ArticleRecord,
    true_age: f64,
    realized_age: Option<u32>,
    active: bool,
}

fn generate_article(config: &SynthConfig, index: usize, year: i32) -> Result<GeneratedArticle> {
    let mut rng = stream(config.seed, "article", index as u64);
    let era = &config.eras[config.era_index(year)];
    let role = article_role(&mut rng, config);

    // Deflating by the growth factor keeps each era's yearly totals flat and
    // proportional to mention_scale even as articles per year grow.
    let deflate = (1.0 + config.growth_rate).powi(year - config.year_start);
    let mut counts = [0u64; N_PLATFORMS];
    for p in ALL_PLATFORMS {
        let mean =
            config.base_mean_mentions * era.mention_scale * era.weights[p.index()] / deflate;
        counts[p.index()] = nb_draw(&mut rng, mean, config.overdispersion);
    }

    let pubdate = random_date_in_year(&mut rng, year);
    let mut first_seen = [None; N_PLATFORMS];
    let mut last_seen = [None; N_PLATFORMS];
    let mut events = Vec::new();

    let true_age = config.longevity.evaluate(&counts);
    let noisy_age = true_age + config.longevity.noise_sigma * normal(&mut rng);

    let (realized_age, active) = match role {
        Role::Undated => (None, false),
        Role::Dated => {
            // First mention lags publication a little; the last mention stays
            // strictly before the horizon year so the article cannot be active.
            let max_lag_years = (config.horizon_year - 1 - year).max(0);
            let lag = rng.gen_range(0..=max_lag_years.min(2));
            let first = random_date_in_year(&mut rng, year + lag);
            let max_age = months_until_year_end(first, config.horizon_year - 1).max(0);
            let age = (noisy_age.round().max(0.0) as i64).min(max_age);
            let last = first.add_months(age);

            place_platform_dates(&mut rng, &mut counts, &mut first_seen, &mut last_seen, first, last);
            (Some(age as u32), false)
        }
        Role::Active => {
            // Realize the planted age against a last mention inside the
            // horizon year, clamped so the first mention stays after
            // publication.
            let last = random_date_in_year(&mut rng, config.horizon_year);
            let max_age = last.month_index() - (i64::from(year) * 12);
            let age = (noisy_age.round().max(1.0) as i64).min(max_age).max(1);
            let first = last.add_months(-age);

            // Designated platforms carry one event per year between the
            // endpoints, pinned to first/last at the edges, so coverage holds
            // for every year through the horizon.
            for &p in &config.active_platforms {
                events.push((p, first));
                for y in first.year() + 1..last.year() {
                    events.push((p, Date::new(y, 6, 15).expect("mid-year date")));
                }
                events.push((p, last));
                let n_events = (last.year() - first.year() + 1).max(1) as u64;
                counts[p.index()] = counts[p.index()].max(n_events);
            }
            // Remaining platforms get bounds inside the window.
            for p in ALL_PLATFORMS {
                if config.active_platforms.contains(&p) || counts[p.index()] == 0 {
                    continue;
                }
                let span = last.month_index() - first.month_index();
                let a = rng.gen_range(0..=span);
                let b = rng.gen_range(0..=span);
                first_seen[p.index()] = Some(first.add_months(a.min(b)));
                last_seen[p.index()] = Some(first.add_months(a.max(b)));
            }
            (Some(age as u32), true)
        }
    };

    let record = ArticleRecord::from_parts(
        format!("synth-{index:07}"),
        year,
        Some(pubdate),
        counts,
        first_seen,
        last_seen,
        events,
    )?;
    Ok(GeneratedArticle {
        record,
        true_age,
        realized_age,
        active,
    })
}

/// Bounds for every platform with mentions, with the endpoints attained.
fn place_platform_dates(
    rng: &mut ChaCha8Rng,
    counts: &mut [u64; N_PLATFORMS],
    first_seen: &mut [Option<Date>; N_PLATFORMS],
    last_seen: &mut [Option<Date>; N_PLATFORMS],
    first: Date,
    last: Date,
) {
    let mentioned: Vec<PlatformId> = ALL_PLATFORMS
        .into_iter()
        .filter(|p| counts[p.index()] > 0)
        .collect();
    let carrier = match mentioned.first() {
        Some(p) => *p,
        None => {
            // A dated article needs at least one mentioned platform.
            counts[PlatformId::Mendeley.index()] = 1;
            PlatformId::Mendeley
        }
    };
    first_seen[carrier.index()] = Some(first);
    last_seen[carrier.index()] = Some(last);
    let span = last.month_index() - first.month_index();
    for p in mentioned.into_iter().skip(1) {
        let a = rng.gen_range(0..=span);
        let b = rng.gen_range(0..=span);
        first_seen[p.index()] = Some(first.add_months(a.min(b)));
        last_seen[p.index()] = Some(first.add_months(a.max(b)));
    }
}

/// Generate a full corpus with its ground truth.
pub fn generate_corpus(config: &SynthConfig) -> Result<(Vec<ArticleRecord>, GroundTruth)> {
    config.validate()?;
    let allocation = config.year_allocation();
    let mut records = Vec::with_capacity(config.n_articles);
    let mut truth = GroundTruth {
        true_online_age: Vec::with_capacity(config.n_articles),
        realized_online_age: Vec::with_capacity(config.n_articles),
        active: Vec::with_capacity(config.n_articles),
        informative: config.longevity.coeffs.iter().map(|(p, _)| *p).collect(),
        year_eras: (config.year_start..=config.year_end)
            .map(|y| (y, config.era_index(y)))
            .collect(),
    };

    let mut index = 0;
    for (year, count) in allocation {
        for _ in 0..count {
            let article = generate_article(config, index, year)?;
            records.push(article.record);
            truth.true_online_age.push(article.true_age);
            truth.realized_online_age.push(article.realized_age);
            truth.active.push(article.active);
            index += 1;
        }
    }
    Ok((records, truth))
}

/// Regenerate one article from (seed, index) without generating the rest.
pub fn regenerate_article(config: &SynthConfig, index: usize) -> Result<ArticleRecord> {
    config.validate()?;
    if index >= config.n_articles {
        return Err(Error::Argument(format!(
            "article index {index} out of range for {} articles",
            config.n_articles
        )));
    }
    let mut cumulative = 0;
    for (year, count) in config.year_allocation() {
        if index < cumulative + count {
            return Ok(generate_article(config, index, year)?.record);
        }
        cumulative += count;
    }
    unreachable!("allocation sums to n_articles")
}

/// 1-D Gaussian blobs with centers `separation` sigmas apart.
pub fn generate_planted_clusters(
    k: usize,
    n_per_cluster: usize,
    separation: f64,
    seed: u64,
) -> Result<(Vec<f64>, Vec<usize>)> {
    if k == 0 || n_per_cluster == 0 {
        return Err(Error::Argument("need at least one cluster and one point".into()));
    }
    if separation < 0.0 {
        return Err(Error::Argument("separation must be non-negative".into()));
    }
    let mut rng = stream(seed, "planted-clusters", 0);
    let mut points = Vec::with_capacity(k * n_per_cluster);
    let mut labels = Vec::with_capacity(k * n_per_cluster);
    for cluster in 0..k {
        let center = cluster as f64 * separation;
        for _ in 0..n_per_cluster {
            points.push(center + normal(&mut rng));
            labels.push(cluster);
        }
    }
    Ok((points, labels))
}

/// Target relation for planted supervised problems.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum PlantedRelation {
    /// y = intercept + sum(coeff * x) over the informative features.
    Linear { coeffs: Vec<f64>, intercept: f64 },
    /// Label 1 iff the first informative feature (plus noise) exceeds the
    /// cutoff.
    Threshold { cutoff: f64 },
    /// A fixed smooth nonlinearity over the informative features.
    Smooth,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SupervisedTruth {
    /// Pre-noise targets.
    pub clean_targets: Vec<f64>,
    pub informative: Vec<PlatformId>,
}

fn smooth_g(values: &[f64]) -> f64 {
    values
        .iter()
        .enumerate()
        .map(|(j, v)| 8.0 / (j + 1) as f64 * ((v - 4.0) / 2.5).tanh() + 0.3 * v)
        .sum()
}

/// Planted supervised dataset over the 21 platform columns: informative
/// columns drive the target, everything else is independent nuisance noise.
pub fn generate_planted_supervised(
    n: usize,
    informative: &[PlatformId],
    relation: &PlantedRelation,
    noise_sigma: f64,
    seed: u64,
) -> Result<(Dataset, SupervisedTruth)> {
    if n == 0 || informative.is_empty() {
        return Err(Error::Argument(
            "need rows and at least one informative feature".into(),
        ));
    }
    if let PlantedRelation::Linear { coeffs, .. } = relation {
        if coeffs.len() != informative.len() {
            return Err(Error::Argument(
                "one coefficient per informative feature".into(),
            ));
        }
    }

    let mut rng = stream(seed, "planted-supervised", 0);
    let mut x = Vec::with_capacity(n);
    let mut y = Vec::with_capacity(n);
    let mut clean = Vec::with_capacity(n);
    for _ in 0..n {
        let row: Vec<f64> = (0..N_PLATFORMS).map(|_| nb_draw(&mut rng, 5.0, 2) as f64).collect();
        let values: Vec<f64> = informative.iter().map(|p| row[p.index()]).collect();
        let (clean_target, target) = match relation {
            PlantedRelation::Linear { coeffs, intercept } => {
                let g = intercept
                    + values.iter().zip(coeffs).map(|(v, c)| v * c).sum::<f64>();
                (g, g + noise_sigma * normal(&mut rng))
            }
            PlantedRelation::Threshold { cutoff } => {
                let score = values[0] + noise_sigma * normal(&mut rng);
                let label = f64::from(u8::from(score > *cutoff));
                (f64::from(u8::from(values[0] > *cutoff)), label)
            }
            PlantedRelation::Smooth => {
                let g = smooth_g(&values);
                (g, g + noise_sigma * normal(&mut rng))
            }
        };
        x.push(row);
        clean.push(clean_target);
        y.push(target);
    }

    let task = match relation {
        PlantedRelation::Threshold { .. } => Task::Classification,
        _ => Task::Regression,
    };
    let dataset = Dataset::new(PlatformId::names(), x, y, task, "synthetic".into())?;
    Ok((
        dataset,
        SupervisedTruth {
            clean_targets: clean,
            informative: informative.to_vec(),
        },
    ))
}
