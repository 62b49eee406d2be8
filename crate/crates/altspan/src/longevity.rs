//! Online Age and the derived longevity views.
//!
//! An article's *Online Age* is the difference in calendar months between its
//! first and last online mention across all platforms. An *active* article is
//! one mentioned every year, on at least `min_platforms` distinct platforms,
//! from its first online mention through the horizon year. This module also
//! builds the yearly growth series, the min-max normalized platform-share
//! matrix, and median-threshold class labels.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::date::Date;
use crate::error::{Error, Result};
use crate::ingest::PubWindow;
use crate::platform::{ALL_PLATFORMS, N_PLATFORMS};
use crate::record::ArticleRecord;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LongevityRecord {
    pub article_id: String,
    pub first_online_mention: Date,
    pub last_online_mention: Date,
    pub online_age_months: u32,
    pub active: bool,
}

/// Earliest and latest mention dates across all platforms, if any.
pub fn first_last_mention(record: &ArticleRecord) -> Option<(Date, Date)> {
    let mut first: Option<Date> = None;
    let mut last: Option<Date> = None;
    for platform in ALL_PLATFORMS {
        if let Some(f) = record.first_seen(platform) {
            first = Some(first.map_or(f, |cur| cur.min(f)));
        }
        if let Some(l) = record.last_seen(platform) {
            last = Some(last.map_or(l, |cur| cur.max(l)));
        }
    }
    // Events are folded into the bounds at parse time, so bounds suffice.
    match (first, last) {
        (Some(f), Some(l)) => Some((f, l)),
        _ => None,
    }
}

/// Online Age: whole-month index difference, day-of-month ignored.
pub fn online_age(first: Date, last: Date) -> Result<u32> {
    if first > last {
        return Err(Error::Argument(format!(
            "first mention {first} after last mention {last}"
        )));
    }
    Ok((last.month_index() - first.month_index()) as u32)
}

/// Whether the record was mentioned every year on at least `min_platforms`
/// distinct platforms from its first online mention through `horizon_year`.
///
/// A platform covers a year if it has an event dated in that year or, for
/// bounds-only platforms, if the year falls inside its closed
/// `[first_seen.year, last_seen.year]` interval.
pub fn is_active(record: &ArticleRecord, horizon_year: i32, min_platforms: usize) -> Result<bool> {
    if min_platforms == 0 {
        return Err(Error::Argument("min_platforms must be at least 1".into()));
    }
    let Some((first, _)) = first_last_mention(record) else {
        return Err(Error::Argument(format!(
            "{}: no dated mentions",
            record.article_id()
        )));
    };
    for year in first.year()..=horizon_year {
        let covering = ALL_PLATFORMS
            .iter()
            .filter(|&&p| platform_covers_year(record, p, year))
            .count();
        if covering < min_platforms {
            return Ok(false);
        }
    }
    Ok(true)
}

fn platform_covers_year(record: &ArticleRecord, platform: crate::PlatformId, year: i32) -> bool {
    if record.has_events_for(platform) {
        return record
            .events()
            .iter()
            .any(|(p, d)| *p == platform && d.year() == year);
    }
    match (record.first_seen(platform), record.last_seen(platform)) {
        (Some(f), Some(l)) => f.year() <= year && year <= l.year(),
        _ => false,
    }
}

/// Longevity view of one dated record.
pub fn longevity_record(
    record: &ArticleRecord,
    horizon_year: i32,
    min_platforms: usize,
) -> Result<Option<LongevityRecord>> {
    let Some((first, last)) = first_last_mention(record) else {
        return Ok(None);
    };
    Ok(Some(LongevityRecord {
        article_id: record.article_id().to_string(),
        first_online_mention: first,
        last_online_mention: last,
        online_age_months: online_age(first, last)?,
        active: is_active(record, horizon_year, min_platforms)?,
    }))
}

/// Longevity records for every dated record, input order preserved.
pub fn longevity_records(
    records: &[ArticleRecord],
    horizon_year: i32,
    min_platforms: usize,
) -> Result<Vec<LongevityRecord>> {
    let mut out = Vec::new();
    for record in records {
        if let Some(lr) = longevity_record(record, horizon_year, min_platforms)? {
            out.push(lr);
        }
    }
    Ok(out)
}

/// The active-article set: dated, in-window, and active — in input order.
pub fn active_set(
    records: &[ArticleRecord],
    horizon_year: i32,
    min_platforms: usize,
    window: PubWindow,
) -> Result<Vec<(&ArticleRecord, LongevityRecord)>> {
    let mut out = Vec::new();
    for record in records {
        if !window.contains(record.publication_year()) {
            continue;
        }
        if let Some(lr) = longevity_record(record, horizon_year, min_platforms)? {
            if lr.active {
                out.push((record, lr));
            }
        }
    }
    Ok(out)
}

/// Per publication year: articles published, articles with dated mentions,
/// and total platform mentions. Years are contiguous over the observed range.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct YearlySeries {
    pub years: Vec<i32>,
    pub published: Vec<u64>,
    pub with_dates: Vec<u64>,
    pub total_mentions: Vec<u64>,
}

pub fn yearly_series(records: &[ArticleRecord]) -> YearlySeries {
    let mut per_year: BTreeMap<i32, (u64, u64, u64)> = BTreeMap::new();
    for record in records {
        let entry = per_year.entry(record.publication_year()).or_default();
        entry.0 += 1;
        if record.has_dated_mentions() {
            entry.1 += 1;
        }
        entry.2 += record.total_mentions();
    }
    let (Some(&lo), Some(&hi)) = (per_year.keys().next(), per_year.keys().last()) else {
        return YearlySeries {
            years: vec![],
            published: vec![],
            with_dates: vec![],
            total_mentions: vec![],
        };
    };
    let mut series = YearlySeries {
        years: Vec::new(),
        published: Vec::new(),
        with_dates: Vec::new(),
        total_mentions: Vec::new(),
    };
    for year in lo..=hi {
        let (p, d, m) = per_year.get(&year).copied().unwrap_or_default();
        series.years.push(year);
        series.published.push(p);
        series.with_dates.push(d);
        series.total_mentions.push(m);
    }
    series
}

/// Per-year platform mention totals, raw and min-max normalized per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlatformShareMatrix {
    pub years: Vec<i32>,
    pub raw_counts: Vec<[u64; N_PLATFORMS]>,
    /// Row-wise `(x - min) / (max - min)`; an all-equal row maps to all zero.
    pub normalized: Vec<[f64; N_PLATFORMS]>,
}

pub fn platform_share_matrix(records: &[ArticleRecord]) -> PlatformShareMatrix {
    let mut per_year: BTreeMap<i32, [u64; N_PLATFORMS]> = BTreeMap::new();
    for record in records {
        let row = per_year
            .entry(record.publication_year())
            .or_insert([0; N_PLATFORMS]);
        for (i, c) in record.counts().iter().enumerate() {
            row[i] += c;
        }
    }
    let (Some(&lo), Some(&hi)) = (per_year.keys().next(), per_year.keys().last()) else {
        return PlatformShareMatrix {
            years: vec![],
            raw_counts: vec![],
            normalized: vec![],
        };
    };
    let mut out = PlatformShareMatrix {
        years: Vec::new(),
        raw_counts: Vec::new(),
        normalized: Vec::new(),
    };
    for year in lo..=hi {
        let raw = per_year.get(&year).copied().unwrap_or([0; N_PLATFORMS]);
        out.years.push(year);
        out.raw_counts.push(raw);
        out.normalized.push(min_max_row(&raw));
    }
    out
}

fn min_max_row(raw: &[u64; N_PLATFORMS]) -> [f64; N_PLATFORMS] {
    let lo = *raw.iter().min().expect("non-empty row");
    let hi = *raw.iter().max().expect("non-empty row");
    let mut out = [0.0; N_PLATFORMS];
    if hi > lo {
        let range = (hi - lo) as f64;
        for (o, &v) in out.iter_mut().zip(raw.iter()) {
            *o = (v - lo) as f64 / range;
        }
    }
    out
}

/// Median-threshold labels: 1 iff Online Age >= the median.
///
/// For even-length input the lower median is used, so the >= side always
/// holds for at least half of the articles.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MedianLabeling {
    pub median_months: u32,
    pub labels: Vec<u8>,
}

pub fn median_threshold_labels(ages: &[u32]) -> Result<MedianLabeling> {
    if ages.is_empty() {
        return Err(Error::Argument("cannot take the median of no ages".into()));
    }
    let mut sorted = ages.to_vec();
    sorted.sort_unstable();
    let median = sorted[(sorted.len() - 1) / 2];
    let labels = ages.iter().map(|&a| u8::from(a >= median)).collect();
    Ok(MedianLabeling {
        median_months: median,
        labels,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::platform::PlatformId;
    use crate::record::parse_record;
    use crate::rng::stream;
    use rand::Rng;

    fn date(s: &str) -> Date {
        Date::parse_iso(s).unwrap()
    }

    #[test]
    fn first_last_spans_all_platforms() {
        let rec = parse_record(
            r#"{"article_id":"x","pubyear":2014,
                "first_seen":{"twitter":"2015-02-01","patent":"2014-12-01"},
                "last_seen":{"twitter":"2015-06-01","patent":"2016-01-15"}}"#,
        )
        .unwrap();
        // Oracle: min/max over the flattened date set.
        let all = [
            date("2015-02-01"),
            date("2015-06-01"),
            date("2014-12-01"),
            date("2016-01-15"),
        ];
        let expect = (*all.iter().min().unwrap(), *all.iter().max().unwrap());
        assert_eq!(first_last_mention(&rec), Some(expect));
    }

    #[test]
    fn first_last_singleton_and_absent() {
        let rec = parse_record(
            r#"{"article_id":"x","pubyear":2009,"first_seen":{"news":"2010-05-05"}}"#,
        )
        .unwrap();
        assert_eq!(
            first_last_mention(&rec),
            Some((date("2010-05-05"), date("2010-05-05")))
        );
        let rec = parse_record(r#"{"article_id":"x","pubyear":2009,"counts":{"news":7}}"#).unwrap();
        assert_eq!(first_last_mention(&rec), None);
    }

    #[test]
    fn online_age_is_month_index_difference() {
        assert_eq!(online_age(date("1975-06-15"), date("1975-06-15")).unwrap(), 0);
        // (2012*12+7) - (2010*12+3) = 28
        assert_eq!(online_age(date("2010-03-20"), date("2012-07-02")).unwrap(), 28);
        assert_eq!(online_age(date("2015-12-31"), date("2016-01-01")).unwrap(), 1);
        assert!(online_age(date("2016-01-01"), date("2015-12-31")).is_err());
    }

    #[test]
    fn online_age_is_translation_invariant() {
        let mut rng = stream(5, "age-shift", 0);
        for _ in 0..200 {
            let y = rng.gen_range(1930..2010);
            let m = rng.gen_range(1..=12);
            let first = Date::new(y, m, rng.gen_range(1..=28)).unwrap();
            let last = first.add_months(rng.gen_range(0..120));
            let k = rng.gen_range(-60..60);
            let base = online_age(first, last).unwrap();
            let shifted = online_age(first.add_months(k), last.add_months(k)).unwrap();
            assert_eq!(base, shifted);
        }
    }

    fn record_with_spans(spans: &[(PlatformId, &str, &str)]) -> ArticleRecord {
        let mut first = [None; N_PLATFORMS];
        let mut last = [None; N_PLATFORMS];
        let mut counts = [0u64; N_PLATFORMS];
        for (p, f, l) in spans {
            first[p.index()] = Some(date(f));
            last[p.index()] = Some(date(l));
            counts[p.index()] = 1;
        }
        ArticleRecord::from_parts("s".into(), 2014, None, counts, first, last, vec![]).unwrap()
    }

    #[test]
    fn active_requires_min_platforms_every_year() {
        let rec = record_with_spans(&[
            (PlatformId::Twitter, "2014-03-01", "2018-11-01"),
            (PlatformId::Mendeley, "2014-06-01", "2018-01-01"),
            (PlatformId::Patent, "2014-01-15", "2018-12-01"),
        ]);
        assert!(is_active(&rec, 2018, 3).unwrap());
        // Only two platforms cover every year.
        let rec = record_with_spans(&[
            (PlatformId::Twitter, "2014-03-01", "2018-11-01"),
            (PlatformId::Mendeley, "2014-06-01", "2018-01-01"),
        ]);
        assert!(!is_active(&rec, 2018, 3).unwrap());
    }

    #[test]
    fn activity_gap_year_fails_brute_force_agrees() {
        // Three platforms, but none covers 2016.
        let rec = record_with_spans(&[
            (PlatformId::Twitter, "2014-03-01", "2015-11-01"),
            (PlatformId::Mendeley, "2014-06-01", "2015-12-01"),
            (PlatformId::Patent, "2017-01-15", "2018-12-01"),
        ]);
        assert!(!is_active(&rec, 2018, 3).unwrap());

        // Brute force: per-year distinct platform count from the spans.
        let spans = [(2014, 2015), (2014, 2015), (2017, 2018)];
        let mut ok = true;
        for y in 2014..=2018 {
            let n = spans.iter().filter(|(a, b)| (*a..=*b).contains(&y)).count();
            if n < 3 {
                ok = false;
            }
        }
        assert!(!ok);
        assert_eq!(is_active(&rec, 2018, 3).unwrap(), ok);
    }

    #[test]
    fn activity_with_events_uses_event_years_only() {
        // Bounds span 2014..2018 but events skip 2016 entirely.
        let mut counts = [0u64; N_PLATFORMS];
        let mut events = Vec::new();
        for p in [PlatformId::Twitter, PlatformId::Mendeley, PlatformId::Patent] {
            counts[p.index()] = 4;
            for y in [2014, 2015, 2017, 2018] {
                events.push((p, Date::new(y, 6, 1).unwrap()));
            }
        }
        let rec = ArticleRecord::from_parts(
            "e".into(),
            2014,
            None,
            counts,
            [None; N_PLATFORMS],
            [None; N_PLATFORMS],
            events,
        )
        .unwrap();
        assert!(!is_active(&rec, 2018, 3).unwrap());
        assert!(is_active(&rec, 2015, 3).unwrap());
    }

    #[test]
    fn is_active_rejects_undated_records() {
        let rec = parse_record(r#"{"article_id":"u","pubyear":2010,"counts":{"news":3}}"#).unwrap();
        assert!(is_active(&rec, 2018, 3).is_err());
    }

    #[test]
    fn active_set_is_monotone_in_min_platforms() {
        let mut rng = stream(9, "active-mono", 0);
        let records: Vec<ArticleRecord> = (0..200)
            .map(|i| {
                let mut first = [None; N_PLATFORMS];
                let mut last = [None; N_PLATFORMS];
                let mut counts = [0u64; N_PLATFORMS];
                let n_platforms = rng.gen_range(0..6);
                for p in ALL_PLATFORMS.into_iter().take(n_platforms) {
                    let fy = rng.gen_range(2012..=2018);
                    let ly = rng.gen_range(fy..=2018);
                    first[p.index()] = Some(Date::new(fy, 1, rng.gen_range(1..=28)).unwrap());
                    last[p.index()] = Some(Date::new(ly, 12, rng.gen_range(1..=28)).unwrap());
                    counts[p.index()] = rng.gen_range(1..10);
                }
                ArticleRecord::from_parts(
                    format!("r{i}"),
                    rng.gen_range(2000..=2016),
                    None,
                    counts,
                    first,
                    last,
                    vec![],
                )
                .unwrap()
            })
            .collect();
        let window = PubWindow::new(1920, 2016).unwrap();
        let mut previous: Option<Vec<String>> = None;
        for m in 1..=5 {
            let ids: Vec<String> = active_set(&records, 2018, m, window)
                .unwrap()
                .iter()
                .map(|(r, _)| r.article_id().to_string())
                .collect();
            if let Some(prev) = &previous {
                assert!(
                    ids.iter().all(|id| prev.contains(id)),
                    "active set must shrink as min_platforms grows"
                );
            }
            previous = Some(ids);
        }
    }

    #[test]
    fn active_set_preserves_input_order() {
        let active = record_with_spans(&[
            (PlatformId::Twitter, "2016-03-01", "2018-11-01"),
            (PlatformId::Mendeley, "2016-06-01", "2018-01-01"),
            (PlatformId::Patent, "2016-01-15", "2018-12-01"),
        ]);
        let inactive =
            parse_record(r#"{"article_id":"i","pubyear":2014,"counts":{"news":3}}"#).unwrap();
        let records = vec![inactive.clone(), active.clone(), inactive.clone(), active];
        let window = PubWindow::new(1920, 2016).unwrap();
        let set = active_set(&records, 2018, 3, window).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(active_set(&[], 2018, 3, window).unwrap().len(), 0);
    }

    #[test]
    fn yearly_series_matches_group_by_oracle() {
        let mut rng = stream(3, "series", 0);
        let records: Vec<ArticleRecord> = (0..500)
            .map(|i| {
                let year = rng.gen_range(1990..=1999);
                let dated = rng.gen_bool(0.5);
                let mut counts = [0u64; N_PLATFORMS];
                counts[PlatformId::Twitter.index()] = rng.gen_range(0..20);
                counts[PlatformId::News.index()] = rng.gen_range(0..5);
                let mut first = [None; N_PLATFORMS];
                if dated {
                    first[PlatformId::Twitter.index()] = Some(Date::new(year, 1, 1).unwrap());
                }
                ArticleRecord::from_parts(
                    format!("g{i}"),
                    year,
                    None,
                    counts,
                    first,
                    [None; N_PLATFORMS],
                    vec![],
                )
                .unwrap()
            })
            .collect();

        let series = yearly_series(&records);

        // Independent group-by.
        let mut oracle: BTreeMap<i32, (u64, u64, u64)> = BTreeMap::new();
        for r in &records {
            let e = oracle.entry(r.publication_year()).or_default();
            e.0 += 1;
            e.1 += u64::from(r.has_dated_mentions());
            e.2 += r.total_mentions();
        }
        for (i, &y) in series.years.iter().enumerate() {
            let (p, d, m) = oracle.get(&y).copied().unwrap_or_default();
            assert_eq!(series.published[i], p);
            assert_eq!(series.with_dates[i], d);
            assert_eq!(series.total_mentions[i], m);
            assert!(series.with_dates[i] <= series.published[i]);
        }
    }

    #[test]
    fn yearly_series_fills_gap_years_with_zeros() {
        let records = vec![
            parse_record(r#"{"article_id":"a","pubyear":1990,"counts":{"news":3}}"#).unwrap(),
            parse_record(r#"{"article_id":"b","pubyear":1993,"counts":{"news":4}}"#).unwrap(),
        ];
        let series = yearly_series(&records);
        assert_eq!(series.years, vec![1990, 1991, 1992, 1993]);
        assert_eq!(series.published, vec![1, 0, 0, 1]);
    }

    #[test]
    fn share_matrix_min_max_arithmetic() {
        let raw = {
            let mut r = [0u64; N_PLATFORMS];
            r[0] = 0;
            r[1] = 5;
            r[2] = 10;
            r
        };
        let row = min_max_row(&raw);
        assert_eq!(row[1], 0.5);
        assert_eq!(row[2], 1.0);
        assert_eq!(row[0], 0.0);
        // Degenerate all-equal row maps to all zero.
        assert!(min_max_row(&[7; N_PLATFORMS]).iter().all(|&v| v == 0.0));
        assert!(min_max_row(&[0; N_PLATFORMS]).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn share_matrix_rows_attain_bounds() {
        let mut rng = stream(4, "shares", 0);
        let records: Vec<ArticleRecord> = (0..300)
            .map(|i| {
                let mut counts = [0u64; N_PLATFORMS];
                for c in counts.iter_mut() {
                    *c = rng.gen_range(0..50);
                }
                ArticleRecord::from_parts(
                    format!("s{i}"),
                    rng.gen_range(2000..=2005),
                    None,
                    counts,
                    [None; N_PLATFORMS],
                    [None; N_PLATFORMS],
                    vec![],
                )
                .unwrap()
            })
            .collect();
        let matrix = platform_share_matrix(&records);
        for (row, raw) in matrix.normalized.iter().zip(&matrix.raw_counts) {
            assert!(row.iter().all(|&v| (0.0..=1.0).contains(&v)));
            let degenerate = raw.iter().min() == raw.iter().max();
            if !degenerate {
                assert!(row.contains(&0.0));
                assert!(row.contains(&1.0));
            }
        }
    }

    #[test]
    fn median_labels_odd_and_even() {
        let m = median_threshold_labels(&[10, 16, 20]).unwrap();
        assert_eq!(m.median_months, 16);
        assert_eq!(m.labels, vec![0, 1, 1]);

        // Lower median for even length, per the sort-based rule.
        let mut sorted = [4u32, 8];
        sorted.sort_unstable();
        assert_eq!(sorted[(sorted.len() - 1) / 2], 4);
        let m = median_threshold_labels(&[4, 8]).unwrap();
        assert_eq!(m.median_months, 4);
        assert_eq!(m.labels, vec![1, 1]);

        assert!(median_threshold_labels(&[]).is_err());
    }

    #[test]
    fn median_side_always_covers_at_least_half() {
        let mut rng = stream(6, "median-half", 0);
        for _ in 0..100 {
            let n = rng.gen_range(1..60);
            let ages: Vec<u32> = (0..n).map(|_| rng.gen_range(0..120)).collect();
            let m = median_threshold_labels(&ages).unwrap();
            let ones = m.labels.iter().filter(|&&l| l == 1).count();
            assert!(ones * 2 >= n, "{ones} of {n} at median {}", m.median_months);
            let les = ages.iter().filter(|&&a| a <= m.median_months).count();
            assert!(les * 2 >= n);
        }
    }
}
