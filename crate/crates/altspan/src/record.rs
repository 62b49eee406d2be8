//! Canonical article records parsed from altmetric-style JSON lines.
//!
//! One line is one JSON object:
//!
//! ```json
//! {"article_id": "a1", "pubyear": 2015, "pubdate": "2015-03-02",
//!  "counts": {"twitter": 3, "mendeley": 12},
//!  "first_seen": {"twitter": "2015-04-01"},
//!  "last_seen": {"twitter": 1459468800},
//!  "events": [{"source": "twitter", "date": "2015-04-01"}]}
//! ```
//!
//! `article_id` and `pubyear` are required. Per-platform counts default to
//! zero; dates are ISO-8601 text or integer epoch seconds. Platform keys
//! outside the canonical 21 are ignored (callers can tally them). Events, when
//! present for a platform, must bracket to that platform's first/last dates;
//! bounds missing from the input are derived from the events.

use std::collections::BTreeMap;

use serde::Deserialize;

use crate::date::Date;
use crate::error::{Error, Result};
use crate::platform::{PlatformId, ALL_PLATFORMS, N_PLATFORMS};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArticleRecord {
    article_id: String,
    publication_year: i32,
    publication_date: Option<Date>,
    counts: [u64; N_PLATFORMS],
    first_seen: [Option<Date>; N_PLATFORMS],
    last_seen: [Option<Date>; N_PLATFORMS],
    /// Dated mention events, sorted by (platform, date). Empty when the input
    /// carried only first/last bounds.
    events: Vec<(PlatformId, Date)>,
}

impl ArticleRecord {
    /// Build and validate a record from raw parts.
    ///
    /// Normalizations applied: events are sorted by (platform, date) and their
    /// min/max fill in missing per-platform bounds; a platform with only one
    /// bound present gets the other set equal (a single known mention).
    pub fn from_parts(
        article_id: String,
        publication_year: i32,
        publication_date: Option<Date>,
        counts: [u64; N_PLATFORMS],
        mut first_seen: [Option<Date>; N_PLATFORMS],
        mut last_seen: [Option<Date>; N_PLATFORMS],
        mut events: Vec<(PlatformId, Date)>,
    ) -> Result<Self> {
        if article_id.is_empty() {
            return Err(Error::Schema("empty article_id".into()));
        }

        events.sort_unstable_by_key(|(p, d)| (p.index(), *d));
        for platform in ALL_PLATFORMS {
            let i = platform.index();
            let mut span: Option<(Date, Date)> = None;
            for (p, d) in events.iter().filter(|(p, _)| *p == platform) {
                debug_assert_eq!(*p, platform);
                span = Some(match span {
                    None => (*d, *d),
                    Some((lo, hi)) => (lo.min(*d), hi.max(*d)),
                });
            }
            if let Some((lo, hi)) = span {
                match (first_seen[i], last_seen[i]) {
                    (None, None) => {
                        first_seen[i] = Some(lo);
                        last_seen[i] = Some(hi);
                    }
                    (f, l) => {
                        if f.is_some_and(|f| f != lo) || l.is_some_and(|l| l != hi) {
                            return Err(Error::Validation(format!(
                                "{article_id}: {platform} events span {lo}..{hi} but bounds disagree"
                            )));
                        }
                        first_seen[i] = Some(lo);
                        last_seen[i] = Some(hi);
                    }
                }
            }
            match (first_seen[i], last_seen[i]) {
                (Some(f), Some(l)) if f > l => {
                    return Err(Error::Validation(format!(
                        "{article_id}: {platform} first_seen {f} after last_seen {l}"
                    )));
                }
                (Some(f), None) => last_seen[i] = Some(f),
                (None, Some(l)) => first_seen[i] = Some(l),
                _ => {}
            }
        }

        Ok(ArticleRecord {
            article_id,
            publication_year,
            publication_date,
            counts,
            first_seen,
            last_seen,
            events,
        })
    }

    pub fn article_id(&self) -> &str {
        &self.article_id
    }

    pub fn publication_year(&self) -> i32 {
        self.publication_year
    }

    pub fn publication_date(&self) -> Option<Date> {
        self.publication_date
    }

    /// Mention counts in canonical platform order.
    pub fn counts(&self) -> &[u64; N_PLATFORMS] {
        &self.counts
    }

    pub fn count(&self, platform: PlatformId) -> u64 {
        self.counts[platform.index()]
    }

    pub fn total_mentions(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn first_seen(&self, platform: PlatformId) -> Option<Date> {
        self.first_seen[platform.index()]
    }

    pub fn last_seen(&self, platform: PlatformId) -> Option<Date> {
        self.last_seen[platform.index()]
    }

    pub fn events(&self) -> &[(PlatformId, Date)] {
        &self.events
    }

    pub fn has_events_for(&self, platform: PlatformId) -> bool {
        self.events.iter().any(|(p, _)| *p == platform)
    }

    /// True iff at least one platform carries a mention date.
    pub fn has_dated_mentions(&self) -> bool {
        !self.events.is_empty() || self.first_seen.iter().any(Option::is_some)
    }

    /// Canonical single-line JSON; `parse_record` on the output reproduces the
    /// record exactly.
    pub fn to_json_line(&self) -> String {
        use serde_json::{json, Map, Value};

        let mut obj = Map::new();
        obj.insert("article_id".into(), json!(self.article_id));
        obj.insert("pubyear".into(), json!(self.publication_year));
        if let Some(d) = self.publication_date {
            obj.insert("pubdate".into(), json!(d.to_string()));
        }
        let date_map = |dates: &[Option<Date>; N_PLATFORMS]| -> Value {
            let mut m = Map::new();
            for p in ALL_PLATFORMS {
                if let Some(d) = dates[p.index()] {
                    m.insert(p.as_str().into(), json!(d.to_string()));
                }
            }
            Value::Object(m)
        };
        let mut counts = Map::new();
        for p in ALL_PLATFORMS {
            if self.counts[p.index()] > 0 {
                counts.insert(p.as_str().into(), json!(self.counts[p.index()]));
            }
        }
        obj.insert("counts".into(), Value::Object(counts));
        if self.first_seen.iter().any(Option::is_some) {
            obj.insert("first_seen".into(), date_map(&self.first_seen));
            obj.insert("last_seen".into(), date_map(&self.last_seen));
        }
        if !self.events.is_empty() {
            let evs: Vec<Value> = self
                .events
                .iter()
                .map(|(p, d)| json!({"source": p.as_str(), "date": d.to_string()}))
                .collect();
            obj.insert("events".into(), Value::Array(evs));
        }
        Value::Object(obj).to_string()
    }
}

/// A date field in the wire format: ISO-8601 text or integer epoch seconds.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum RawDate {
    Epoch(i64),
    Text(String),
}

impl RawDate {
    fn to_date(&self) -> Result<Date> {
        match self {
            RawDate::Epoch(secs) => Date::from_epoch_seconds(*secs),
            RawDate::Text(s) => Date::parse_iso(s),
        }
    }
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    article_id: Option<String>,
    pubyear: Option<i64>,
    pubdate: Option<RawDate>,
    #[serde(default)]
    counts: BTreeMap<String, i64>,
    #[serde(default)]
    first_seen: BTreeMap<String, RawDate>,
    #[serde(default)]
    last_seen: BTreeMap<String, RawDate>,
    #[serde(default)]
    events: Vec<RawEvent>,
}

#[derive(Debug, Deserialize)]
struct RawEvent {
    source: String,
    date: RawDate,
}

/// Parse one JSON line into a validated record.
pub fn parse_record(line: &str) -> Result<ArticleRecord> {
    parse_record_counting_unknown(line).map(|(rec, _)| rec)
}

/// As [`parse_record`], also reporting how many platform keys were ignored
/// because they fall outside the canonical 21.
pub fn parse_record_counting_unknown(line: &str) -> Result<(ArticleRecord, u64)> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| Error::Parse {
        line: 1,
        msg: e.to_string(),
    })?;

    let article_id = raw
        .article_id
        .filter(|s| !s.is_empty())
        .ok_or_else(|| Error::Schema("missing article_id".into()))?;
    let pubyear = raw
        .pubyear
        .ok_or_else(|| Error::Schema(format!("{article_id}: missing pubyear")))?;
    let pubyear = i32::try_from(pubyear)
        .map_err(|_| Error::Validation(format!("{article_id}: pubyear {pubyear} out of range")))?;
    let pubdate = raw.pubdate.map(|d| d.to_date()).transpose()?;

    let mut unknown = 0u64;
    let mut counts = [0u64; N_PLATFORMS];
    for (key, value) in &raw.counts {
        match PlatformId::parse(key) {
            Ok(p) => {
                if *value < 0 {
                    return Err(Error::Validation(format!(
                        "{article_id}: negative count {value} for {key}"
                    )));
                }
                counts[p.index()] = *value as u64;
            }
            Err(_) => unknown += 1,
        }
    }

    let mut first_seen = [None; N_PLATFORMS];
    let mut last_seen = [None; N_PLATFORMS];
    for (map, out) in [(&raw.first_seen, &mut first_seen), (&raw.last_seen, &mut last_seen)] {
        for (key, value) in map.iter() {
            match PlatformId::parse(key) {
                Ok(p) => out[p.index()] = Some(value.to_date()?),
                Err(_) => unknown += 1,
            }
        }
    }

    let mut events = Vec::with_capacity(raw.events.len());
    for ev in &raw.events {
        match PlatformId::parse(&ev.source) {
            Ok(p) => events.push((p, ev.date.to_date()?)),
            Err(_) => unknown += 1,
        }
    }

    let record = ArticleRecord::from_parts(
        article_id, pubyear, pubdate, counts, first_seen, last_seen, events,
    )?;
    Ok((record, unknown))
}
