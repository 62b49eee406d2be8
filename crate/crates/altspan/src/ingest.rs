//! Streaming corpus loading with publication-window filtering.
//!
//! Mirrors the two-stage dataset bookkeeping used throughout the toolkit: all
//! parseable in-window records are kept (with or without mention dates), and
//! [`CorpusStats`] tallies every disposition so `n_total` always partitions
//! into kept + dropped + malformed. Malformed lines are noise, not fatal.

use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::record::{parse_record_counting_unknown, ArticleRecord};

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    /// Non-empty input lines seen.
    pub n_total: u64,
    /// Kept records that carry at least one mention date.
    pub n_with_dates: u64,
    /// Parsed records outside the publication window.
    pub n_dropped_window: u64,
    /// Lines rejected by parsing or validation.
    pub n_malformed: u64,
    /// Platform keys ignored because they are not in the canonical set.
    pub n_unknown_keys: u64,
}

impl CorpusStats {
    pub fn n_kept(&self) -> u64 {
        self.n_total - self.n_dropped_window - self.n_malformed
    }
}

/// Inclusive publication-year window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PubWindow {
    pub start_year: i32,
    pub end_year: i32,
}

impl PubWindow {
    pub fn new(start_year: i32, end_year: i32) -> Result<Self> {
        if start_year > end_year {
            return Err(Error::Argument(format!(
                "publication window {start_year}..{end_year} is empty"
            )));
        }
        Ok(PubWindow { start_year, end_year })
    }

    pub fn contains(&self, year: i32) -> bool {
        (self.start_year..=self.end_year).contains(&year)
    }
}

/// Load a JSON-lines corpus, keeping in-window records in file order.
///
/// Aborts only on I/O failure; malformed lines and out-of-window records are
/// tallied and skipped.
pub fn load_corpus(path: &Path, window: PubWindow) -> Result<(Vec<ArticleRecord>, CorpusStats)> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    load_corpus_from(BufReader::new(file), window, path)
}

fn load_corpus_from<R: BufRead>(
    reader: R,
    window: PubWindow,
    path: &Path,
) -> Result<(Vec<ArticleRecord>, CorpusStats)> {
    let mut records = Vec::new();
    let mut stats = CorpusStats::default();

    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        stats.n_total += 1;
        match parse_record_counting_unknown(&line) {
            Ok((record, unknown)) => {
                stats.n_unknown_keys += unknown;
                if !window.contains(record.publication_year()) {
                    stats.n_dropped_window += 1;
                    continue;
                }
                if record.has_dated_mentions() {
                    stats.n_with_dates += 1;
                }
                records.push(record);
            }
            Err(_) => stats.n_malformed += 1,
        }
    }

    Ok((records, stats))
}

/// Write records in canonical JSON-lines form, input order preserved.
pub fn write_corpus(path: &Path, records: &[ArticleRecord]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    for record in records {
        writeln!(w, "{}", record.to_json_line()).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}
