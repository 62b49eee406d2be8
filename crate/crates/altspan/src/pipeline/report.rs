//! Deterministic tabular output: CSV plus a JSON mirror of each table.
//!
//! Floats are fixed at 6 significant digits; non-finite values surface as the
//! explicit "undefined" sentinel, never as NaN text.

use std::path::Path;

use crate::error::{Error, Result};

/// Format with 6 significant digits.
pub fn fmt_sig(x: f64) -> String {
    fmt_sig_n(x, 6)
}

pub fn fmt_sig_n(x: f64, sig: u32) -> String {
    if !x.is_finite() {
        return "undefined".into();
    }
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let scale = i32::try_from(sig).expect("small") - 1 - magnitude;
    let factor = 10f64.powi(scale);
    let rounded = (x * factor).round() / factor;
    // Rounding can bump the magnitude (e.g. 0.99999 -> 1.0); recompute.
    let magnitude = rounded.abs().log10().floor() as i32;
    let decimals = (i32::try_from(sig).expect("small") - 1 - magnitude).max(0) as usize;
    format!("{rounded:.decimals$}")
}

/// One table, written as `name.csv` and mirrored as `name.json`.
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<()> {
        let csv_path = dir.join(format!("{name}.csv"));
        let mut text = self.columns.join(",");
        text.push('\n');
        for row in &self.rows {
            text.push_str(&row.join(","));
            text.push('\n');
        }
        std::fs::write(&csv_path, text).map_err(|e| Error::io(&csv_path, e))?;

        let json_path = dir.join(format!("{name}.json"));
        let objects: Vec<serde_json::Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = serde_json::Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert(col.clone(), serde_json::Value::String(cell.clone()));
                }
                serde_json::Value::Object(obj)
            })
            .collect();
        let json = serde_json::to_string_pretty(&objects)
            .map_err(|e| Error::Internal(format!("table serialization: {e}")))?;
        std::fs::write(&json_path, json + "\n").map_err(|e| Error::io(&json_path, e))
    }
}

/// Parse a CSV written by [`Table::write`]; no quoting, values never contain
/// commas.
pub fn read_csv(path: &Path) -> Result<(Vec<String>, Vec<Vec<String>>)> {
    let text = std::fs::read_to_string(path).map_err(|_| {
        Error::Dependency(path.display().to_string())
    })?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Validation(format!("{}: empty table", path.display())))?
        .split(',')
        .map(str::to_string)
        .collect();
    let rows = lines
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    Ok((header, rows))
}
