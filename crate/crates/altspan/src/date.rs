//! Minimal calendar-date type.
//!
//! Mention timestamps arrive either as `YYYY-MM-DD` text or as integer epoch
//! seconds; both normalize to a UTC calendar date. Downstream math only ever
//! needs year/month arithmetic (the month-index difference behind Online Age),
//! so this stays deliberately small.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Date {
    year: i32,
    month: u8,
    day: u8,
}

impl Date {
    pub fn new(year: i32, month: u32, day: u32) -> Result<Self> {
        if !(1..=12).contains(&month) {
            return Err(Error::Validation(format!("month {month} out of range")));
        }
        if day < 1 || day > days_in_month(year, month) {
            return Err(Error::Validation(format!(
                "day {day} out of range for {year}-{month:02}"
            )));
        }
        Ok(Date {
            year,
            month: month as u8,
            day: day as u8,
        })
    }

    pub fn year(&self) -> i32 {
        self.year
    }

    pub fn month(&self) -> u32 {
        u32::from(self.month)
    }

    pub fn day(&self) -> u32 {
        u32::from(self.day)
    }

    /// Calendar month index: `year * 12 + (month - 1)`. Day of month is
    /// deliberately ignored everywhere this is used.
    pub fn month_index(&self) -> i64 {
        i64::from(self.year) * 12 + i64::from(self.month) - 1
    }

    /// Parse strict `YYYY-MM-DD`. Partial dates (year-only, year-month) are
    /// rejected rather than guessed at.
    pub fn parse_iso(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split('-').collect();
        // A leading '-' would split into an empty first part; no such years
        // occur in mention data, so keep the fast path strict.
        if parts.len() != 3 {
            return Err(Error::Validation(format!(
                "date {s:?} is not YYYY-MM-DD"
            )));
        }
        let bad = |_| Error::Validation(format!("date {s:?} is not YYYY-MM-DD"));
        let year: i32 = parts[0].parse().map_err(bad)?;
        let month: u32 = parts[1].parse().map_err(bad)?;
        let day: u32 = parts[2].parse().map_err(bad)?;
        Date::new(year, month, day)
    }

    /// UTC calendar date for an epoch-seconds timestamp.
    pub fn from_epoch_seconds(secs: i64) -> Result<Self> {
        let days = secs.div_euclid(86_400);
        Ok(civil_from_days(days))
    }

    /// The date `months` whole months later, day clamped to the target month.
    pub fn add_months(&self, months: i64) -> Self {
        let idx = self.month_index() + months;
        let year = idx.div_euclid(12) as i32;
        let month = (idx.rem_euclid(12) + 1) as u32;
        let day = u32::from(self.day).min(days_in_month(year, month));
        Date {
            year,
            month: month as u8,
            day: day as u8,
        }
    }
}

impl fmt::Display for Date {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}-{:02}-{:02}", self.year, self.month, self.day)
    }
}

impl Serialize for Date {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Date {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Date::parse_iso(&s).map_err(serde::de::Error::custom)
    }
}

fn is_leap(year: i32) -> bool {
    year % 4 == 0 && (year % 100 != 0 || year % 400 == 0)
}

fn days_in_month(year: i32, month: u32) -> u32 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap(year) => 29,
        2 => 28,
        _ => unreachable!("month validated"),
    }
}

// Days-to-civil conversion (Euclidean affine transform over 400-year eras).
fn civil_from_days(days_from_epoch: i64) -> Date {
    let z = days_from_epoch + 719_468;
    let era = z.div_euclid(146_097);
    let doe = z.rem_euclid(146_097); // [0, 146096]
    let yoe = (doe - doe / 1460 + doe / 36524 - doe / 146_096) / 365; // [0, 399]
    let y = yoe + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100); // [0, 365]
    let mp = (5 * doy + 2) / 153; // [0, 11]
    let d = doy - (153 * mp + 2) / 5 + 1; // [1, 31]
    let m = if mp < 10 { mp + 3 } else { mp - 9 }; // [1, 12]
    let y = if m <= 2 { y + 1 } else { y };
    Date {
        year: y as i32,
        month: m as u8,
        day: d as u8,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn epoch_and_text_agree() {
        // 1420070400 s = 2015-01-01T00:00:00Z
        let from_epoch = Date::from_epoch_seconds(1_420_070_400).unwrap();
        let from_text = Date::parse_iso("2015-01-01").unwrap();
        assert_eq!(from_epoch, from_text);
    }

    #[test]
    fn epoch_mid_day_and_pre_epoch() {
        let d = Date::from_epoch_seconds(1_420_070_400 + 50_000).unwrap();
        assert_eq!(d.to_string(), "2015-01-01");
        // -86400 s = 1969-12-31
        let d = Date::from_epoch_seconds(-86_400).unwrap();
        assert_eq!(d.to_string(), "1969-12-31");
        let d = Date::from_epoch_seconds(-1).unwrap();
        assert_eq!(d.to_string(), "1969-12-31");
    }

    #[test]
    fn rejects_partial_and_invalid_dates() {
        assert!(Date::parse_iso("2015").is_err());
        assert!(Date::parse_iso("2015-06").is_err());
        assert!(Date::parse_iso("2015-13-01").is_err());
        assert!(Date::parse_iso("2015-02-29").is_err());
        assert!(Date::parse_iso("2016-02-29").is_ok()); // leap year
        assert!(Date::parse_iso("garbage").is_err());
    }

    #[test]
    fn month_index_arithmetic() {
        let a = Date::parse_iso("2010-03-20").unwrap();
        let b = Date::parse_iso("2012-07-02").unwrap();
        assert_eq!(b.month_index() - a.month_index(), 28);
        let d = Date::parse_iso("2015-12-31").unwrap();
        assert_eq!(d.add_months(1).to_string(), "2016-01-31");
        assert_eq!(d.add_months(2).to_string(), "2016-02-29");
        assert_eq!(d.add_months(-12).to_string(), "2014-12-31");
    }

    #[test]
    fn civil_round_trip_over_range() {
        // Spot-check one day per month over 1919..2020.
        for year in 1919..=2020 {
            for month in 1..=12 {
                let d = Date::new(year, month, 15).unwrap();
                let secs = days_from_civil(d) * 86_400;
                assert_eq!(Date::from_epoch_seconds(secs).unwrap(), d);
            }
        }
    }

    // Inverse of civil_from_days, test-only.
    fn days_from_civil(d: Date) -> i64 {
        let y = i64::from(d.year) - i64::from(d.month <= 2);
        let era = y.div_euclid(400);
        let yoe = y - era * 400;
        let m = i64::from(d.month);
        let mp = if m > 2 { m - 3 } else { m + 9 };
        let doy = (153 * mp + 2) / 5 + i64::from(d.day) - 1;
        let doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
        era * 146_097 + doe - 719_468
    }
}
