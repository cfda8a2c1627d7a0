use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, Months, NaiveDate};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::IdentifierError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatePrecision {
    Year,
    Month,
    Day,
}

/// A calendar date that may only be known to year or month precision.
///
/// Comparisons between dates of different precision happen at the coarser of
/// the two precisions, so `2019-03` and `2019-03-15` compare equal.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct PartialDate {
    year: i32,
    month: Option<u32>,
    day: Option<u32>,
}

impl PartialDate {
    pub fn year(year: i32) -> Self {
        Self { year, month: None, day: None }
    }

    pub fn year_month(year: i32, month: u32) -> Result<Self, IdentifierError> {
        if !(1..=12).contains(&month) {
            return Err(IdentifierError::Format(format!("month {month} out of range")));
        }
        Ok(Self { year, month: Some(month), day: None })
    }

    pub fn ymd(year: i32, month: u32, day: u32) -> Result<Self, IdentifierError> {
        NaiveDate::from_ymd_opt(year, month, day)
            .ok_or_else(|| IdentifierError::Format(format!("invalid date {year}-{month}-{day}")))?;
        Ok(Self { year, month: Some(month), day: Some(day) })
    }

    pub fn from_naive(d: NaiveDate) -> Self {
        Self { year: d.year(), month: Some(d.month()), day: Some(d.day()) }
    }

    /// Builds a date from Crossref-style `date-parts` (`[year, month?, day?]`).
    pub fn from_parts(parts: &[i64]) -> Result<Self, IdentifierError> {
        let to_u32 = |v: i64| u32::try_from(v).map_err(|_| IdentifierError::Format(format!("bad date part {v}")));
        match parts {
            [y] => Ok(Self::year(*y as i32)),
            [y, m] => Self::year_month(*y as i32, to_u32(*m)?),
            [y, m, d, ..] => Self::ymd(*y as i32, to_u32(*m)?, to_u32(*d)?),
            [] => Err(IdentifierError::Format("empty date-parts".into())),
        }
    }

    pub fn year_value(&self) -> i32 {
        self.year
    }

    pub fn month_value(&self) -> Option<u32> {
        self.month
    }

    pub fn precision(&self) -> DatePrecision {
        match (self.month, self.day) {
            (None, _) => DatePrecision::Year,
            (Some(_), None) => DatePrecision::Month,
            (Some(_), Some(_)) => DatePrecision::Day,
        }
    }

    pub fn truncate(&self, precision: DatePrecision) -> Self {
        match precision {
            DatePrecision::Year => Self::year(self.year),
            DatePrecision::Month => Self { day: None, ..*self },
            DatePrecision::Day => *self,
        }
    }

    pub fn first_day(&self) -> NaiveDate {
        NaiveDate::from_ymd_opt(self.year, self.month.unwrap_or(1), self.day.unwrap_or(1))
            .expect("validated on construction")
    }

    pub fn last_day(&self) -> NaiveDate {
        match (self.month, self.day) {
            (Some(m), Some(d)) => NaiveDate::from_ymd_opt(self.year, m, d).expect("validated"),
            (Some(m), None) => {
                let start = NaiveDate::from_ymd_opt(self.year, m, 1).expect("validated");
                start + Months::new(1) - chrono::Days::new(1)
            }
            _ => NaiveDate::from_ymd_opt(self.year, 12, 31).expect("valid"),
        }
    }

    /// Compares at the coarser of the two precisions.
    pub fn cmp_common(&self, other: &Self) -> Ordering {
        let p = self.precision().min(other.precision());
        self.truncate(p).first_day().cmp(&other.truncate(p).first_day())
    }

    /// Days from `self` to `later`, both truncated to their common precision
    /// and taken at the start of the resulting period.
    pub fn days_until(&self, later: &Self) -> i64 {
        let p = self.precision().min(later.precision());
        (later.truncate(p).first_day() - self.truncate(p).first_day()).num_days()
    }

    /// The earlier of two dates, evaluated and reported at their common precision.
    pub fn earliest(&self, other: &Self) -> Self {
        let p = self.precision().min(other.precision());
        let (a, b) = (self.truncate(p), other.truncate(p));
        if b.first_day() < a.first_day() {
            b
        } else {
            a
        }
    }
}

impl fmt::Display for PartialDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:04}", self.year)?;
        if let Some(m) = self.month {
            write!(f, "-{m:02}")?;
        }
        if let Some(d) = self.day {
            write!(f, "-{d:02}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for PartialDate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PartialDate({self})")
    }
}

impl FromStr for PartialDate {
    type Err = IdentifierError;

    /// Accepts `YYYY`, `YYYY-MM`, `YYYY-MM-DD` and ISO timestamps whose first
    /// ten characters are a date.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let date_part = match s.find(['T', ' ']) {
            Some(i) => &s[..i],
            None => s,
        };
        let bad = || IdentifierError::Format(format!("unrecognized date {s:?}"));
        let parts: Vec<&str> = date_part.split('-').collect();
        let num = |p: &str| p.parse::<i64>().map_err(|_| bad());
        match parts.as_slice() {
            [y] if y.len() == 4 => Self::from_parts(&[num(y)?]),
            [y, m] if y.len() == 4 => Self::from_parts(&[num(y)?, num(m)?]),
            [y, m, d] if y.len() == 4 => Self::from_parts(&[num(y)?, num(m)?, num(d)?]),
            _ => Err(bad()),
        }
    }
}

impl Serialize for PartialDate {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for PartialDate {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}
