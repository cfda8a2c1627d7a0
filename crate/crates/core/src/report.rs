//! Aggregation of classifications into OA-share reports.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Write};
use std::str::FromStr;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use crate::model::{OaClass, OaClassification};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GroupField {
    Year,
    JournalTitle,
    DocumentType,
    AccessMode,
    Institution,
    IssnL,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unknown group_by field {0:?} (expected one of year, journal_title, document_type, access_mode, institution, issn_l)")]
pub struct UnknownFieldError(pub String);

impl GroupField {
    pub fn name(&self) -> &'static str {
        match self {
            GroupField::Year => "year",
            GroupField::JournalTitle => "journal_title",
            GroupField::DocumentType => "document_type",
            GroupField::AccessMode => "access_mode",
            GroupField::Institution => "institution",
            GroupField::IssnL => "issn_l",
        }
    }

    /// Missing values group under the empty string.
    pub fn value(&self, c: &OaClassification) -> String {
        let ctx = &c.context;
        match self {
            GroupField::Year => ctx.publication_date.map(|d| d.year_value().to_string()).unwrap_or_default(),
            GroupField::JournalTitle => ctx.journal_title.clone(),
            GroupField::DocumentType => ctx.document_type.map(|d| d.code().to_string()).unwrap_or_default(),
            GroupField::AccessMode => c.access_mode.code().to_string(),
            GroupField::Institution => ctx.institution.clone().unwrap_or_default(),
            GroupField::IssnL => ctx.issn_l.as_ref().map(|i| i.to_string()).unwrap_or_default(),
        }
    }
}

impl FromStr for GroupField {
    type Err = UnknownFieldError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.trim() {
            "year" => GroupField::Year,
            "journal_title" => GroupField::JournalTitle,
            "document_type" => GroupField::DocumentType,
            "access_mode" => GroupField::AccessMode,
            "institution" => GroupField::Institution,
            "issn_l" => GroupField::IssnL,
            other => return Err(UnknownFieldError(other.to_string())),
        })
    }
}

impl fmt::Display for GroupField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub fn parse_group_by<S: AsRef<str>>(names: &[S]) -> Result<Vec<GroupField>, UnknownFieldError> {
    names.iter().map(|n| n.as_ref().parse()).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggregationMode {
    /// Each record counts once, under its primary class.
    #[default]
    PrimaryLabel,
    /// Each label of a record counts once; shares may sum above one.
    MultiLabel,
}

impl FromStr for AggregationMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "primary" | "primary_label" => Ok(AggregationMode::PrimaryLabel),
            "multi" | "multi_label" => Ok(AggregationMode::MultiLabel),
            other => Err(format!("unknown aggregation mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShareReport {
    pub group_key: Vec<(String, String)>,
    /// Every class code in canonical order, zero counts included.
    pub counts: IndexMap<String, u64>,
    pub total: u64,
    pub shares: IndexMap<String, f64>,
}

impl ShareReport {
    fn from_counts(group_key: Vec<(String, String)>, counts: &[u64], total: u64) -> Self {
        let classes = OaClass::all();
        let mut c = IndexMap::with_capacity(classes.len());
        let mut s = IndexMap::with_capacity(classes.len());
        for (class, &n) in classes.iter().zip(counts) {
            c.insert(class.code(), n);
            s.insert(class.code(), if total == 0 { 0.0 } else { n as f64 / total as f64 });
        }
        ShareReport { group_key, counts: c, total, shares: s }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
struct Tally {
    counts: Vec<u64>,
    total: u64,
}

/// Streaming accumulator. Accumulators built over disjoint inputs can be
/// merged; the result equals accumulating the concatenation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShareAccumulator {
    group_by: Vec<GroupField>,
    mode: AggregationMode,
    index: BTreeMap<OaClass, usize>,
    groups: BTreeMap<Vec<String>, Tally>,
}

impl ShareAccumulator {
    pub fn new(group_by: &[GroupField], mode: AggregationMode) -> Self {
        let index = OaClass::all().into_iter().enumerate().map(|(i, c)| (c, i)).collect();
        ShareAccumulator { group_by: group_by.to_vec(), mode, index, groups: BTreeMap::new() }
    }

    pub fn add(&mut self, c: &OaClassification) {
        let key: Vec<String> = self.group_by.iter().map(|f| f.value(c)).collect();
        let width = self.index.len();
        let tally = self.groups.entry(key).or_insert_with(|| Tally { counts: vec![0; width], total: 0 });
        tally.total += 1;
        match self.mode {
            AggregationMode::PrimaryLabel => tally.counts[self.index[&c.primary]] += 1,
            AggregationMode::MultiLabel => {
                for label in &c.labels {
                    tally.counts[self.index[label]] += 1;
                }
            }
        }
    }

    /// Panics when the two accumulators differ in grouping or mode.
    pub fn merge(&mut self, other: ShareAccumulator) {
        assert_eq!(self.group_by, other.group_by, "merging accumulators with different group_by");
        assert_eq!(self.mode, other.mode, "merging accumulators with different modes");
        for (key, t) in other.groups {
            match self.groups.get_mut(&key) {
                Some(mine) => {
                    mine.total += t.total;
                    mine.counts.iter_mut().zip(&t.counts).for_each(|(a, b)| *a += b);
                }
                None => {
                    self.groups.insert(key, t);
                }
            }
        }
    }

    pub fn finish(self) -> Vec<ShareReport> {
        let names: Vec<&str> = self.group_by.iter().map(GroupField::name).collect();
        self.groups
            .into_iter()
            .map(|(key, t)| {
                let group_key = names.iter().map(|n| n.to_string()).zip(key).collect();
                ShareReport::from_counts(group_key, &t.counts, t.total)
            })
            .collect()
    }
}

/// Groups are ordered by their key values.
pub fn aggregate<'a, I>(classifications: I, group_by: &[GroupField], mode: AggregationMode) -> Vec<ShareReport>
where
    I: IntoIterator<Item = &'a OaClassification>,
{
    let mut acc = ShareAccumulator::new(group_by, mode);
    for c in classifications {
        acc.add(c);
    }
    acc.finish()
}

/// `count / total` to six decimals, rounding half to even on the exact
/// rational value.
pub fn format_share(count: u64, total: u64) -> String {
    if total == 0 {
        return "0.000000".to_string();
    }
    let scaled = u128::from(count) * 1_000_000;
    let total = u128::from(total);
    let mut q = scaled / total;
    let twice_rem = (scaled % total) * 2;
    if twice_rem > total || (twice_rem == total && q % 2 == 1) {
        q += 1;
    }
    format!("{}.{:06}", q / 1_000_000, q % 1_000_000)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReportFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(format!("unknown report format {other:?}")),
        }
    }
}

/// One row per (group, class), with classes in canonical order.
pub fn write_csv<W: Write>(reports: &[ShareReport], group_by: &[GroupField], out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let mut header: Vec<&str> = group_by.iter().map(GroupField::name).collect();
    header.extend(["class", "count", "share"]);
    w.write_record(&header)?;
    for r in reports {
        for (class, &n) in &r.counts {
            let mut row: Vec<String> = r.group_key.iter().map(|(_, v)| v.clone()).collect();
            row.push(class.clone());
            row.push(n.to_string());
            row.push(format_share(n, r.total));
            w.write_record(&row)?;
        }
    }
    w.flush()
}

pub fn write_json<W: Write>(reports: &[ShareReport], mut out: W) -> io::Result<()> {
    serde_json::to_writer_pretty(&mut out, reports)?;
    out.write_all(b"\n")?;
    out.flush()
}

pub fn emit<W: Write>(reports: &[ShareReport], group_by: &[GroupField], format: ReportFormat, out: W) -> io::Result<()> {
    match format {
        ReportFormat::Csv => write_csv(reports, group_by, out),
        ReportFormat::Json => write_json(reports, out),
    }
}
