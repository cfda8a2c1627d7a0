use std::collections::{BTreeMap, BTreeSet};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{JournalCohortStats, PmcEmbargo, Verdict};
use crate::model::{normalize_issn, Issn};
use crate::registry::{IssnLinkTable, RegistryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Pmc,
    Metadata,
    Cohort,
}

impl Strategy {
    pub fn code(&self) -> &'static str {
        match self {
            Strategy::Pmc => "pmc",
            Strategy::Metadata => "metadata",
            Strategy::Cohort => "cohort",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        match s {
            "pmc" => Some(Strategy::Pmc),
            "metadata" => Some(Strategy::Metadata),
            "cohort" => Some(Strategy::Cohort),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DelayedRow {
    pub issn_l: Issn,
    pub title: String,
    pub strategies: BTreeSet<Strategy>,
    pub embargo_months: Option<u32>,
    pub old_share: Option<f64>,
    pub recent_share: Option<f64>,
    pub n_old: Option<u64>,
    pub n_recent: Option<u64>,
}

/// Journals judged to follow a moving-wall policy, keyed by ISSN-L.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DelayedRegistry {
    pub rows: BTreeMap<Issn, DelayedRow>,
}

fn days_to_months(days: u32) -> u32 {
    // average Gregorian month
    (f64::from(days) / 30.436875).round() as u32
}

/// Unions the three detection strategies. PMC embargo lengths take
/// precedence over ones inferred from license delays.
pub fn build_delayed_registry(
    verdicts: &[JournalCohortStats],
    metadata_embargo_days: &BTreeMap<Issn, u32>,
    pmc: &BTreeMap<Issn, PmcEmbargo>,
    link_table: &IssnLinkTable,
) -> DelayedRegistry {
    let key = |i: &Issn| link_table.resolve(i).cloned().unwrap_or_else(|| i.clone());
    let mut rows: BTreeMap<Issn, DelayedRow> = BTreeMap::new();
    for (issn, p) in pmc.iter().filter(|(_, p)| p.embargo_months > 0) {
        let r = row(&mut rows, key(issn), &p.journal_title);
        r.strategies.insert(Strategy::Pmc);
        r.embargo_months = Some(p.embargo_months);
    }
    for (issn, days) in metadata_embargo_days {
        let r = row(&mut rows, key(issn), "");
        r.strategies.insert(Strategy::Metadata);
        r.embargo_months.get_or_insert(days_to_months(*days));
    }
    for v in verdicts.iter().filter(|v| v.verdict == Verdict::Delayed) {
        let r = row(&mut rows, key(&v.issn_l), &v.title);
        r.strategies.insert(Strategy::Cohort);
        r.old_share = v.old_cohort.share();
        r.recent_share = v.recent_cohort.share();
        r.n_old = Some(v.old_cohort.n);
        r.n_recent = Some(v.recent_cohort.n);
    }
    DelayedRegistry { rows }
}

fn row<'a>(rows: &'a mut BTreeMap<Issn, DelayedRow>, issn: Issn, title: &str) -> &'a mut DelayedRow {
    let r = rows.entry(issn.clone()).or_insert_with(|| DelayedRow {
        issn_l: issn,
        title: String::new(),
        strategies: BTreeSet::new(),
        embargo_months: None,
        old_share: None,
        recent_share: None,
        n_old: None,
        n_recent: None,
    });
    if r.title.is_empty() {
        r.title = title.to_string();
    }
    r
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

impl DelayedRegistry {
    pub fn journal_set(&self) -> BTreeSet<Issn> {
        self.rows.keys().cloned().collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["issn_l", "title", "strategies", "embargo_months", "old_share", "recent_share", "n_old", "n_recent"])?;
        for r in self.rows.values() {
            let strategies: Vec<&str> = r.strategies.iter().map(Strategy::code).collect();
            w.write_record([
                r.issn_l.to_string(),
                r.title.clone(),
                strategies.join("+"),
                opt(r.embargo_months),
                r.old_share.map(|s| format!("{s:.6}")).unwrap_or_default(),
                r.recent_share.map(|s| format!("{s:.6}")).unwrap_or_default(),
                opt(r.n_old),
                opt(r.n_recent),
            ])?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        let file = std::fs::File::open(path).map_err(|source| RegistryError::Io { path: path.to_path_buf(), source })?;
        Self::from_reader(file)
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, RegistryError> {
        let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
        let cols = crate::registry::Columns::new(&mut reader, &["issn_l", "strategies"])?;
        let mut rows = BTreeMap::new();
        for rec in reader.records() {
            let rec = rec.map_err(|e| RegistryError::Parse { line: e.position().map_or(0, |p| p.line()), message: e.to_string() })?;
            let line = rec.position().map_or(0, |p| p.line());
            let bad = |message: String| RegistryError::Parse { line, message };
            let raw = cols.get(&rec, "issn_l").ok_or_else(|| bad("empty issn_l".into()))?;
            let issn_l = normalize_issn(raw).map_err(|source| RegistryError::Checksum { line, issn: raw.to_string(), source })?;
            let strategies = cols
                .get(&rec, "strategies")
                .unwrap_or_default()
                .split('+')
                .map(|s| Strategy::parse(s.trim()).ok_or_else(|| bad(format!("unknown strategy {s:?}"))))
                .collect::<Result<BTreeSet<_>, _>>()?;
            let num = |name: &str| -> Result<Option<f64>, RegistryError> {
                cols.get(&rec, name).map(|v| v.parse::<f64>().map_err(|_| bad(format!("bad {name} {v:?}")))).transpose()
            };
            let int = |name: &str| -> Result<Option<u64>, RegistryError> {
                cols.get(&rec, name).map(|v| v.parse::<u64>().map_err(|_| bad(format!("bad {name} {v:?}")))).transpose()
            };
            let row = DelayedRow {
                issn_l: issn_l.clone(),
                title: cols.get(&rec, "title").unwrap_or_default().to_string(),
                strategies,
                embargo_months: int("embargo_months")?.map(|m| m as u32),
                old_share: num("old_share")?,
                recent_share: num("recent_share")?,
                n_old: int("n_old")?,
                n_recent: int("n_recent")?,
            };
            rows.insert(issn_l, row);
        }
        Ok(Self { rows })
    }
}
