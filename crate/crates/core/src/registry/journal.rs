use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{csv_error, open_csv, record_line, Columns, IssnLinkTable, RegistryError};
use crate::model::{normalize_issn, Issn};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JournalSource {
    DoajLike,
    GoldListLike,
    PmcLike,
}

impl JournalSource {
    pub fn code(&self) -> &'static str {
        match self {
            JournalSource::DoajLike => "doaj_like",
            JournalSource::GoldListLike => "gold_list_like",
            JournalSource::PmcLike => "pmc_like",
        }
    }

    /// Whether a match grounds a Full OA decision.
    pub fn is_full_oa(&self) -> bool {
        !matches!(self, JournalSource::PmcLike)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct JournalRegistryEntry {
    pub issns: BTreeSet<Issn>,
    pub issn_l: Option<Issn>,
    pub title: String,
    pub oa_since_year: Option<i32>,
    pub source: JournalSource,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmc_embargo_months: Option<u32>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchedVia {
    Direct,
    IssnL,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FullOaMatch {
    pub entry: JournalRegistryEntry,
    pub matched_issn: Issn,
    pub matched_via: MatchedVia,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JournalRegistry {
    source: JournalSource,
    entries: Vec<JournalRegistryEntry>,
    by_issn: HashMap<Issn, usize>,
    by_issn_l: HashMap<Issn, usize>,
}

struct Row {
    line: u64,
    issn: Issn,
    issn_l: Option<Issn>,
    title: String,
    year: Option<i32>,
    embargo: Option<u32>,
}

impl JournalRegistry {
    pub fn load(path: &Path, source: JournalSource) -> Result<Self, RegistryError> {
        let mut reader = open_csv(path)?;
        Self::from_csv(&mut reader, source)
    }

    pub fn from_reader<R: Read>(reader: R, source: JournalSource) -> Result<Self, RegistryError> {
        let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
        Self::from_csv(&mut reader, source)
    }

    fn from_csv<R: Read>(reader: &mut csv::Reader<R>, source: JournalSource) -> Result<Self, RegistryError> {
        let (registry, mut errors) = Self::parse(reader, source);
        match registry {
            Some(r) if errors.is_empty() => Ok(r),
            _ => Err(errors.remove(0)),
        }
    }

    /// Parses every row and returns all diagnostics instead of stopping at the
    /// first problem.
    pub fn validate(path: &Path, source: JournalSource) -> Vec<RegistryError> {
        match open_csv(path) {
            Ok(mut reader) => Self::parse(&mut reader, source).1,
            Err(e) => vec![e],
        }
    }

    fn parse<R: Read>(
        reader: &mut csv::Reader<R>,
        source: JournalSource,
    ) -> (Option<Self>, Vec<RegistryError>) {
        let cols = match Columns::new(reader, &["issn", "issn_l", "title", "oa_since_year"]) {
            Ok(c) => c,
            Err(e) => return (None, vec![e]),
        };
        let mut errors = Vec::new();
        let mut rows = Vec::new();
        for result in reader.records() {
            match result.map_err(csv_error).and_then(|r| parse_row(&cols, &r, source)) {
                Ok(row) => rows.push(row),
                Err(e) => errors.push(e),
            }
        }
        match merge_rows(rows, source) {
            Ok(entries) => (Some(Self::from_entries(source, entries)), errors),
            Err(e) => {
                errors.push(e);
                (None, errors)
            }
        }
    }

    fn from_entries(source: JournalSource, entries: Vec<JournalRegistryEntry>) -> Self {
        let mut by_issn = HashMap::new();
        let mut by_issn_l = HashMap::new();
        for (i, e) in entries.iter().enumerate() {
            for issn in &e.issns {
                by_issn.insert(issn.clone(), i);
            }
            if let Some(l) = &e.issn_l {
                by_issn_l.insert(l.clone(), i);
            }
        }
        Self { source, entries, by_issn, by_issn_l }
    }

    pub fn source(&self) -> JournalSource {
        self.source
    }

    pub fn entries(&self) -> &[JournalRegistryEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entry_for_issn(&self, issn: &Issn) -> Option<&JournalRegistryEntry> {
        self.by_issn.get(issn).map(|&i| &self.entries[i])
    }

    fn entry_for_linking(&self, issn_l: &Issn, link: &IssnLinkTable) -> Option<&JournalRegistryEntry> {
        if let Some(&i) = self.by_issn_l.get(issn_l).or_else(|| self.by_issn.get(issn_l)) {
            return Some(&self.entries[i]);
        }
        link.members(issn_l)
            .find_map(|member| self.by_issn.get(member))
            .map(|&i| &self.entries[i])
    }

    /// Writes the registry in its canonical CSV form, one row per ISSN.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let pmc = self.source == JournalSource::PmcLike;
        let mut header = vec!["issn", "issn_l", "title", "oa_since_year"];
        if pmc {
            header.push("embargo_months");
        }
        w.write_record(&header)?;
        for e in &self.entries {
            for issn in &e.issns {
                let mut row = vec![
                    issn.to_string(),
                    e.issn_l.as_ref().map(ToString::to_string).unwrap_or_default(),
                    e.title.clone(),
                    e.oa_since_year.map(|y| y.to_string()).unwrap_or_default(),
                ];
                if pmc {
                    row.push(e.pmc_embargo_months.map(|m| m.to_string()).unwrap_or_default());
                }
                w.write_record(&row)?;
            }
        }
        w.flush()?;
        Ok(())
    }
}

fn parse_row(cols: &Columns, r: &csv::StringRecord, source: JournalSource) -> Result<Row, RegistryError> {
    let line = record_line(r);
    let issn_field = |name: &str| -> Result<Option<Issn>, RegistryError> {
        cols.get(r, name)
            .map(|raw| {
                normalize_issn(raw).map_err(|source| RegistryError::Checksum {
                    line,
                    issn: raw.to_string(),
                    source,
                })
            })
            .transpose()
    };
    let issn = issn_field("issn")?.ok_or_else(|| RegistryError::Parse {
        line,
        message: "empty issn".into(),
    })?;
    let issn_l = issn_field("issn_l")?;
    let title = cols.get(r, "title").unwrap_or_default().to_string();
    let year = cols
        .get(r, "oa_since_year")
        .map(|y| {
            y.parse::<i32>()
                .ok()
                .filter(|y| (1800..=2100).contains(y))
                .ok_or_else(|| RegistryError::Parse {
                    line,
                    message: format!("implausible oa_since_year {y:?}"),
                })
        })
        .transpose()?;
    let embargo = if cols.has("embargo_months") {
        cols.get(r, "embargo_months")
            .map(|m| {
                m.parse::<u32>().map_err(|_| RegistryError::Parse {
                    line,
                    message: format!("embargo_months must be a non-negative integer, got {m:?}"),
                })
            })
            .transpose()?
    } else {
        None
    };
    if embargo.is_some() && source != JournalSource::PmcLike {
        return Err(RegistryError::Parse {
            line,
            message: "embargo_months is only allowed for PMC-like registries".into(),
        });
    }
    Ok(Row { line, issn, issn_l, title, year, embargo })
}

fn same_title(a: &str, b: &str) -> bool {
    a.to_lowercase() == b.to_lowercase()
}

fn min_opt<T: Ord + Copy>(a: Option<T>, b: Option<T>) -> Option<T> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, y) => x.or(y),
    }
}

/// Rows sharing an ISSN must agree on the title; rows sharing an ISSN-L with
/// the same title are folded into one entry.
fn merge_rows(rows: Vec<Row>, source: JournalSource) -> Result<Vec<JournalRegistryEntry>, RegistryError> {
    let mut entries: Vec<JournalRegistryEntry> = Vec::new();
    let mut by_issn: HashMap<Issn, usize> = HashMap::new();
    let mut by_link: HashMap<(Issn, String), usize> = HashMap::new();
    let mut conflicts: BTreeSet<String> = BTreeSet::new();

    for row in rows {
        let existing = by_issn.get(&row.issn).copied();
        if let Some(i) = existing {
            if !same_title(&entries[i].title, &row.title) {
                log::warn!("line {}: ISSN {} already listed under {:?}", row.line, row.issn, entries[i].title);
                conflicts.insert(row.issn.to_string());
                continue;
            }
        }
        let target = existing.or_else(|| {
            row.issn_l
                .as_ref()
                .and_then(|l| by_link.get(&(l.clone(), row.title.to_lowercase())).copied())
        });
        let idx = match target {
            Some(i) => {
                let e = &mut entries[i];
                match (&e.issn_l, &row.issn_l) {
                    (Some(a), Some(b)) if a != b => {
                        conflicts.insert(row.issn.to_string());
                        continue;
                    }
                    (None, Some(b)) => e.issn_l = Some(b.clone()),
                    _ => {}
                }
                e.issns.insert(row.issn.clone());
                e.oa_since_year = min_opt(e.oa_since_year, row.year);
                e.pmc_embargo_months = min_opt(e.pmc_embargo_months, row.embargo);
                i
            }
            None => {
                entries.push(JournalRegistryEntry {
                    issns: [row.issn.clone()].into(),
                    issn_l: row.issn_l.clone(),
                    title: row.title.clone(),
                    oa_since_year: row.year,
                    source,
                    pmc_embargo_months: row.embargo,
                });
                entries.len() - 1
            }
        };
        by_issn.insert(row.issn, idx);
        if let Some(l) = &entries[idx].issn_l {
            by_link.insert((l.clone(), entries[idx].title.to_lowercase()), idx);
        }
    }
    if conflicts.is_empty() {
        Ok(entries)
    } else {
        Err(RegistryError::Conflict { issns: conflicts.into_iter().collect() })
    }
}

fn year_admits(entry: &JournalRegistryEntry, year: i32) -> bool {
    entry.oa_since_year.map_or(true, |since| year >= since)
}

/// Finds the registry entry for a journal, honoring the year of OA
/// transition. Direct ISSN matches are tried before ISSN-L resolution.
pub fn lookup_journal(
    issns: &BTreeSet<Issn>,
    year: i32,
    registry: &JournalRegistry,
    link_table: &IssnLinkTable,
) -> Option<FullOaMatch> {
    for issn in issns {
        if let Some(entry) = registry.entry_for_issn(issn) {
            if year_admits(entry, year) {
                return Some(FullOaMatch {
                    entry: entry.clone(),
                    matched_issn: issn.clone(),
                    matched_via: MatchedVia::Direct,
                });
            }
        }
    }
    let linking: BTreeMap<&Issn, &Issn> = issns
        .iter()
        .filter_map(|i| link_table.resolve(i).map(|l| (l, i)))
        .collect();
    for (issn_l, issn) in linking {
        if let Some(entry) = registry.entry_for_linking(issn_l, link_table) {
            if year_admits(entry, year) {
                return Some(FullOaMatch {
                    entry: entry.clone(),
                    matched_issn: issn.clone(),
                    matched_via: MatchedVia::IssnL,
                });
            }
        }
    }
    None
}

/// Searches several registries in order and returns the first match.
pub fn lookup_journal_any(
    issns: &BTreeSet<Issn>,
    year: i32,
    registries: &[JournalRegistry],
    link_table: &IssnLinkTable,
) -> Option<FullOaMatch> {
    registries.iter().find_map(|r| lookup_journal(issns, year, r, link_table))
}
