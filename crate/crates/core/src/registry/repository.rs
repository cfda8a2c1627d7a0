use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{csv_error, normalize_url, open_csv, record_line, Columns, RegistryError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RepositoryKind {
    Institutional,
    Disciplinary,
    Aggregator,
    Governmental,
    Undetermined,
}

impl RepositoryKind {
    pub fn code(&self) -> &'static str {
        match self {
            RepositoryKind::Institutional => "institutional",
            RepositoryKind::Disciplinary => "disciplinary",
            RepositoryKind::Aggregator => "aggregator",
            RepositoryKind::Governmental => "governmental",
            RepositoryKind::Undetermined => "undetermined",
        }
    }
}

impl FromStr for RepositoryKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "institutional" => Ok(RepositoryKind::Institutional),
            "disciplinary" => Ok(RepositoryKind::Disciplinary),
            "aggregator" | "aggregating" => Ok(RepositoryKind::Aggregator),
            "governmental" => Ok(RepositoryKind::Governmental),
            "undetermined" => Ok(RepositoryKind::Undetermined),
            other => Err(other.to_string()),
        }
    }
}

/// Result of matching a URL against the repository directory.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HostClass {
    Institutional,
    Disciplinary,
    Aggregator,
    Governmental,
    Undetermined,
    Unregistered,
}

impl From<RepositoryKind> for HostClass {
    fn from(k: RepositoryKind) -> Self {
        match k {
            RepositoryKind::Institutional => HostClass::Institutional,
            RepositoryKind::Disciplinary => HostClass::Disciplinary,
            RepositoryKind::Aggregator => HostClass::Aggregator,
            RepositoryKind::Governmental => HostClass::Governmental,
            RepositoryKind::Undetermined => HostClass::Undetermined,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RepositoryEntry {
    pub repo_id: String,
    pub url_prefixes: Vec<String>,
    pub kind: RepositoryKind,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepositoryRegistry {
    entries: Vec<RepositoryEntry>,
    prefixes: BTreeMap<String, usize>,
}

impl RepositoryRegistry {
    pub fn new(entries: Vec<RepositoryEntry>) -> Result<Self, RegistryError> {
        let mut reg = Self::default();
        for e in entries {
            reg.push(0, e)?;
        }
        Ok(reg)
    }

    fn push(&mut self, line: u64, mut entry: RepositoryEntry) -> Result<(), RegistryError> {
        let mut normalized = Vec::with_capacity(entry.url_prefixes.len());
        for raw in &entry.url_prefixes {
            let p = normalize_url(raw).ok_or_else(|| RegistryError::Parse {
                line,
                message: format!("invalid url prefix {raw:?}"),
            })?;
            if let Some(&other) = self.prefixes.get(&p) {
                if self.entries[other].repo_id != entry.repo_id {
                    return Err(RegistryError::Parse {
                        line,
                        message: format!("prefix {p:?} already claimed by {}", self.entries[other].repo_id),
                    });
                }
            }
            if !normalized.contains(&p) {
                normalized.push(p);
            }
        }
        if normalized.is_empty() {
            return Err(RegistryError::Parse { line, message: "no url prefixes".into() });
        }
        entry.url_prefixes = normalized;
        let idx = self.entries.len();
        for p in &entry.url_prefixes {
            self.prefixes.insert(p.clone(), idx);
        }
        self.entries.push(entry);
        Ok(())
    }

    /// Loads a CSV with header `repo_id,kind,url_prefixes` where prefixes are
    /// separated by `;`.
    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        let mut reader = open_csv(path)?;
        let (reg, mut errors) = Self::parse(&mut reader);
        if errors.is_empty() {
            Ok(reg)
        } else {
            Err(errors.remove(0))
        }
    }

    pub fn from_reader<R: Read>(reader: R) -> Result<Self, RegistryError> {
        let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
        let (reg, mut errors) = Self::parse(&mut reader);
        if errors.is_empty() {
            Ok(reg)
        } else {
            Err(errors.remove(0))
        }
    }

    pub fn validate(path: &Path) -> Vec<RegistryError> {
        match open_csv(path) {
            Ok(mut reader) => Self::parse(&mut reader).1,
            Err(e) => vec![e],
        }
    }

    fn parse<R: Read>(reader: &mut csv::Reader<R>) -> (Self, Vec<RegistryError>) {
        let mut reg = Self::default();
        let cols = match Columns::new(reader, &["repo_id", "kind", "url_prefixes"]) {
            Ok(c) => c,
            Err(e) => return (reg, vec![e]),
        };
        let mut errors = Vec::new();
        for rec in reader.records() {
            let rec = match rec {
                Ok(r) => r,
                Err(e) => {
                    errors.push(csv_error(e));
                    continue;
                }
            };
            let line = record_line(&rec);
            let Some(repo_id) = cols.get(&rec, "repo_id") else {
                errors.push(RegistryError::Parse { line, message: "empty repo_id".into() });
                continue;
            };
            let token = cols.get(&rec, "kind").unwrap_or_default();
            let kind = match token.parse::<RepositoryKind>() {
                Ok(k) => k,
                Err(token) => {
                    errors.push(RegistryError::UnknownKind { line, token });
                    continue;
                }
            };
            let url_prefixes = cols
                .get(&rec, "url_prefixes")
                .unwrap_or_default()
                .split(';')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(String::from)
                .collect();
            let entry = RepositoryEntry { repo_id: repo_id.to_string(), url_prefixes, kind };
            if let Err(e) = reg.push(line, entry) {
                errors.push(e);
            }
        }
        (reg, errors)
    }

    pub fn entries(&self) -> &[RepositoryEntry] {
        &self.entries
    }

    pub fn entry_for_url(&self, url: &str) -> Option<&RepositoryEntry> {
        let normalized = normalize_url(url)?;
        // candidate prefixes end at path-segment boundaries; the longest wins
        let mut cuts: Vec<usize> = normalized.match_indices('/').map(|(i, _)| i).collect();
        cuts.push(normalized.len());
        cuts.iter()
            .rev()
            .find_map(|&end| self.prefixes.get(&normalized[..end]))
            .map(|&i| &self.entries[i])
    }

    pub fn classify_host(&self, url: &str) -> HostClass {
        self.entry_for_url(url).map_or(HostClass::Unregistered, |e| e.kind.into())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["repo_id", "kind", "url_prefixes"])?;
        for e in &self.entries {
            w.write_record([e.repo_id.as_str(), e.kind.code(), &e.url_prefixes.join(";")])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Free-function form of [`RepositoryRegistry::classify_host`].
pub fn classify_host(url: &str, registry: &RepositoryRegistry) -> HostClass {
    registry.classify_host(url)
}
