//! Ground-truth registries: full-OA journal lists, repository directories and
//! the ISSN to ISSN-L linking table. All are loaded from CSV and read-only
//! afterwards.

mod journal;
mod link;
mod repository;
mod url_norm;

use std::path::{Path, PathBuf};

pub use journal::{
    lookup_journal, lookup_journal_any, FullOaMatch, JournalRegistry, JournalRegistryEntry,
    JournalSource, MatchedVia,
};
pub use link::IssnLinkTable;
pub use repository::{classify_host, HostClass, RepositoryEntry, RepositoryKind, RepositoryRegistry};
pub use url_norm::{normalize_url, url_has_prefix};

use crate::model::IdentifierError;

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error("line {line}: invalid ISSN {issn:?}: {source}")]
    Checksum {
        line: u64,
        issn: String,
        #[source]
        source: IdentifierError,
    },
    #[error("ISSNs claimed by more than one entry: {}", issns.join(", "))]
    Conflict { issns: Vec<String> },
    #[error("line {line}: unknown repository kind {token:?}")]
    UnknownKind { line: u64, token: String },
}

pub(crate) fn open_csv(path: &Path) -> Result<csv::Reader<std::fs::File>, RegistryError> {
    let file = std::fs::File::open(path).map_err(|source| RegistryError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Ok(csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(file))
}

/// Column positions by header name.
pub(crate) struct Columns {
    names: Vec<String>,
}

impl Columns {
    pub(crate) fn new<R: std::io::Read>(
        reader: &mut csv::Reader<R>,
        required: &[&str],
    ) -> Result<Self, RegistryError> {
        let headers = reader.headers().map_err(|e| RegistryError::Parse {
            line: 1,
            message: e.to_string(),
        })?;
        let names: Vec<String> = headers.iter().map(|h| h.trim().to_ascii_lowercase()).collect();
        for r in required {
            if !names.iter().any(|n| n == r) {
                return Err(RegistryError::Parse {
                    line: 1,
                    message: format!("missing column {r:?}"),
                });
            }
        }
        Ok(Self { names })
    }

    pub(crate) fn get<'a>(&self, record: &'a csv::StringRecord, name: &str) -> Option<&'a str> {
        let idx = self.names.iter().position(|n| n == name)?;
        record.get(idx).map(str::trim).filter(|s| !s.is_empty())
    }

    pub(crate) fn has(&self, name: &str) -> bool {
        self.names.iter().any(|n| n == name)
    }
}

pub(crate) fn record_line(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

pub(crate) fn csv_error(e: csv::Error) -> RegistryError {
    let line = e.position().map_or(0, |p| p.line());
    RegistryError::Parse { line, message: e.to_string() }
}
