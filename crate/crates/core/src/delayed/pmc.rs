use std::collections::BTreeMap;
use std::io::{Read, Write};
use std::path::Path;

use crate::model::{normalize_issn, Issn};
use crate::registry::RegistryError;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmcEmbargo {
    pub journal_title: String,
    /// Zero means immediate free access.
    pub embargo_months: u32,
}

/// Loads a PMC-style journal list (`issn,journal_title,embargo_months`).
pub fn load_pmc_embargoes(path: &Path) -> Result<BTreeMap<Issn, PmcEmbargo>, RegistryError> {
    let file = std::fs::File::open(path).map_err(|source| RegistryError::Io { path: path.to_path_buf(), source })?;
    pmc_embargoes_from_reader(file)
}

pub fn pmc_embargoes_from_reader<R: Read>(reader: R) -> Result<BTreeMap<Issn, PmcEmbargo>, RegistryError> {
    let mut reader = csv::ReaderBuilder::new().flexible(true).trim(csv::Trim::All).from_reader(reader);
    let cols = crate::registry::Columns::new(&mut reader, &["issn", "journal_title", "embargo_months"])?;
    let mut out = BTreeMap::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| RegistryError::Parse { line: e.position().map_or(0, |p| p.line()), message: e.to_string() })?;
        let line = rec.position().map_or(0, |p| p.line());
        let raw = cols.get(&rec, "issn").ok_or(RegistryError::Parse { line, message: "empty issn".into() })?;
        let issn = normalize_issn(raw).map_err(|source| RegistryError::Checksum { line, issn: raw.to_string(), source })?;
        let months_raw = cols.get(&rec, "embargo_months").unwrap_or("0");
        let embargo_months = months_raw.parse::<u32>().map_err(|_| RegistryError::Parse {
            line,
            message: format!("embargo_months must be a non-negative integer, got {months_raw:?}"),
        })?;
        let journal_title = cols.get(&rec, "journal_title").unwrap_or_default().to_string();
        out.insert(issn, PmcEmbargo { journal_title, embargo_months });
    }
    Ok(out)
}

pub fn write_pmc_embargoes<W: Write>(embargoes: &BTreeMap<Issn, PmcEmbargo>, out: W) -> Result<(), csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    w.write_record(["issn", "journal_title", "embargo_months"])?;
    for (issn, e) in embargoes {
        w.write_record([issn.to_string(), e.journal_title.clone(), e.embargo_months.to_string()])?;
    }
    w.flush()?;
    Ok(())
}
