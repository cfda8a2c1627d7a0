use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use super::{csv_error, open_csv, record_line, Columns, RegistryError};
use crate::model::{normalize_issn, Issn};

/// ISSN to ISSN-L mapping. Every ISSN-L maps to itself.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IssnLinkTable {
    to_linking: BTreeMap<Issn, Issn>,
    members: BTreeMap<Issn, BTreeSet<Issn>>,
}

impl IssnLinkTable {
    pub fn from_pairs<I>(pairs: I) -> Result<Self, RegistryError>
    where
        I: IntoIterator<Item = (Issn, Issn)>,
    {
        let mut table = Self::default();
        for (issn, linking) in pairs {
            table.insert(0, issn, linking)?;
        }
        Ok(table)
    }

    fn insert(&mut self, line: u64, issn: Issn, linking: Issn) -> Result<(), RegistryError> {
        for (k, v) in [(&issn, &linking), (&linking, &linking)] {
            if let Some(prev) = self.to_linking.get(k) {
                if prev != v {
                    log::warn!("line {line}: {k} linked to both {prev} and {v}");
                    return Err(RegistryError::Conflict { issns: vec![k.to_string()] });
                }
            }
        }
        self.to_linking.insert(linking.clone(), linking.clone());
        self.to_linking.insert(issn.clone(), linking.clone());
        let m = self.members.entry(linking.clone()).or_default();
        m.insert(linking);
        m.insert(issn);
        Ok(())
    }

    /// Loads a CSV with header `issn,issn_l`.
    pub fn load(path: &Path) -> Result<Self, RegistryError> {
        let mut reader = open_csv(path)?;
        let cols = Columns::new(&mut reader, &["issn", "issn_l"])?;
        let mut table = Self::default();
        for rec in reader.records() {
            let rec = rec.map_err(csv_error)?;
            let line = record_line(&rec);
            let field = |name: &str| -> Result<Issn, RegistryError> {
                let raw = cols.get(&rec, name).ok_or_else(|| RegistryError::Parse {
                    line,
                    message: format!("empty {name}"),
                })?;
                normalize_issn(raw).map_err(|source| RegistryError::Checksum {
                    line,
                    issn: raw.to_string(),
                    source,
                })
            };
            let issn = field("issn")?;
            let linking = field("issn_l")?;
            table.insert(line, issn, linking)?;
        }
        Ok(table)
    }

    pub fn resolve(&self, issn: &Issn) -> Option<&Issn> {
        self.to_linking.get(issn)
    }

    /// All ISSNs sharing the given ISSN-L, including the ISSN-L itself.
    pub fn members<'a>(&'a self, issn_l: &Issn) -> impl Iterator<Item = &'a Issn> + 'a {
        self.members.get(issn_l).into_iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.to_linking.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_linking.is_empty()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["issn", "issn_l"])?;
        for (issn, l) in &self.to_linking {
            w.write_record([issn.as_str(), l.as_str()])?;
        }
        w.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn issn(s: &str) -> Issn {
        s.parse().unwrap()
    }

    #[test]
    fn linking_issn_maps_to_itself() {
        let t = IssnLinkTable::from_pairs([(issn("0950-1991"), issn("0378-5955"))]).unwrap();
        assert_eq!(t.resolve(&issn("0378-5955")), Some(&issn("0378-5955")));
        assert_eq!(t.resolve(&issn("0950-1991")), Some(&issn("0378-5955")));
        assert_eq!(t.members(&issn("0378-5955")).count(), 2);
    }

    #[test]
    fn conflicting_links_rejected() {
        let r = IssnLinkTable::from_pairs([
            (issn("0950-1991"), issn("0378-5955")),
            (issn("0950-1991"), issn("2434-561X")),
        ]);
        assert!(matches!(r, Err(RegistryError::Conflict { .. })));
        // an ISSN-L may not itself point elsewhere
        let r = IssnLinkTable::from_pairs([
            (issn("0378-5955"), issn("2434-561X")),
            (issn("0950-1991"), issn("0378-5955")),
        ]);
        assert!(r.is_err());
    }

    #[test]
    fn load_from_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("link.csv");
        std::fs::write(&p, "issn,issn_l\n0950-1991,0378-5955\n").unwrap();
        let t = IssnLinkTable::load(&p).unwrap();
        assert_eq!(t.len(), 2);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        std::fs::write(&p, &buf).unwrap();
        assert_eq!(IssnLinkTable::load(&p).unwrap(), t);
        std::fs::write(&p, "issn,issn_l\n0950-1992,0378-5955\n").unwrap();
        assert!(matches!(IssnLinkTable::load(&p), Err(RegistryError::Checksum { line: 2, .. })));
    }
}
