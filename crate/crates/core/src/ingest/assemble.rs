use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use serde::Serialize;

use super::{CrossrefItem, EvidenceBundle, LocationItem, MatchMethod};
use crate::model::{normalize_title, Doi, Issn, PublicationRecord};
use crate::registry::{lookup_journal_any, IssnLinkTable, JournalRegistry};

/// Join key for records without a DOI.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FallbackKey {
    pub issn: Issn,
    pub title: String,
    pub year: i32,
}

/// Evidence that did not join onto any record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Orphan {
    pub evidence_key: String,
    pub source_tag: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Assembly {
    pub bundles: Vec<EvidenceBundle>,
    pub orphans: Vec<Orphan>,
}

impl Assembly {
    pub fn write_orphans_csv<W: std::io::Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        w.write_record(["evidence_key", "source_tag", "reason"])?;
        for o in &self.orphans {
            w.write_record([&o.evidence_key, &o.source_tag, &o.reason])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Evidence indexed by join key. Built once, then only read while bundles
/// are produced.
pub struct Assembler<'a> {
    crossref: Vec<CrossrefItem>,
    locations: Vec<LocationItem>,
    crossref_by_doi: HashMap<Doi, Vec<usize>>,
    crossref_by_key: HashMap<FallbackKey, Vec<usize>>,
    locations_by_doi: HashMap<Doi, Vec<usize>>,
    locations_by_key: HashMap<FallbackKey, Vec<usize>>,
    journal_registries: &'a [JournalRegistry],
    link_table: &'a IssnLinkTable,
    pmc_embargoes: Option<&'a BTreeMap<Issn, u32>>,
}

/// Which evidence items a bundle consumed, for orphan accounting.
#[derive(Debug, Default)]
pub struct Consumed {
    crossref: Vec<usize>,
    locations: Vec<usize>,
}

fn keys(issns: &[Issn], title: &str, year: Option<i32>) -> Vec<FallbackKey> {
    let title = normalize_title(title);
    match year {
        Some(year) if !title.is_empty() => issns
            .iter()
            .map(|issn| FallbackKey { issn: issn.clone(), title: title.clone(), year })
            .collect(),
        _ => Vec::new(),
    }
}

impl<'a> Assembler<'a> {
    pub fn new(
        crossref: Vec<CrossrefItem>,
        locations: Vec<LocationItem>,
        journal_registries: &'a [JournalRegistry],
        link_table: &'a IssnLinkTable,
        pmc_embargoes: Option<&'a BTreeMap<Issn, u32>>,
    ) -> Self {
        let mut crossref_by_doi: HashMap<Doi, Vec<usize>> = HashMap::new();
        let mut crossref_by_key: HashMap<FallbackKey, Vec<usize>> = HashMap::new();
        for (i, item) in crossref.iter().enumerate() {
            crossref_by_doi.entry(item.doi.clone()).or_default().push(i);
            let year = item.publication_date.map(|d| d.year_value());
            for k in keys(&item.issns, &item.title, year) {
                crossref_by_key.entry(k).or_default().push(i);
            }
        }
        let mut locations_by_doi: HashMap<Doi, Vec<usize>> = HashMap::new();
        let mut locations_by_key: HashMap<FallbackKey, Vec<usize>> = HashMap::new();
        for (i, item) in locations.iter().enumerate() {
            locations_by_doi.entry(item.doi.clone()).or_default().push(i);
            let year = item.publication_date.map(|d| d.year_value());
            for k in keys(&item.issns, &item.title, year) {
                locations_by_key.entry(k).or_default().push(i);
            }
        }
        Self {
            crossref,
            locations,
            crossref_by_doi,
            crossref_by_key,
            locations_by_doi,
            locations_by_key,
            journal_registries,
            link_table,
            pmc_embargoes,
        }
    }

    fn lookup<'m>(by_key: &'m HashMap<FallbackKey, Vec<usize>>, record_keys: &[FallbackKey]) -> BTreeSet<usize> {
        record_keys
            .iter()
            .filter_map(|k| by_key.get(k))
            .flatten()
            .copied()
            .collect()
    }

    /// Builds the bundle for one record.
    pub fn bundle(&self, record: &PublicationRecord) -> (EvidenceBundle, Consumed) {
        let mut bundle = EvidenceBundle::bare(record.clone());
        let mut consumed = Consumed::default();

        let (crossref_hits, method) = match &record.doi {
            Some(doi) => (
                self.crossref_by_doi.get(doi).cloned().unwrap_or_default().into_iter().collect(),
                MatchMethod::Doi,
            ),
            None => {
                let record_issns: Vec<Issn> = record.issns.iter().cloned().collect();
                let record_keys = keys(&record_issns, &record.publication_title, Some(record.publication_date.year_value()));
                (Self::lookup(&self.crossref_by_key, &record_keys), MatchMethod::Fallback)
            }
        };
        let mut location_hits: BTreeSet<usize> = BTreeSet::new();
        match &record.doi {
            Some(doi) => location_hits.extend(self.locations_by_doi.get(doi).into_iter().flatten()),
            None => {
                let record_issns: Vec<Issn> = record.issns.iter().cloned().collect();
                let record_keys = keys(&record_issns, &record.publication_title, Some(record.publication_date.year_value()));
                location_hits.extend(Self::lookup(&self.locations_by_key, &record_keys));
                // a DOI discovered through the metadata join also links locations
                for &i in &crossref_hits {
                    location_hits.extend(self.locations_by_doi.get(&self.crossref[i].doi).into_iter().flatten());
                }
            }
        }

        let mut issns: BTreeSet<Issn> = record.issns.clone();
        let mut tags: BTreeSet<String> = BTreeSet::new();
        for &i in &crossref_hits {
            let item = &self.crossref[i];
            if let Some(d) = &item.publication_date {
                bundle.earliest_publication_date = bundle.earliest_publication_date.earliest(d);
            }
            issns.extend(item.issns.iter().cloned());
            bundle.publisher_licenses.extend(item.licenses.iter().cloned());
            tags.insert(item.source.clone());
            consumed.crossref.push(i);
        }
        for &i in &location_hits {
            let item = &self.locations[i];
            bundle.locations.extend(item.locations.iter().cloned());
            tags.insert(item.source.clone());
            consumed.locations.push(i);
        }
        bundle.match_method = if crossref_hits.is_empty() && location_hits.is_empty() {
            MatchMethod::Unmatched
        } else {
            method
        };
        bundle.source_tags = tags.into_iter().collect();

        let year = bundle.earliest_publication_date.year_value();
        bundle.full_oa_match = lookup_journal_any(&issns, year, self.journal_registries, self.link_table);
        bundle.issn_l = issns
            .iter()
            .find_map(|i| self.link_table.resolve(i).cloned())
            .or_else(|| bundle.full_oa_match.as_ref().and_then(|m| m.entry.issn_l.clone()));
        if let Some(pmc) = self.pmc_embargoes {
            let mut candidates: BTreeSet<&Issn> = issns.iter().collect();
            if let Some(l) = &bundle.issn_l {
                candidates.extend(self.link_table.members(l));
            }
            bundle.pmc_embargo_months = candidates.iter().find_map(|i| pmc.get(*i).copied());
        }
        (bundle, consumed)
    }

    /// Evidence items not consumed by any bundle.
    pub fn orphans<'c>(&self, consumed: impl IntoIterator<Item = &'c Consumed>) -> Vec<Orphan> {
        let mut used_cr = HashSet::new();
        let mut used_loc = HashSet::new();
        for c in consumed {
            used_cr.extend(c.crossref.iter().copied());
            used_loc.extend(c.locations.iter().copied());
        }
        let reason = "no matching record".to_string();
        let mut out: Vec<Orphan> = self
            .crossref
            .iter()
            .enumerate()
            .filter(|(i, _)| !used_cr.contains(i))
            .map(|(_, c)| Orphan { evidence_key: c.doi.to_string(), source_tag: c.source.clone(), reason: reason.clone() })
            .chain(
                self.locations
                    .iter()
                    .enumerate()
                    .filter(|(i, _)| !used_loc.contains(i))
                    .map(|(_, l)| Orphan { evidence_key: l.doi.to_string(), source_tag: l.source.clone(), reason: reason.clone() }),
            )
            .collect();
        out.sort_by(|a, b| (&a.source_tag, &a.evidence_key).cmp(&(&b.source_tag, &b.evidence_key)));
        out
    }
}

/// Joins records with their evidence; emits exactly one bundle per record,
/// in input order.
pub fn assemble_bundles(
    records: impl IntoIterator<Item = PublicationRecord>,
    crossref: Vec<CrossrefItem>,
    locations: Vec<LocationItem>,
    journal_registries: &[JournalRegistry],
    link_table: &IssnLinkTable,
    pmc_embargoes: Option<&BTreeMap<Issn, u32>>,
) -> Assembly {
    let assembler = Assembler::new(crossref, locations, journal_registries, link_table, pmc_embargoes);
    let mut bundles = Vec::new();
    let mut consumed = Vec::new();
    for record in records {
        let (b, c) = assembler.bundle(&record);
        bundles.push(b);
        consumed.push(c);
    }
    let orphans = assembler.orphans(&consumed);
    Assembly { bundles, orphans }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_crossref_line, parse_location_line};
    use crate::registry::JournalSource;

    fn record(json: &str) -> PublicationRecord {
        serde_json::from_str(json).unwrap()
    }

    fn registry() -> JournalRegistry {
        JournalRegistry::from_reader(
            "issn,issn_l,title,oa_since_year\n0378-5955,,Hearing Research,2015\n".as_bytes(),
            JournalSource::DoajLike,
        )
        .unwrap()
    }

    #[test]
    fn joins_on_doi_with_both_sources() {
        let cr = parse_crossref_line(r#"{"DOI":"10.1/A","ISSN":["0378-5955"],"issued":{"date-parts":[[2019,2,1]]},"license":[{"URL":"https://creativecommons.org/licenses/by/4.0/","delay-in-days":0}]}"#, "cr.ndjson").unwrap();
        let loc = parse_location_line(r#"{"doi":"10.1/a","oa_locations":[{"url":"https://arxiv.org/abs/1","host_type":"repository"}]}"#, "upw.ndjson").unwrap();
        let orphan = parse_location_line(r#"{"doi":"10.1/zzz"}"#, "upw.ndjson").unwrap();
        let rec = record(r#"{"doi":"https://doi.org/10.1/a","publication_date":"2019-03-01"}"#);
        let regs = [registry()];
        let link = IssnLinkTable::default();
        let out = assemble_bundles([rec], vec![cr], vec![loc, orphan], &regs, &link, None);
        assert_eq!(out.bundles.len(), 1);
        let b = &out.bundles[0];
        assert_eq!(b.match_method, MatchMethod::Doi);
        assert_eq!(b.source_tags, vec!["cr.ndjson".to_string(), "upw.ndjson".to_string()]);
        assert_eq!(b.publisher_licenses.len(), 1);
        assert_eq!(b.locations.len(), 1);
        assert_eq!(b.earliest_publication_date.to_string(), "2019-02-01");
        assert!(b.full_oa_match.is_some());
        assert_eq!(out.orphans.len(), 1);
        assert_eq!(out.orphans[0].evidence_key, "10.1/zzz");
    }

    #[test]
    fn record_without_evidence() {
        let rec = record(r#"{"doi":"10.1/nothing","publication_date":"2019"}"#);
        let out = assemble_bundles([rec], vec![], vec![], &[], &IssnLinkTable::default(), None);
        let b = &out.bundles[0];
        assert_eq!(b.match_method, MatchMethod::Unmatched);
        assert!(b.publisher_licenses.is_empty() && b.locations.is_empty() && b.source_tags.is_empty());
    }

    #[test]
    fn fallback_join_on_issn_title_year() {
        let cr = parse_crossref_line(r#"{"DOI":"10.1/fb","ISSN":["0378-5955"],"issued":{"date-parts":[[2019,6]]},"title":["The  Title!"]}"#, "cr").unwrap();
        let loc = parse_location_line(r#"{"doi":"10.1/fb","oa_locations":[{"url":"https://arxiv.org/abs/2","host_type":"repository"}]}"#, "upw").unwrap();
        let rec = record(r#"{"issns":["0378-5955"],"publication_title":"the title","publication_date":"2019"}"#);
        let other_year = record(r#"{"issns":["0378-5955"],"publication_title":"the title","publication_date":"2018"}"#);
        let out = assemble_bundles([rec, other_year], vec![cr], vec![loc], &[], &IssnLinkTable::default(), None);
        assert_eq!(out.bundles[0].match_method, MatchMethod::Fallback);
        assert_eq!(out.bundles[0].publisher_licenses.len(), 0);
        assert_eq!(out.bundles[0].locations.len(), 1);
        assert_eq!(out.bundles[1].match_method, MatchMethod::Unmatched);
        assert!(out.orphans.is_empty());
    }

    #[test]
    fn pmc_and_issn_l_resolution() {
        let issn = |s: &str| s.parse::<Issn>().unwrap();
        let link = IssnLinkTable::from_pairs([(issn("0950-1991"), issn("0378-5955"))]).unwrap();
        let pmc: BTreeMap<Issn, u32> = [(issn("0378-5955"), 6)].into();
        let rec = record(r#"{"doi":"10.1/p","issns":["0950-1991"],"publication_date":"2019"}"#);
        let out = assemble_bundles([rec], vec![], vec![], &[], &link, Some(&pmc));
        assert_eq!(out.bundles[0].issn_l, Some(issn("0378-5955")));
        assert_eq!(out.bundles[0].pmc_embargo_months, Some(6));
    }
}
