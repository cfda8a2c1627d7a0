//! Seeded generators shared by the acceptance criteria.

use oaclass_core::classify::ClassifierConfig;
use oaclass_core::ingest::{AccessLocation, DeclaredVersion, EvidenceBundle, HostKind, LicenseStatement};
use oaclass_core::registry::{FullOaMatch, JournalRegistryEntry, JournalSource, MatchedVia, RepositoryRegistry};
use oaclass_core::{AccessMode, DocumentType, Issn, OaClass, OaClassification, PartialDate, PublicationRecord, RecordContext};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const ISSN: &str = "0378-5955";

pub const CC_BY: &str = "https://creativecommons.org/licenses/by/4.0/";
pub const CC0: &str = "http://creativecommons.org/publicdomain/zero/1.0/";
pub const PROPRIETARY: &str = "https://www.elsevier.com/tdm/userlicense/1.0/";
pub const LICENSES: [&str; 3] = [CC_BY, CC0, PROPRIETARY];

pub const DISCIPLINARY: &str = "https://arxiv.org/abs/1811.01234";
pub const INSTITUTIONAL: &str = "https://pub.uni-bielefeld.de/record/2931";
pub const UNREGISTERED: &str = "https://zenodo.org/record/123456";
pub const AGGREGATOR: &str = "https://europepmc.org/article/PMC6543210";
pub const DENYLISTED: &str = "https://sci-hub.se/10.1016/j.heares.2019.01.001";
pub const SOCIAL: &str = "https://www.researchgate.net/publication/330000000";
pub const PUBLISHER: &str = "https://www.sciencedirect.com/science/article/pii/S0378595518301";

pub fn repositories() -> RepositoryRegistry {
    RepositoryRegistry::from_reader(
        "repo_id,kind,url_prefixes\narxiv,disciplinary,arxiv.org\npub-bielefeld,institutional,pub.uni-bielefeld.de\neuropepmc,aggregator,europepmc.org\n"
            .as_bytes(),
    )
    .unwrap()
}

pub fn record(published: PartialDate) -> PublicationRecord {
    PublicationRecord {
        doi: Some("10.1016/j.heares.2019.01.001".parse().unwrap()),
        issns: [ISSN.parse::<Issn>().unwrap()].into(),
        journal_title: "Hearing Research".into(),
        publication_title: "Otoacoustic emissions revisited".into(),
        publication_date: published,
        document_type: DocumentType::Article,
        authors: vec![],
        institution: None,
    }
}

pub fn full_oa_match() -> FullOaMatch {
    FullOaMatch {
        entry: JournalRegistryEntry {
            issns: [ISSN.parse().unwrap()].into(),
            issn_l: None,
            title: "Hearing Research".into(),
            oa_since_year: None,
            source: JournalSource::DoajLike,
            pmc_embargo_months: None,
        },
        matched_issn: ISSN.parse().unwrap(),
        matched_via: MatchedVia::Direct,
    }
}

pub fn random_date(rng: &mut StdRng) -> PartialDate {
    let y = rng.gen_range(2015..=2020);
    match rng.gen_range(0..4) {
        0 => PartialDate::year(y),
        1 => PartialDate::year_month(y, rng.gen_range(1..=12)).unwrap(),
        _ => PartialDate::ymd(y, rng.gen_range(1..=12), rng.gen_range(1..=28)).unwrap(),
    }
}

pub fn random_version(rng: &mut StdRng) -> DeclaredVersion {
    *[
        DeclaredVersion::SubmittedVersion,
        DeclaredVersion::AcceptedVersion,
        DeclaredVersion::PublishedVersion,
        DeclaredVersion::Unknown,
    ]
    .choose(rng)
    .unwrap()
}

pub fn random_bundle(rng: &mut StdRng) -> EvidenceBundle {
    let mut b = EvidenceBundle::bare(record(random_date(rng)));
    for _ in 0..rng.gen_range(0..3) {
        let mut l = LicenseStatement::new(*LICENSES.choose(rng).unwrap());
        match rng.gen_range(0..3) {
            0 => l.delay_days = Some(rng.gen_range(0..800)),
            1 => l.start_date = Some(random_date(rng)),
            _ => {}
        }
        l.source = "crossref".into();
        b.publisher_licenses.push(l);
    }
    let urls = [DISCIPLINARY, INSTITUTIONAL, UNREGISTERED, AGGREGATOR, DENYLISTED, SOCIAL, PUBLISHER];
    for _ in 0..rng.gen_range(0..4) {
        let url = *urls.choose(rng).unwrap();
        b.locations.push(AccessLocation {
            url: url.into(),
            host_kind: if url == PUBLISHER || rng.gen_bool(0.1) { HostKind::PublisherSite } else { HostKind::Repository },
            repo_hint: None,
            deposit_timestamp: rng.gen_bool(0.6).then(|| random_date(rng)),
            declared_version: random_version(rng),
            license: rng.gen_bool(0.3).then(|| LicenseStatement::new(*LICENSES.choose(rng).unwrap())),
            source: "unpaywall".into(),
        });
    }
    if rng.gen_bool(0.2) {
        b.full_oa_match = Some(full_oa_match());
    }
    if rng.gen_bool(0.2) {
        b.pmc_embargo_months = Some(rng.gen_range(0..13));
    }
    b
}

pub fn default_config() -> ClassifierConfig {
    ClassifierConfig::default()
}

/// A classification with random labels that respects the taxonomy rules.
pub fn random_classification(rng: &mut StdRng) -> OaClassification {
    let all = OaClass::all();
    let greens: Vec<OaClass> = all.iter().copied().filter(OaClass::is_green).collect();
    let mut labels = std::collections::BTreeSet::new();
    if rng.gen_bool(0.5) {
        labels.insert(OaClass::Gold(*oaclass_core::GoldKind::ALL.choose(rng).unwrap()));
    }
    for _ in 0..rng.gen_range(0..3) {
        labels.insert(*greens.choose(rng).unwrap());
    }
    if labels.is_empty() {
        labels.insert(OaClass::NonOa);
    }
    let primary = *labels.iter().collect::<Vec<_>>().choose(rng).copied().unwrap();
    let access_mode = if primary == OaClass::NonOa {
        AccessMode::Closed
    } else if rng.gen_bool(0.5) {
        AccessMode::Libre
    } else {
        AccessMode::Gratis
    };
    OaClassification {
        doi: None,
        labels,
        primary,
        access_mode,
        evidence_refs: vec![],
        diagnostics: vec![],
        context: RecordContext {
            publication_date: Some(PartialDate::year(rng.gen_range(2016..=2020))),
            journal_title: ["Hearing Research", "Development", "Nature"].choose(rng).unwrap().to_string(),
            institution: ["Bielefeld University", "Göttingen University", ""]
                .choose(rng)
                .filter(|s| !s.is_empty())
                .map(|s| s.to_string()),
            ..Default::default()
        },
    }
}
