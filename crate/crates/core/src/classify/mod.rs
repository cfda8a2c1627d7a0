//! The decision engine: evidence bundle in, classification out.
//!
//! Gold rules are evaluated in a fixed order (registry, immediate open
//! license, delay signals) so at most one Gold class applies. Green labels
//! come from every lawful repository location. The primary label is picked
//! by configurable precedence and never influences the label set.

mod config;
mod license;

use std::collections::BTreeSet;

pub use config::{
    default_denylist, default_license_patterns, default_precedence, ClassifierConfig, ConfigError,
    DEFAULT_GRACE_DAYS,
};
pub use license::{match_license, normalize_license_url};

use crate::ingest::{AccessLocation, DeclaredVersion, EvidenceBundle, HostKind};
use crate::model::{
    AccessMode, EvidenceRef, GoldKind, GreenHost, GreenTiming, OaClass, OaClassification,
    PartialDate, RecordContext,
};
use crate::registry::{normalize_url, HostClass, MatchedVia, RepositoryRegistry};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GoldOutcome {
    pub class: Option<OaClass>,
    /// Access mode this outcome contributes: Libre with an open license,
    /// Gratis otherwise. `None` when no Gold class applies.
    pub contribution: Option<AccessMode>,
    pub evidence: Vec<EvidenceRef>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct GreenOutcome {
    pub classes: BTreeSet<OaClass>,
    pub libre: bool,
    pub evidence: Vec<EvidenceRef>,
    pub diagnostics: Vec<String>,
}

fn is_denylisted(url: &str, denylist: &[String]) -> bool {
    let Some(normalized) = normalize_url(url) else {
        return false;
    };
    let host = normalized.split('/').next().unwrap_or_default();
    denylist.iter().any(|entry| {
        let entry = entry.trim().to_ascii_lowercase();
        !entry.is_empty()
            && (normalized.starts_with(&entry) || host.ends_with(&format!(".{}", entry.trim_end_matches('.'))))
    })
}

fn in_delayed_set(bundle: &EvidenceBundle, config: &ClassifierConfig) -> bool {
    bundle.record.issns.iter().chain(bundle.issn_l.iter()).any(|i| config.delayed_journal_set.contains(i))
}

fn publisher_location_open(loc: &AccessLocation, config: &ClassifierConfig) -> bool {
    loc.host_kind == HostKind::PublisherSite
        && loc.license.as_ref().is_some_and(|l| match_license(&l.url, &config.open_license_patterns))
}

pub fn classify_gold(bundle: &EvidenceBundle, config: &ClassifierConfig) -> GoldOutcome {
    let published = &bundle.earliest_publication_date;
    let grace = i64::from(config.immediate_grace_days);
    let open: Vec<_> = bundle
        .publisher_licenses
        .iter()
        .filter(|l| match_license(&l.url, &config.open_license_patterns))
        .map(|l| (l, l.effective_delay(published)))
        .collect();
    let immediate: Vec<_> = open.iter().filter(|(_, d)| *d <= grace).collect();
    let late: Vec<_> = open.iter().filter(|(_, d)| *d > grace).collect();
    let listed_delayed = in_delayed_set(bundle, config);
    let pmc = bundle.pmc_embargo_months.filter(|m| *m > 0);

    let mut out = GoldOutcome::default();
    let class = if let Some(m) = &bundle.full_oa_match {
        let label = OaClass::Gold(GoldKind::FullOa);
        let via = match m.matched_via {
            MatchedVia::Direct => "direct",
            MatchedVia::IssnL => "issn_l",
        };
        out.evidence.push(EvidenceRef {
            label,
            source: format!("registry:{}", m.entry.source.code()),
            detail: format!("{} matched via {via}", m.matched_issn),
        });
        if listed_delayed || !late.is_empty() || pmc.is_some() {
            out.diagnostics.push(format!(
                "contradiction: full OA registry match for {} but delay signals present (delayed set: {listed_delayed}, late licenses: {}, pmc embargo: {pmc:?}); registry wins",
                m.matched_issn,
                late.len()
            ));
        }
        Some(label)
    } else if !immediate.is_empty() {
        let label = OaClass::Gold(GoldKind::HybridOa);
        for (l, d) in &immediate {
            out.evidence.push(EvidenceRef { label, source: l.evidence_id(), detail: format!("open license effective after {d} days") });
        }
        Some(label)
    } else if listed_delayed || !late.is_empty() || pmc.is_some() {
        let label = OaClass::Gold(GoldKind::DelayedOa);
        if listed_delayed {
            out.evidence.push(EvidenceRef { label, source: "delayed-registry".into(), detail: "journal in delayed OA set".into() });
        }
        for (l, d) in &late {
            out.evidence.push(EvidenceRef { label, source: l.evidence_id(), detail: format!("open license effective after {d} days") });
        }
        if let Some(m) = pmc {
            out.evidence.push(EvidenceRef { label, source: "pmc".into(), detail: format!("embargo {m} months") });
        }
        Some(label)
    } else {
        if bundle.locations.iter().any(|l| l.host_kind == HostKind::PublisherSite) {
            out.diagnostics.push(
                "publisher-hosted copy without open license or registry evidence (bronze); no gold class assigned".into(),
            );
        }
        None
    };
    out.class = class;
    if class.is_some() {
        let libre = !open.is_empty() || bundle.locations.iter().any(|l| publisher_location_open(l, config));
        out.contribution = Some(if libre { AccessMode::Libre } else { AccessMode::Gratis });
    }
    out
}

/// Timing of a repository deposit relative to formal publication.
pub fn green_timing(
    deposit: Option<&PartialDate>,
    version: DeclaredVersion,
    published: &PartialDate,
    preprint_on_equal_date: bool,
) -> GreenTiming {
    match deposit {
        Some(ts) => match ts.cmp_common(published) {
            std::cmp::Ordering::Less => GreenTiming::Preprint,
            std::cmp::Ordering::Equal if preprint_on_equal_date => GreenTiming::Preprint,
            _ => GreenTiming::Postprint,
        },
        None => match version {
            DeclaredVersion::SubmittedVersion => GreenTiming::Preprint,
            DeclaredVersion::AcceptedVersion | DeclaredVersion::PublishedVersion => GreenTiming::Postprint,
            DeclaredVersion::Unknown => GreenTiming::UnknownTiming,
        },
    }
}

pub fn green_host(class: HostClass) -> GreenHost {
    match class {
        HostClass::Institutional => GreenHost::Institutional,
        HostClass::Disciplinary => GreenHost::Disciplinary,
        _ => GreenHost::OtherRepository,
    }
}

pub fn classify_green(bundle: &EvidenceBundle, repositories: &RepositoryRegistry, config: &ClassifierConfig) -> GreenOutcome {
    let mut out = GreenOutcome::default();
    for loc in bundle.locations.iter().filter(|l| l.host_kind == HostKind::Repository) {
        if is_denylisted(&loc.url, &config.unlawful_host_denylist) {
            out.diagnostics.push(format!("location {} on a denylisted host is not counted", loc.url));
            continue;
        }
        let host = green_host(repositories.classify_host(&loc.url));
        let timing = green_timing(
            loc.deposit_timestamp.as_ref(),
            loc.declared_version,
            &bundle.earliest_publication_date,
            config.preprint_on_equal_date,
        );
        let label = OaClass::Green { timing, host };
        out.classes.insert(label);
        let licensed = loc.license.as_ref().is_some_and(|l| match_license(&l.url, &config.open_license_patterns));
        out.libre |= licensed;
        let detail = match &loc.deposit_timestamp {
            Some(ts) => format!("deposited {ts}, published {}", bundle.earliest_publication_date),
            None => format!("declared version {:?}", loc.declared_version),
        };
        out.evidence.push(EvidenceRef { label, source: loc.evidence_id(), detail });
    }
    out
}

pub fn classify(bundle: &EvidenceBundle, repositories: &RepositoryRegistry, config: &ClassifierConfig) -> OaClassification {
    let gold = classify_gold(bundle, config);
    let green = classify_green(bundle, repositories, config);

    let mut labels: BTreeSet<OaClass> = green.classes.clone();
    labels.extend(gold.class);
    if labels.is_empty() {
        labels.insert(OaClass::NonOa);
    }
    let primary = *labels
        .iter()
        .min_by_key(|c| config.rank(c))
        .expect("labels is non-empty");
    let access_mode = if gold.contribution == Some(AccessMode::Libre) || green.libre {
        AccessMode::Libre
    } else if labels.contains(&OaClass::NonOa) {
        AccessMode::Closed
    } else {
        AccessMode::Gratis
    };

    let record = &bundle.record;
    let context = RecordContext {
        issn_l: bundle.issn_l.clone(),
        issns: record.issns.iter().cloned().collect(),
        journal_title: record.journal_title.clone(),
        publication_date: Some(bundle.earliest_publication_date),
        document_type: Some(record.document_type),
        institution: record.institution.clone(),
        publisher_open: bundle.locations.iter().any(|l| l.host_kind == HostKind::PublisherSite),
    };
    let mut evidence_refs = gold.evidence;
    evidence_refs.extend(green.evidence);
    let mut diagnostics = gold.diagnostics;
    diagnostics.extend(green.diagnostics);
    for d in &diagnostics {
        log::debug!("{}: {d}", record.doi.as_ref().map_or("<no doi>", |d| d.as_str()));
    }

    OaClassification {
        doi: record.doi.clone(),
        labels,
        primary,
        access_mode,
        evidence_refs,
        diagnostics,
        context,
    }
}
