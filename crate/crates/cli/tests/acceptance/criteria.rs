use std::collections::BTreeSet;
use std::time::Instant;

use chrono::{Months, NaiveDate};
use oaclass_core::classify::{classify, green_timing as timing_of, ClassifierConfig};
use oaclass_core::delayed::{detect_delayed, ArticleObservation, DetectorConfig, Verdict};
use oaclass_core::ingest::{assemble_bundles, AccessLocation, DeclaredVersion, EvidenceBundle, HostKind, LicenseStatement};
use oaclass_core::registry::{IssnLinkTable, JournalRegistry, JournalSource};
use oaclass_core::report::{aggregate, write_csv, AggregationMode, GroupField, ShareAccumulator};
use oaclass_core::{GreenTiming, Issn, OaClass, PartialDate, PublicationRecord};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use crate::gen::*;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Host {
    Publisher,
    Institutional,
    Disciplinary,
    Denylisted,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Journal {
    Plain,
    Registered,
    PmcEmbargo,
}

#[derive(Clone, Copy, Debug)]
struct Cell {
    offset_days: i64,
    license: &'static str,
    host: Host,
    version: DeclaredVersion,
    n_licenses: usize,
    n_locations: usize,
    journal: Journal,
}

const PUBLISHED: (i32, u32, u32) = (2019, 3, 15);

fn published() -> NaiveDate {
    NaiveDate::from_ymd_opt(PUBLISHED.0, PUBLISHED.1, PUBLISHED.2).unwrap()
}

fn grid() -> Vec<Cell> {
    let mut cells = Vec::new();
    for offset_days in [-60, 0, 400] {
        for license in LICENSES {
            for host in [Host::Publisher, Host::Institutional, Host::Disciplinary, Host::Denylisted] {
                for version in [DeclaredVersion::SubmittedVersion, DeclaredVersion::AcceptedVersion, DeclaredVersion::Unknown] {
                    for n_licenses in 0..=2 {
                        for n_locations in 1..=2 {
                            for journal in [Journal::Plain, Journal::Registered, Journal::PmcEmbargo] {
                                cells.push(Cell { offset_days, license, host, version, n_licenses, n_locations, journal });
                            }
                        }
                    }
                }
            }
        }
    }
    cells
}

fn build(cell: &Cell) -> EvidenceBundle {
    let date = PartialDate::from_naive(published() + chrono::Duration::days(cell.offset_days));
    let mut b = EvidenceBundle::bare(record(PartialDate::from_naive(published())));
    if cell.n_licenses >= 1 {
        b.publisher_licenses.push(LicenseStatement { start_date: Some(date), ..LicenseStatement::new(cell.license) });
    }
    if cell.n_licenses == 2 {
        b.publisher_licenses.push(LicenseStatement { delay_days: Some(0), ..LicenseStatement::new(PROPRIETARY) });
    }
    let url = match cell.host {
        Host::Publisher => PUBLISHER,
        Host::Institutional => INSTITUTIONAL,
        Host::Disciplinary => DISCIPLINARY,
        Host::Denylisted => DENYLISTED,
    };
    b.locations.push(AccessLocation {
        url: url.into(),
        host_kind: if cell.host == Host::Publisher { HostKind::PublisherSite } else { HostKind::Repository },
        repo_hint: None,
        deposit_timestamp: Some(date),
        declared_version: cell.version,
        license: Some(LicenseStatement::new(cell.license)),
        source: "grid".into(),
    });
    if cell.n_locations == 2 {
        b.locations.push(AccessLocation {
            url: UNREGISTERED.into(),
            host_kind: HostKind::Repository,
            repo_hint: None,
            deposit_timestamp: None,
            declared_version: cell.version,
            license: None,
            source: "grid".into(),
        });
    }
    match cell.journal {
        Journal::Plain => {}
        Journal::Registered => b.full_oa_match = Some(full_oa_match()),
        Journal::PmcEmbargo => b.pmc_embargo_months = Some(6),
    }
    b
}

/// Default reporting precedence, written out independently of the library.
const PRECEDENCE: [&str; 13] = [
    "gold_full",
    "gold_hybrid",
    "gold_delayed",
    "green_postprint_disciplinary",
    "green_postprint_institutional",
    "green_postprint_other",
    "green_unknown_disciplinary",
    "green_unknown_institutional",
    "green_unknown_other",
    "green_preprint_disciplinary",
    "green_preprint_institutional",
    "green_preprint_other",
    "non_oa",
];

/// Brute-force evaluation of the written rules for one grid cell.
fn oracle(cell: &Cell) -> (BTreeSet<String>, String, &'static str) {
    let open = cell.license.contains("creativecommons.org/licenses/") || cell.license.contains("creativecommons.org/publicdomain/");
    let open_crossref = cell.n_licenses >= 1 && open;
    let gold = if cell.journal == Journal::Registered {
        Some("gold_full")
    } else if open_crossref && cell.offset_days <= 30 {
        Some("gold_hybrid")
    } else if (open_crossref && cell.offset_days > 30) || cell.journal == Journal::PmcEmbargo {
        Some("gold_delayed")
    } else {
        None
    };
    let mut labels = BTreeSet::new();
    labels.extend(gold.map(String::from));
    let mut green_libre = false;
    let host = match cell.host {
        Host::Institutional => Some("institutional"),
        Host::Disciplinary => Some("disciplinary"),
        _ => None,
    };
    if let Some(host) = host {
        let timing = if cell.offset_days <= 0 { "preprint" } else { "postprint" };
        labels.insert(format!("green_{timing}_{host}"));
        green_libre = open;
    }
    if cell.n_locations == 2 {
        let timing = match cell.version {
            DeclaredVersion::SubmittedVersion => "preprint",
            DeclaredVersion::AcceptedVersion | DeclaredVersion::PublishedVersion => "postprint",
            DeclaredVersion::Unknown => "unknown",
        };
        labels.insert(format!("green_{timing}_other"));
    }
    if labels.is_empty() {
        labels.insert("non_oa".to_string());
    }
    let primary = PRECEDENCE.iter().find(|c| labels.contains(**c)).unwrap().to_string();
    let gold_libre = gold.is_some() && (open_crossref || (cell.host == Host::Publisher && open));
    let mode = if gold_libre || green_libre {
        "libre"
    } else if labels.contains("non_oa") {
        "closed"
    } else {
        "gratis"
    };
    (labels, primary, mode)
}

pub fn decision_table() -> Result<String, String> {
    let start = Instant::now();
    let repos = repositories();
    let config = ClassifierConfig::default();
    let cells = grid();
    let mut mismatches = Vec::new();
    for cell in &cells {
        let got = classify(&build(cell), &repos, &config);
        let labels: BTreeSet<String> = got.labels.iter().map(OaClass::code).collect();
        let actual = (labels, got.primary.code(), got.access_mode.code());
        let expected = oracle(cell);
        if actual != expected {
            mismatches.push(format!("{cell:?}: expected {expected:?}, got {actual:?}"));
        }
    }
    let elapsed = start.elapsed();
    ensure(mismatches.is_empty(), || format!("{} of {} cells differ; first: {}", mismatches.len(), cells.len(), mismatches[0]))?;
    ensure(elapsed.as_secs_f64() < 5.0, || format!("took {elapsed:?}"))?;
    Ok(format!("{} bundles match, {:.2}s", cells.len(), elapsed.as_secs_f64()))
}

pub fn taxonomy() -> Result<String, String> {
    let all = OaClass::all();
    let codes: BTreeSet<String> = all.iter().map(OaClass::code).collect();
    ensure(all.len() == 13 && codes.len() == 13, || format!("{} classes, {} codes", all.len(), codes.len()))?;
    for c in &all {
        let code = c.code();
        ensure(code.parse::<OaClass>().ok() == Some(*c), || format!("{code} does not parse back"))?;
        let json = serde_json::to_string(c).unwrap();
        ensure(json == format!("\"{code}\""), || format!("{c:?} serializes as {json}"))?;
        ensure(serde_json::from_str::<OaClass>(&json).ok() == Some(*c), || format!("{json} does not deserialize"))?;
    }
    let mut rng = StdRng::seed_from_u64(2);
    let repos = repositories();
    let config = default_config();
    for i in 0..10_000 {
        let b = random_bundle(&mut rng);
        let c = classify(&b, &repos, &config);
        let gold = c.labels.iter().filter(|l| l.is_gold()).count();
        ensure(gold <= 1, || format!("bundle {i}: {gold} gold labels in {:?}", c.labels))?;
        ensure(!c.labels.contains(&OaClass::NonOa) || c.labels.len() == 1, || format!("bundle {i}: non_oa mixed in {:?}", c.labels))?;
        ensure(!c.labels.is_empty() && c.labels.contains(&c.primary), || format!("bundle {i}: bad primary"))?;
        let back: oaclass_core::OaClassification = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        ensure(back == c, || format!("bundle {i}: classification does not round-trip"))?;
    }
    Ok("13 codes round-trip; 10000 bundles hold gold exclusivity".into())
}

fn check_char(stem: &[u32; 7]) -> char {
    let sum: u32 = stem.iter().zip((2..=8).rev()).map(|(d, w)| d * w).sum();
    match (11 - sum % 11) % 11 {
        10 => 'X',
        c => char::from_digit(c, 10).unwrap(),
    }
}

pub fn issn_checksum() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(3);
    let mut stems: Vec<[u32; 7]> = Vec::new();
    while stems.len() < 50 {
        let stem: [u32; 7] = std::array::from_fn(|_| rng.gen_range(0..10));
        let x_count = stems.iter().filter(|s| check_char(s) == 'X').count();
        if stems.len() < 10 && x_count < 10 && check_char(&stem) != 'X' {
            continue;
        }
        stems.push(stem);
    }
    let mut x_cases = 0;
    for stem in &stems {
        let digits: String = stem.iter().map(|d| char::from_digit(*d, 10).unwrap()).collect();
        let expected = check_char(stem);
        x_cases += usize::from(expected == 'X');
        for c in "0123456789X".chars() {
            for form in [format!("{}-{}{c}", &digits[..4], &digits[4..]), format!("{digits}{c}")] {
                let accepted = form.parse::<Issn>().is_ok();
                ensure(accepted == (c == expected), || format!("{form}: accepted={accepted}, check is {expected}"))?;
                if accepted {
                    let canonical = format!("{}-{}{c}", &digits[..4], &digits[4..]);
                    ensure(form.parse::<Issn>().unwrap().to_string() == canonical, || format!("{form} not canonicalized"))?;
                }
            }
        }
    }
    Ok(format!("50 stems x 11 check characters, {x_cases} stems with check X"))
}

pub fn transition_year() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(4);
    let repos = repositories();
    let config = default_config();
    let link = IssnLinkTable::default();
    let (mut before, mut after) = (0, 0);
    for _ in 0..1000 {
        let since = rng.gen_range(1995..2025);
        let year = since + rng.gen_range(-6..=6);
        let registry =
            JournalRegistry::from_reader(format!("issn,issn_l,title,oa_since_year\n{ISSN},,Hearing Research,{since}\n").as_bytes(), JournalSource::DoajLike)
                .map_err(|e| e.to_string())?;
        let date = match rng.gen_range(0..3) {
            0 => PartialDate::year(year),
            1 => PartialDate::year_month(year, rng.gen_range(1..=12)).unwrap(),
            _ => PartialDate::ymd(year, rng.gen_range(1..=12), rng.gen_range(1..=28)).unwrap(),
        };
        let rec: PublicationRecord = record(date);
        let assembly = assemble_bundles([rec], vec![], vec![], &[registry], &link, None);
        let c = classify(&assembly.bundles[0], &repos, &config);
        let full = c.labels.contains(&OaClass::Gold(oaclass_core::GoldKind::FullOa));
        ensure(full == (year >= since), || format!("published {date}, OA since {since}: full OA = {full}"))?;
        if year >= since {
            after += 1;
        } else {
            before += 1;
        }
    }
    Ok(format!("{before} records before and {after} at or after the transition year"))
}

fn synthetic_journal(open: impl Fn(NaiveDate) -> bool) -> Vec<ArticleObservation> {
    let start = NaiveDate::from_ymd_opt(2016, 1, 1).unwrap();
    (0..200)
        .map(|i| {
            let d = start + chrono::Duration::days(i * 1461 / 200);
            ArticleObservation { publication_date: PartialDate::from_naive(d), publisher_open: open(d) }
        })
        .collect()
}

pub fn delayed_synthetic() -> Result<String, String> {
    let reference = NaiveDate::from_ymd_opt(2020, 1, 1).unwrap();
    let config = DetectorConfig { reference_date: Some(reference), ..Default::default() };
    let issn: Issn = ISSN.parse().unwrap();
    let link = IssnLinkTable::default();
    let run = |articles: Vec<ArticleObservation>| detect_delayed(&issn, "Synthetic", &articles, &[], &link, &config);

    let wall = run(synthetic_journal(|d| d + Months::new(12) <= reference)).map_err(|e| e.to_string())?;
    let old = wall.old_cohort.share().unwrap_or(-1.0);
    let recent = wall.recent_cohort.share().unwrap_or(2.0);
    ensure(wall.verdict == Verdict::Delayed, || format!("moving wall verdict {:?}", wall.verdict))?;
    ensure(old == 1.0, || format!("moving wall old_share {old}"))?;
    ensure(recent <= 0.5, || format!("moving wall recent_share {recent}"))?;

    let always = run(synthetic_journal(|_| true)).map_err(|e| e.to_string())?;
    ensure(always.verdict == Verdict::NotDelayed, || format!("always-open verdict {:?}", always.verdict))?;
    let never = run(synthetic_journal(|_| false)).map_err(|e| e.to_string())?;
    ensure(never.verdict == Verdict::NotDelayed, || format!("never-open verdict {:?}", never.verdict))?;
    Ok(format!(
        "moving wall delayed (old {:.3} of {}, recent {:.3} of {}); always-open and never-open not delayed",
        old, wall.old_cohort.n, recent, wall.recent_cohort.n
    ))
}

type Ymd = (i32, Option<u32>, Option<u32>);

fn random_ymd(rng: &mut StdRng) -> Ymd {
    let y = rng.gen_range(2017..=2020);
    match rng.gen_range(0..4) {
        0 => (y, None, None),
        1 => (y, Some(rng.gen_range(1..=12)), None),
        _ => (y, Some(rng.gen_range(1..=12)), Some(rng.gen_range(1..=28))),
    }
}

fn to_partial((y, m, d): Ymd) -> PartialDate {
    match (m, d) {
        (None, _) => PartialDate::year(y),
        (Some(m), None) => PartialDate::year_month(y, m).unwrap(),
        (Some(m), Some(d)) => PartialDate::ymd(y, m, d).unwrap(),
    }
}

/// Compares at the coarser of the two precisions.
fn oracle_timing(deposit: Ymd, published: Ymd, preprint_on_equal: bool) -> GreenTiming {
    let depth = |x: &Ymd| 1 + usize::from(x.1.is_some()) + usize::from(x.2.is_some());
    let n = depth(&deposit).min(depth(&published));
    let key = |x: &Ymd| [x.0 as i64, x.1.unwrap_or(0) as i64, x.2.unwrap_or(0) as i64];
    let (a, b) = (key(&deposit), key(&published));
    match a[..n].cmp(&b[..n]) {
        std::cmp::Ordering::Less => GreenTiming::Preprint,
        std::cmp::Ordering::Equal if preprint_on_equal => GreenTiming::Preprint,
        _ => GreenTiming::Postprint,
    }
}

pub fn green_timing() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(6);
    let (mut equal, mut month) = (0, 0);
    for i in 0..1000 {
        let published = random_ymd(&mut rng);
        let deposit = match i % 5 {
            0 => published,
            1 => (published.0, published.1.or(Some(rng.gen_range(1..=12))), None),
            _ => random_ymd(&mut rng),
        };
        equal += usize::from(deposit == published);
        month += usize::from(deposit.1.is_some() && deposit.2.is_none() || published.1.is_some() && published.2.is_none());
        for preprint_on_equal in [true, false] {
            let version = random_version(&mut rng);
            let got = timing_of(Some(&to_partial(deposit)), version, &to_partial(published), preprint_on_equal);
            let want = oracle_timing(deposit, published, preprint_on_equal);
            ensure(got == want, || format!("deposit {deposit:?} published {published:?} (equal as preprint: {preprint_on_equal}): got {got:?}, want {want:?}"))?;
        }
    }
    Ok(format!("1000 pairs, {equal} identical, {month} with month precision"))
}

pub fn denylist_and_precedence() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(7);
    let repos = repositories();
    let base = default_config();
    let hosts = ["arxiv.org", "pub.uni-bielefeld.de", "zenodo.org", "europepmc.org", "sciencedirect.com"];
    let mut shrunk = 0;
    for i in 0..10_000 {
        let b = random_bundle(&mut rng);
        let reference = classify(&b, &repos, &base);

        let mut extra = base.clone();
        let k = rng.gen_range(1..=hosts.len());
        extra.unlawful_host_denylist.extend(hosts.choose_multiple(&mut rng, k).map(|h| h.to_string()));
        let restricted = classify(&b, &repos, &extra);
        let strip = |s: &BTreeSet<OaClass>| s.iter().copied().filter(|c| *c != OaClass::NonOa).collect::<BTreeSet<_>>();
        ensure(strip(&restricted.labels).is_subset(&strip(&reference.labels)), || {
            format!("bundle {i}: denylist added labels {:?} -> {:?}", reference.labels, restricted.labels)
        })?;
        shrunk += usize::from(restricted.labels != reference.labels);

        let mut order = OaClass::all();
        order.shuffle(&mut rng);
        let permuted = classify(&b, &repos, &ClassifierConfig { precedence: order.clone(), ..base.clone() });
        ensure(permuted.labels == reference.labels, || format!("bundle {i}: precedence changed labels"))?;
        ensure(permuted.access_mode == reference.access_mode, || format!("bundle {i}: precedence changed access mode"))?;
        ensure(permuted.evidence_refs == reference.evidence_refs, || format!("bundle {i}: precedence changed evidence"))?;
        let expected = *order.iter().find(|c| reference.labels.contains(c)).unwrap();
        ensure(permuted.primary == expected, || format!("bundle {i}: primary {:?}, expected {expected:?}", permuted.primary))?;
    }
    Ok(format!("10000 bundles; denylist removed labels in {shrunk}"))
}

pub fn aggregation() -> Result<String, String> {
    let mut rng = StdRng::seed_from_u64(9);
    let records: Vec<_> = (0..10_000).map(|_| random_classification(&mut rng)).collect();
    let groupings: [&[GroupField]; 3] = [&[], &[GroupField::Year], &[GroupField::Year, GroupField::Institution, GroupField::AccessMode]];
    let mut worst: f64 = 0.0;
    for fields in groupings {
        for mode in [AggregationMode::PrimaryLabel, AggregationMode::MultiLabel] {
            let whole = aggregate(&records, fields, mode);
            let mut whole_csv = Vec::new();
            write_csv(&whole, fields, &mut whole_csv).unwrap();
            for trial in 0..5 {
                let mut shuffled = records.clone();
                shuffled.shuffle(&mut rng);
                let permuted = aggregate(&shuffled, fields, mode);
                ensure(permuted == whole, || format!("{fields:?} {mode:?}: permutation changed the report"))?;
                let mut csv = Vec::new();
                write_csv(&permuted, fields, &mut csv).unwrap();
                ensure(csv == whole_csv, || format!("{fields:?} {mode:?}: CSV not byte-identical"))?;

                let parts = rng.gen_range(2..=8);
                let mut accs: Vec<ShareAccumulator> = (0..parts).map(|_| ShareAccumulator::new(fields, mode)).collect();
                for r in &shuffled {
                    accs[rng.gen_range(0..parts)].add(r);
                }
                let mut merged = ShareAccumulator::new(fields, mode);
                for a in accs {
                    merged.merge(a);
                }
                ensure(merged.finish() == whole, || format!("{fields:?} {mode:?} trial {trial}: {parts}-way partition not additive"))?;
            }
            let total: u64 = whole.iter().map(|r| r.total).sum();
            ensure(total == records.len() as u64, || format!("group totals {total}"))?;
            for r in &whole {
                ensure(r.counts.len() == 13, || "missing zero classes".into())?;
                let count_sum: u64 = r.counts.values().sum();
                if mode == AggregationMode::PrimaryLabel {
                    let share_sum: f64 = r.shares.values().sum();
                    worst = worst.max((share_sum - 1.0).abs());
                    ensure(count_sum == r.total, || format!("{:?}: counts {count_sum} != total {}", r.group_key, r.total))?;
                    ensure((share_sum - 1.0).abs() <= 1e-9, || format!("{:?}: shares sum to {share_sum}", r.group_key))?;
                } else {
                    ensure(r.counts.values().all(|&c| c <= r.total), || format!("{:?}: count above total", r.group_key))?;
                }
            }
        }
    }
    Ok(format!("10000 classifications, 3 groupings x 2 modes x 5 shuffles and partitions; max |sum(shares) - 1| = {worst:.1e}"))
}
