use std::collections::{BTreeMap, BTreeSet};
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use oaclass_core::classify::classify;
use oaclass_core::delayed::{
    build_delayed_registry, detect_delayed, detect_delayed_from_metadata, load_pmc_embargoes, write_pmc_embargoes,
    ArticleLicenses, ArticleObservation, DelayedRegistry, DetectError, JournalCohortStats,
};
use oaclass_core::ingest::{
    assemble_bundles, parse_crossref_snapshot, parse_location_snapshot, read_ndjson, EvidenceBundle, ParseReport,
};
use oaclass_core::registry::{
    lookup_journal_any, IssnLinkTable, JournalRegistry, JournalSource, RegistryError, RepositoryRegistry,
};
use oaclass_core::report::{aggregate, emit, parse_group_by, AggregationMode, ReportFormat};
use oaclass_core::{Doi, Issn, OaClassification, PublicationRecord};
use oaclass_harvest::{fetch_paged_json, harvest_oai, HarvestJob, HarvestState, Protocol};
use serde::de::DeserializeOwned;

use crate::config::{cache_dir, Config};
use crate::{
    ClassifyArgs, Cli, Command, DetectArgs, FormatArg, HarvestArgs, IngestArgs, JournalLists, JournalSourceArg,
    ModeArg, ProtocolArg, RegistryArgs, RegistryCommand, RegistryKind, ReportArgs,
};

/// A failed run: exit code 1 for data errors, 2 for usage errors.
pub struct Failure {
    pub code: u8,
    pub error: anyhow::Error,
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure { code: 1, error: e.into() }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure { code: 2, error: anyhow!(message.into()) }
}

type Result<T> = std::result::Result<T, Failure>;

pub fn run(cli: Cli) -> Result<()> {
    let config = Config::load(cli.config.as_deref()).map_err(usage)?;
    match cli.command {
        Command::Registry(RegistryCommand::Validate(args)) => registry_validate(&args),
        Command::Registry(RegistryCommand::Build { args, out }) => registry_build(&args, &out),
        Command::Harvest(args) => harvest(&args, &config),
        Command::Ingest(args) => ingest(&args),
        Command::Classify(args) => classify_cmd(&args, config),
        Command::DetectDelayed(args) => detect(&args, config),
        Command::Report(args) => report(&args, &config),
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    Ok(BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?))
}

fn log_report(report: &ParseReport) {
    for e in &report.errors {
        log::warn!("{e}");
    }
    if !report.errors.is_empty() {
        eprintln!("{}: {} of {} lines skipped", report.source_tag, report.errors.len(), report.lines);
    }
}

fn read_json_lines<T: DeserializeOwned>(path: &Path) -> anyhow::Result<Vec<T>> {
    let (items, report) = read_ndjson(path, |l| serde_json::from_str::<T>(l).map_err(|e| e.to_string()))
        .with_context(|| format!("reading {}", path.display()))?;
    log_report(&report);
    Ok(items)
}

fn write_json_lines<T: serde::Serialize>(path: &Path, items: &[T]) -> anyhow::Result<()> {
    let mut w = create(path)?;
    for item in items {
        serde_json::to_writer(&mut w, item)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn journal_source(arg: JournalSourceArg) -> JournalSource {
    match arg {
        JournalSourceArg::Doaj => JournalSource::DoajLike,
        JournalSourceArg::Gold => JournalSource::GoldListLike,
        JournalSourceArg::Pmc => JournalSource::PmcLike,
    }
}

fn registry_validate(args: &RegistryArgs) -> Result<()> {
    let path = &args.input;
    let problems: Vec<RegistryError> = match args.kind {
        RegistryKind::Journal => JournalRegistry::validate(path, journal_source(args.source)),
        RegistryKind::Repository => RepositoryRegistry::validate(path),
        RegistryKind::Link => IssnLinkTable::load(path).err().into_iter().collect(),
        RegistryKind::Pmc => load_pmc_embargoes(path).err().into_iter().collect(),
    };
    for p in &problems {
        eprintln!("{}: {p}", path.display());
    }
    if problems.is_empty() {
        println!("{}: ok", path.display());
        Ok(())
    } else {
        Err(anyhow!("{}: {} problem(s)", path.display(), problems.len()).into())
    }
}

fn registry_build(args: &RegistryArgs, out: &Path) -> Result<()> {
    let path = &args.input;
    let ctx = || format!("loading {}", path.display());
    let mut w = create(out)?;
    let n = match args.kind {
        RegistryKind::Journal => {
            let r = JournalRegistry::load(path, journal_source(args.source)).with_context(ctx)?;
            r.write_csv(&mut w)?;
            r.len()
        }
        RegistryKind::Repository => {
            let r = RepositoryRegistry::load(path).with_context(ctx)?;
            r.write_csv(&mut w)?;
            r.entries().len()
        }
        RegistryKind::Link => {
            let r = IssnLinkTable::load(path).with_context(ctx)?;
            r.write_csv(&mut w)?;
            r.len()
        }
        RegistryKind::Pmc => {
            let r = load_pmc_embargoes(path).with_context(ctx)?;
            write_pmc_embargoes(&r, &mut w)?;
            r.len()
        }
    };
    w.flush()?;
    println!("{}: {n} entries written to {}", path.display(), out.display());
    Ok(())
}

fn default_harvest_dir(endpoint: &str) -> PathBuf {
    let name: String = url::Url::parse(endpoint)
        .ok()
        .and_then(|u| u.host_str().map(String::from))
        .unwrap_or_else(|| "endpoint".into())
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '.' || c == '-' { c } else { '_' })
        .collect();
    cache_dir().join("harvest").join(name)
}

fn read_doi_list(path: &Path) -> anyhow::Result<Vec<Doi>> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
        match line.parse::<Doi>() {
            Ok(d) => out.push(d),
            Err(e) => log::warn!("{}:{}: {e}", path.display(), i + 1),
        }
    }
    Ok(out)
}

fn harvest(args: &HarvestArgs, config: &Config) -> Result<()> {
    let protocol = match args.protocol {
        ProtocolArg::Oai => Protocol::OaiPmh,
        ProtocolArg::Json => Protocol::PagedJson,
    };
    if args.ids.is_some() && protocol == Protocol::OaiPmh {
        return Err(usage("--ids needs --protocol json"));
    }
    let out = args.out.clone().unwrap_or_else(|| default_harvest_dir(&args.endpoint));
    let mut job = HarvestJob::new(args.endpoint.clone(), protocol);
    job.from = args.from.clone();
    job.until = args.until.clone();
    job.set_spec = args.set_spec.clone();
    job.politeness = config.harvest.politeness();
    if let Some(rps) = args.rps {
        job.politeness.max_requests_per_second = rps;
    }
    if let Some(r) = args.max_retries {
        job.politeness.max_retries = r;
    }
    job.max_pages = args.max_pages;
    job.repo_hint = args.repo_id.clone();
    job.headers = config.harvest.headers.iter().map(|(k, v)| (k.clone(), v.clone())).collect();
    job.resume_state = args.token.clone();
    if args.resume {
        match HarvestState::load(&out)? {
            Some(s) if s.complete => {
                println!("{}: harvest already complete ({} records)", out.display(), s.records);
                return Ok(());
            }
            Some(s) if s.next_token.is_some() => job.resume_state = s.next_token,
            _ => return Err(anyhow!("{}: no saved state to resume from", out.display()).into()),
        }
    }
    job.validate().map_err(|e| usage(e.to_string()))?;
    match protocol {
        Protocol::OaiPmh => {
            let o = harvest_oai(&job, &out)?;
            println!(
                "{}: {} pages, {} records, {} skipped, {} requests{}",
                out.display(),
                o.pages,
                o.records,
                o.skipped,
                o.requests,
                match &o.state.next_token {
                    Some(t) if !o.state.complete => format!("; resume token {t}"),
                    _ => String::new(),
                }
            );
        }
        Protocol::PagedJson => {
            let ids = args.ids.as_deref().map(read_doi_list).transpose()?;
            let o = fetch_paged_json(&job, ids.as_deref(), &out)?;
            println!(
                "{}: {} items, {} misses, {} requests{}",
                out.display(),
                o.items,
                o.misses.len(),
                o.requests,
                o.next_cursor.map(|c| format!("; resume cursor {c}")).unwrap_or_default()
            );
        }
    }
    Ok(())
}

struct Lists {
    registries: Vec<JournalRegistry>,
    link: IssnLinkTable,
    pmc: Option<BTreeMap<Issn, oaclass_core::delayed::PmcEmbargo>>,
}

fn load_lists(lists: &JournalLists) -> anyhow::Result<Lists> {
    let mut registries = Vec::new();
    for (paths, source) in [(&lists.doaj, JournalSource::DoajLike), (&lists.gold_list, JournalSource::GoldListLike)] {
        for p in paths {
            registries.push(JournalRegistry::load(p, source).with_context(|| format!("loading {}", p.display()))?);
        }
    }
    let link = match &lists.link {
        Some(p) => IssnLinkTable::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => IssnLinkTable::default(),
    };
    let pmc = lists
        .pmc
        .as_deref()
        .map(|p| load_pmc_embargoes(p).with_context(|| format!("loading {}", p.display())))
        .transpose()?;
    Ok(Lists { registries, link, pmc })
}

fn ingest(args: &IngestArgs) -> Result<()> {
    let lists = load_lists(&args.lists)?;
    let (records, report) = read_ndjson(&args.records, |l| {
        let r: PublicationRecord = serde_json::from_str(l).map_err(|e| e.to_string())?;
        r.validate().map_err(|e| e.to_string())?;
        Ok(r)
    })
    .with_context(|| format!("reading {}", args.records.display()))?;
    log_report(&report);
    let mut crossref = Vec::new();
    for p in &args.crossref {
        let (items, report) = parse_crossref_snapshot(p).with_context(|| format!("reading {}", p.display()))?;
        log_report(&report);
        crossref.extend(items);
    }
    let mut locations = Vec::new();
    for p in &args.locations {
        let (items, report) = parse_location_snapshot(p).with_context(|| format!("reading {}", p.display()))?;
        log_report(&report);
        locations.extend(items);
    }
    let pmc: Option<BTreeMap<Issn, u32>> =
        lists.pmc.map(|m| m.into_iter().map(|(k, v)| (k, v.embargo_months)).collect());
    let assembly = assemble_bundles(records, crossref, locations, &lists.registries, &lists.link, pmc.as_ref());
    write_json_lines(&args.out, &assembly.bundles)?;
    if let Some(path) = &args.orphans {
        let mut w = create(path)?;
        assembly.write_orphans_csv(&mut w)?;
        w.flush()?;
    }
    println!("{} bundles, {} orphaned evidence items", assembly.bundles.len(), assembly.orphans.len());
    Ok(())
}

fn classify_cmd(args: &ClassifyArgs, config: Config) -> Result<()> {
    let mut cfg = config.classifier;
    if let Some(g) = args.grace_days {
        cfg.immediate_grace_days = g;
    }
    if let Some(p) = &args.delayed {
        let reg = DelayedRegistry::load(p).with_context(|| format!("loading {}", p.display()))?;
        cfg.delayed_journal_set.extend(reg.journal_set());
    }
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let repos = match &args.repositories {
        Some(p) => RepositoryRegistry::load(p).with_context(|| format!("loading {}", p.display()))?,
        None => RepositoryRegistry::default(),
    };
    let bundles: Vec<EvidenceBundle> = read_json_lines(&args.bundles)?;
    let out: Vec<OaClassification> = bundles.iter().map(|b| classify(b, &repos, &cfg)).collect();
    write_json_lines(&args.out, &out)?;
    println!("{} records classified", out.len());
    Ok(())
}

fn journal_key(issn_l: Option<&Issn>, issns: &[Issn], link: &IssnLinkTable) -> Option<Issn> {
    issn_l.cloned().or_else(|| issns.first().map(|i| link.resolve(i).cloned().unwrap_or_else(|| i.clone())))
}

fn detect(args: &DetectArgs, config: Config) -> Result<()> {
    let mut dc = config.detector;
    if args.reference_date.is_some() {
        dc.reference_date = args.reference_date;
    }
    if dc.reference_date.is_none() {
        return Err(usage("a reference date is required (--reference-date or [detector] reference_date)"));
    }
    let lists = load_lists(&args.lists)?;
    let classifications: Vec<OaClassification> = read_json_lines(&args.classifications)?;

    let mut journals: BTreeMap<Issn, (String, Vec<ArticleObservation>)> = BTreeMap::new();
    for c in &classifications {
        let ctx = &c.context;
        let (Some(key), Some(date)) = (journal_key(ctx.issn_l.as_ref(), &ctx.issns, &lists.link), ctx.publication_date)
        else {
            continue;
        };
        let entry = journals.entry(key).or_insert_with(|| (ctx.journal_title.clone(), Vec::new()));
        entry.1.push(ArticleObservation { publication_date: date, publisher_open: ctx.publisher_open });
    }
    let mut stats: Vec<JournalCohortStats> = Vec::new();
    for (issn_l, (title, articles)) in &journals {
        match detect_delayed(issn_l, title, articles, &lists.registries, &lists.link, &dc) {
            Ok(s) => stats.push(s),
            Err(DetectError::RegistryConflict(i)) => log::info!("{i}: listed as full OA, not assessed"),
            Err(e) => return Err(anyhow!(e).into()),
        }
    }

    let mut metadata: BTreeMap<Issn, u32> = BTreeMap::new();
    if let Some(path) = &args.bundles {
        let bundles: Vec<EvidenceBundle> = read_json_lines(path)?;
        let mut by_journal: BTreeMap<Issn, Vec<ArticleLicenses>> = BTreeMap::new();
        for b in bundles {
            let issns: Vec<Issn> = b.record.issns.iter().cloned().collect();
            let Some(key) = journal_key(b.issn_l.as_ref(), &issns, &lists.link) else { continue };
            by_journal.entry(key).or_default().push(ArticleLicenses {
                publication_date: b.earliest_publication_date,
                licenses: b.publisher_licenses,
            });
        }
        let year = dc.reference_date.map(|d| chrono::Datelike::year(&d)).unwrap_or_default();
        for (issn_l, articles) in by_journal {
            let issns: BTreeSet<Issn> =
                [issn_l.clone()].into_iter().chain(lists.link.members(&issn_l).cloned()).collect();
            if lookup_journal_any(&issns, year, &lists.registries, &lists.link).is_some() {
                continue;
            }
            if let Some(days) =
                detect_delayed_from_metadata(&articles, dc.immediate_grace_days, &config.classifier.open_license_patterns)
            {
                metadata.insert(issn_l, days);
            }
        }
    }

    let pmc = lists.pmc.unwrap_or_default();
    let registry = build_delayed_registry(&stats, &metadata, &pmc, &lists.link);
    let mut w = create(&args.out)?;
    registry.write_csv(&mut w)?;
    w.flush()?;
    if let Some(path) = &args.stats {
        write_stats(path, &stats)?;
    }
    println!("{} journals assessed, {} flagged as delayed OA", journals.len(), registry.rows.len());
    Ok(())
}

fn write_stats(path: &Path, stats: &[JournalCohortStats]) -> anyhow::Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(create(path)?);
    w.write_record(["issn_l", "title", "n_old", "open_old", "n_recent", "open_recent", "verdict"])?;
    for s in stats {
        w.write_record([
            s.issn_l.to_string(),
            s.title.clone(),
            s.old_cohort.n.to_string(),
            s.old_cohort.open.to_string(),
            s.recent_cohort.n.to_string(),
            s.recent_cohort.open.to_string(),
            s.verdict.code().to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

fn report(args: &ReportArgs, config: &Config) -> Result<()> {
    let names = args.group_by.clone().unwrap_or_else(|| config.report.group_by.clone());
    let names: Vec<String> = names.into_iter().filter(|n| !n.trim().is_empty()).collect();
    let fields = parse_group_by(&names).map_err(|e| usage(e.to_string()))?;
    let mode = match args.mode {
        Some(ModeArg::Primary) => AggregationMode::PrimaryLabel,
        Some(ModeArg::Multi) => AggregationMode::MultiLabel,
        None => match &config.report.mode {
            Some(m) => m.parse().map_err(usage)?,
            None => AggregationMode::PrimaryLabel,
        },
    };
    let format = match args.format {
        Some(FormatArg::Csv) => ReportFormat::Csv,
        Some(FormatArg::Json) => ReportFormat::Json,
        None => match &config.report.format {
            Some(f) => f.parse().map_err(usage)?,
            None => ReportFormat::Csv,
        },
    };
    let classifications: Vec<OaClassification> = read_json_lines(&args.classifications)?;
    let reports = aggregate(&classifications, &fields, mode);
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            emit(&reports, &fields, format, &mut w)?;
        }
        None => emit(&reports, &fields, format, std::io::stdout().lock())?,
    }
    Ok(())
}
