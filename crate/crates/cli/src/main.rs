//! `oaclass`: harvest evidence, classify publications by Open Access status
//! and report OA shares.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "oaclass", version, about = "Open Access classification of publication records")]
struct Cli {
    /// TOML config with [classifier], [detector], [harvest] and [report] sections.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// More log output; repeat for debug level.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate or normalize journal, repository, ISSN-L and PMC lists.
    #[command(subcommand)]
    Registry(RegistryCommand),
    /// Harvest an OAI-PMH endpoint or a paged JSON API into a snapshot.
    Harvest(HarvestArgs),
    /// Join records with evidence snapshots into bundles.
    Ingest(IngestArgs),
    /// Classify evidence bundles.
    Classify(ClassifyArgs),
    /// Build the delayed OA journal registry.
    DetectDelayed(DetectArgs),
    /// Aggregate classifications into OA-share reports.
    Report(ReportArgs),
}

#[derive(Subcommand, Debug)]
enum RegistryCommand {
    /// Check every row and report all problems.
    Validate(RegistryArgs),
    /// Validate, merge duplicates and write a normalized CSV.
    Build {
        #[command(flatten)]
        args: RegistryArgs,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum RegistryKind {
    Journal,
    Repository,
    Link,
    Pmc,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum JournalSourceArg {
    Doaj,
    Gold,
    Pmc,
}

#[derive(Args, Debug)]
struct RegistryArgs {
    #[arg(long, value_enum)]
    kind: RegistryKind,
    /// Journal list flavour; only for --kind journal.
    #[arg(long, value_enum, default_value = "doaj")]
    source: JournalSourceArg,
    input: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ProtocolArg {
    Oai,
    Json,
}

#[derive(Args, Debug)]
struct HarvestArgs {
    #[arg(long)]
    endpoint: String,
    #[arg(long, value_enum, default_value = "oai")]
    protocol: ProtocolArg,
    #[arg(long)]
    from: Option<String>,
    #[arg(long)]
    until: Option<String>,
    /// OAI-PMH set to harvest.
    #[arg(long = "set")]
    set_spec: Option<String>,
    /// Continue from the saved state in the output directory.
    #[arg(long, conflicts_with = "token")]
    resume: bool,
    /// Continue from an explicit resumption token or cursor.
    #[arg(long)]
    token: Option<String>,
    /// File of DOIs, one per line, fetched one by one (json protocol).
    #[arg(long)]
    ids: Option<PathBuf>,
    /// Output directory; defaults to a directory under the cache dir.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    rps: Option<f64>,
    #[arg(long)]
    max_retries: Option<u32>,
    /// Stop after this many pages.
    #[arg(long)]
    max_pages: Option<u32>,
    /// Repository id recorded on harvested locations.
    #[arg(long)]
    repo_id: Option<String>,
}

#[derive(Args, Debug)]
struct JournalLists {
    /// DOAJ-like full OA journal list (repeatable).
    #[arg(long)]
    doaj: Vec<PathBuf>,
    /// Other full OA journal list (repeatable).
    #[arg(long)]
    gold_list: Vec<PathBuf>,
    /// ISSN to ISSN-L table.
    #[arg(long)]
    link: Option<PathBuf>,
    /// PMC-style embargo list.
    #[arg(long)]
    pmc: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct IngestArgs {
    /// Publication records, NDJSON.
    #[arg(long)]
    records: PathBuf,
    /// Crossref-like snapshot (repeatable).
    #[arg(long)]
    crossref: Vec<PathBuf>,
    /// Location snapshot, e.g. Unpaywall-like or harvested (repeatable).
    #[arg(long)]
    locations: Vec<PathBuf>,
    #[command(flatten)]
    lists: JournalLists,
    /// Bundles output, NDJSON.
    #[arg(long)]
    out: PathBuf,
    /// Orphaned evidence report, CSV.
    #[arg(long)]
    orphans: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ClassifyArgs {
    #[arg(long)]
    bundles: PathBuf,
    /// Repository registry CSV.
    #[arg(long)]
    repositories: Option<PathBuf>,
    /// Delayed OA journal registry CSV.
    #[arg(long)]
    delayed: Option<PathBuf>,
    #[arg(long)]
    grace_days: Option<u32>,
    /// Classifications output, NDJSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args, Debug)]
struct DetectArgs {
    #[arg(long)]
    classifications: PathBuf,
    /// Bundles for license-delay detection.
    #[arg(long)]
    bundles: Option<PathBuf>,
    #[command(flatten)]
    lists: JournalLists,
    /// Date of the evidence snapshot, YYYY-MM-DD.
    #[arg(long)]
    reference_date: Option<chrono::NaiveDate>,
    /// Per-journal cohort statistics, CSV.
    #[arg(long)]
    stats: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Primary,
    Multi,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct ReportArgs {
    #[arg(long)]
    classifications: PathBuf,
    /// Comma-separated: year, journal_title, document_type, access_mode, institution, issn_l.
    #[arg(long, value_delimiter = ',')]
    group_by: Option<Vec<String>>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    env_logger::Builder::new().filter_level(level).format_timestamp(None).init();
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.error);
            ExitCode::from(e.code)
        }
    }
}
