use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Duration;

use oaclass_harvest::fixture::{oai_error, FixtureResponse, FixtureServer};
use oaclass_harvest::{harvest_oai, HarvestJob, HarvestState, Politeness, Protocol};

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/e2e")
}

fn page(n: u32) -> String {
    fs::read_to_string(fixtures().join(format!("oai/page-{n}.xml"))).unwrap()
}

/// Serves the three checked-in pages of the repository fixture, chained by
/// the tokens they carry.
fn oai_server() -> FixtureServer {
    let pages = [page(1), page(2), page(3)];
    FixtureServer::start(move |r| {
        let body = match r.query.get("resumptionToken").map(String::as_str) {
            None if r.query.get("metadataPrefix").map(String::as_str) == Some("oai_dc") => pages[0].clone(),
            Some("pub-2") => pages[1].clone(),
            Some("pub-3") => pages[2].clone(),
            _ => oai_error("badArgument", "unexpected request"),
        };
        FixtureResponse::ok(body)
    })
}

fn job(server: &FixtureServer) -> HarvestJob {
    let mut job = HarvestJob::new(format!("{}/oai", server.url()), Protocol::OaiPmh);
    job.politeness = Politeness { max_requests_per_second: 50.0, max_retries: 2, backoff_base_ms: 10 };
    job.repo_hint = Some("pub-bielefeld".into());
    job
}

fn sorted_lines(path: &Path) -> Vec<String> {
    let mut v: Vec<String> = fs::read_to_string(path).unwrap().lines().map(String::from).collect();
    v.sort();
    v
}

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn harvest_fixtures(work: &Path) -> Result<(), String> {
    let server = oai_server();
    let full = harvest_oai(&job(&server), &work.join("full")).map_err(|e| e.to_string())?;
    check(server.request_count() == 3 && full.requests == 3, || format!("3-page chain took {} requests", server.request_count()))?;
    check(full.records == 3 && full.skipped == 2 && full.state.complete, || format!("3-page chain outcome {full:?}"))?;

    let server = oai_server();
    let dir = work.join("resumed");
    let mut first = job(&server);
    first.max_pages = Some(1);
    let partial = harvest_oai(&first, &dir).map_err(|e| e.to_string())?;
    check(!partial.state.complete && partial.requests == 1, || format!("interrupted run {partial:?}"))?;
    let state = HarvestState::load(&dir).map_err(|e| e.to_string())?.ok_or("no saved state")?;
    let mut second = job(&server);
    second.resume_state = state.next_token;
    let rest = harvest_oai(&second, &dir).map_err(|e| e.to_string())?;
    check(rest.requests == 2 && server.request_count() == 3, || format!("resume took {} requests in total", server.request_count()))?;
    check(sorted_lines(&rest.records_path) == sorted_lines(&full.records_path), || "resumed records differ".into())?;

    let server = FixtureServer::sequence(vec![
        FixtureResponse::status(503).with_header("Retry-After", "2"),
        FixtureResponse::ok(page(3)),
    ]);
    let out = harvest_oai(&job(&server), &work.join("retry")).map_err(|e| e.to_string())?;
    let seen = server.requests();
    check(seen.len() == 2 && out.requests == 2, || format!("503 fixture took {} requests", seen.len()))?;
    let gap = seen[1].at - seen[0].at;
    check(gap >= Duration::from_secs(2), || format!("retried after {gap:?}"))?;
    Ok(())
}

fn oaclass(args: &[&str]) -> Result<std::process::Output, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_oaclass"))
        .args(args)
        .env("OACLASS_CACHE_DIR", env!("CARGO_TARGET_TMPDIR"))
        .output()
        .map_err(|e| e.to_string())?;
    Ok(out)
}

fn run(args: &[&str]) -> Result<(), String> {
    let out = oaclass(args)?;
    check(out.status.success(), || format!("oaclass {} failed: {}", args.join(" "), String::from_utf8_lossy(&out.stderr)))
}

fn compare(actual: &Path, expected: &str) -> Result<(), String> {
    let want = fs::read(fixtures().join("expected").join(expected)).map_err(|e| format!("{expected}: {e}"))?;
    let got = fs::read(actual).map_err(|e| format!("{}: {e}", actual.display()))?;
    check(got == want, || format!("{} differs from golden {expected}", actual.display()))
}

fn pipeline(work: &Path) -> Result<(), String> {
    let f = fixtures();
    let p = |name: &str| f.join(name).to_string_lossy().into_owned();
    let w = |name: &str| work.join(name).to_string_lossy().into_owned();
    let server = oai_server();
    let endpoint = format!("{}/oai", server.url());
    run(&["harvest", "--endpoint", &endpoint, "--out", &w("harvest"), "--rps", "50", "--repo-id", "pub-bielefeld"])?;
    check(server.request_count() == 3, || format!("CLI harvest took {} requests", server.request_count()))?;
    run(&[
        "ingest",
        "--records", &p("records.ndjson"),
        "--crossref", &p("crossref.ndjson"),
        "--locations", &p("unpaywall.ndjson"),
        "--locations", &w("harvest/records.ndjson"),
        "--doaj", &p("doaj.csv"),
        "--link", &p("link.csv"),
        "--pmc", &p("pmc.csv"),
        "--out", &w("bundles.ndjson"),
        "--orphans", &w("orphans.csv"),
    ])?;
    run(&["classify", "--bundles", &w("bundles.ndjson"), "--repositories", &p("repositories.csv"), "--out", &w("classifications.ndjson")])?;
    run(&["report", "--classifications", &w("classifications.ndjson"), "--group-by", "year", "--out", &w("report_by_year.csv")])?;
    run(&[
        "report",
        "--classifications", &w("classifications.ndjson"),
        "--group-by", "institution",
        "--mode", "multi",
        "--format", "json",
        "--out", &w("report_by_institution.json"),
    ])?;
    compare(&work.join("report_by_year.csv"), "report_by_year.csv")?;
    compare(&work.join("report_by_institution.json"), "report_by_institution.json")?;
    compare(&work.join("orphans.csv"), "orphans.csv")?;

    let bad = oaclass(&["report", "--classifications", &w("classifications.ndjson"), "--group-by", "publisher"])?;
    check(bad.status.code() == Some(2), || format!("unknown group_by exited with {:?}", bad.status.code()))?;
    Ok(())
}

pub fn harvest_and_golden() -> Result<String, String> {
    let work = Path::new(env!("CARGO_TARGET_TMPDIR")).join("acceptance-e2e");
    let _ = fs::remove_dir_all(&work);
    fs::create_dir_all(&work).map_err(|e| e.to_string())?;
    harvest_fixtures(&work)?;
    pipeline(&work)?;
    Ok("3-page chain, interrupted resume and 503 fixtures exact; golden reports byte-identical".into())
}
