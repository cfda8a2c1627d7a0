use std::fs::{self, OpenOptions};
use std::io::Write;
use std::path::{Path, PathBuf};

use oaclass_core::ingest::{location_snapshot_line, oai_record_to_location, parse_oai_dc};
use serde::{Deserialize, Serialize};
use url::Url;

use crate::{io_err, HarvestError, HarvestJob, HttpClient};

pub const STATE_FILE: &str = "state.json";
pub const RECORDS_FILE: &str = "records.ndjson";
pub const RAW_DIR: &str = "raw";

/// Progress of a harvest, saved after every page.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct HarvestState {
    pub endpoint_url: String,
    pub next_token: Option<String>,
    pub pages: u32,
    pub records: u64,
    pub complete: bool,
}

impl HarvestState {
    pub fn load(out_dir: &Path) -> Result<Option<Self>, HarvestError> {
        let path = out_dir.join(STATE_FILE);
        if !path.exists() {
            return Ok(None);
        }
        let text = fs::read_to_string(&path).map_err(io_err(&path))?;
        serde_json::from_str(&text)
            .map(Some)
            .map_err(|e| HarvestError::Malformed { url: path.display().to_string(), message: e.to_string() })
    }

    pub(crate) fn save(&self, out_dir: &Path) -> Result<(), HarvestError> {
        let path = out_dir.join(STATE_FILE);
        let tmp = out_dir.join(".state.json.tmp");
        let body = serde_json::to_string_pretty(self).expect("state serializes");
        fs::write(&tmp, body + "\n").map_err(io_err(&tmp))?;
        fs::rename(&tmp, &path).map_err(io_err(&path))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OaiOutcome {
    /// Pages fetched in this run.
    pub pages: u32,
    /// Records written to the sidecar in this run.
    pub records: u64,
    /// Records without a DOI or landing URL, deleted records, and records
    /// that failed to parse.
    pub skipped: u64,
    pub requests: u64,
    pub state: HarvestState,
    pub records_path: PathBuf,
}

fn list_records_url(job: &HarvestJob, token: Option<&str>) -> Result<String, HarvestError> {
    let mut url = Url::parse(&job.endpoint_url).map_err(|e| HarvestError::Config(e.to_string()))?;
    {
        let mut q = url.query_pairs_mut();
        q.append_pair("verb", "ListRecords");
        match token {
            Some(t) => {
                q.append_pair("resumptionToken", t);
            }
            None => {
                q.append_pair("metadataPrefix", "oai_dc");
                if let Some(f) = &job.from {
                    q.append_pair("from", f);
                }
                if let Some(u) = &job.until {
                    q.append_pair("until", u);
                }
                if let Some(s) = &job.set_spec {
                    q.append_pair("set", s);
                }
            }
        }
    }
    Ok(url.into())
}

fn clear_previous(out_dir: &Path) -> Result<(), HarvestError> {
    let raw = out_dir.join(RAW_DIR);
    if raw.exists() {
        fs::remove_dir_all(&raw).map_err(io_err(&raw))?;
    }
    for name in [RECORDS_FILE, STATE_FILE] {
        let p = out_dir.join(name);
        if p.exists() {
            fs::remove_file(&p).map_err(io_err(&p))?;
        }
    }
    Ok(())
}

/// Runs `ListRecords` with `metadataPrefix=oai_dc` and follows resumption
/// tokens until the list is exhausted or `max_pages` is reached.
///
/// Writes each raw response to `raw/page-NNNN.xml`, appends parsed locations
/// to `records.ndjson` in the location snapshot format, and saves
/// `state.json` after every page. With `resume_state` set the run continues
/// an earlier one in the same directory; otherwise earlier output is removed.
pub fn harvest_oai(job: &HarvestJob, out_dir: &Path) -> Result<OaiOutcome, HarvestError> {
    job.validate()?;
    fs::create_dir_all(out_dir).map_err(io_err(out_dir))?;
    let mut state = match &job.resume_state {
        Some(token) => {
            let mut s = HarvestState::load(out_dir)?.unwrap_or_default();
            s.next_token = Some(token.clone());
            s.complete = false;
            s
        }
        None => {
            clear_previous(out_dir)?;
            HarvestState::default()
        }
    };
    state.endpoint_url = job.endpoint_url.clone();
    let raw_dir = out_dir.join(RAW_DIR);
    fs::create_dir_all(&raw_dir).map_err(io_err(&raw_dir))?;
    let records_path = out_dir.join(RECORDS_FILE);
    let mut sidecar = OpenOptions::new().create(true).append(true).open(&records_path).map_err(io_err(&records_path))?;

    let mut client = HttpClient::new(&job.politeness, &job.headers)?;
    let mut outcome = OaiOutcome {
        pages: 0,
        records: 0,
        skipped: 0,
        requests: 0,
        state: state.clone(),
        records_path: records_path.clone(),
    };
    let source = job.repo_hint.clone().unwrap_or_else(|| "oai".to_string());

    loop {
        if job.max_pages.is_some_and(|m| outcome.pages >= m) {
            log::info!("stopping after {} pages; resume with token {:?}", outcome.pages, state.next_token);
            break;
        }
        let url = list_records_url(job, state.next_token.as_deref())?;
        let resp = client.get(&url)?;
        outcome.requests = client.requests();
        match resp.status {
            200 => {}
            401 | 403 => return Err(HarvestError::Auth { status: resp.status, url }),
            s => return Err(HarvestError::Transport { url, message: format!("HTTP {s}") }),
        }
        let page_no = state.pages + 1;
        let raw_path = raw_dir.join(format!("page-{page_no:04}.xml"));
        fs::write(&raw_path, &resp.body).map_err(io_err(&raw_path))?;

        let text = resp.text();
        let page = parse_oai_dc(&text).map_err(|e| HarvestError::Malformed { url: url.clone(), message: e.0 })?;
        state.pages = page_no;
        outcome.pages += 1;
        if let Some(err) = page.error {
            if err.code == "noRecordsMatch" {
                log::info!("{url}: no records match");
                state.next_token = None;
                state.complete = true;
                state.save(out_dir)?;
                break;
            }
            state.save(out_dir)?;
            return Err(HarvestError::Protocol { code: err.code, message: err.message });
        }
        let before = outcome.records;
        let mut lines = String::new();
        for (i, rec) in page.records.iter().enumerate() {
            match rec {
                Ok(rec) => match oai_record_to_location(rec, job.repo_hint.as_deref(), &source) {
                    Some((doi, loc)) => {
                        lines.push_str(&location_snapshot_line(&doi, std::slice::from_ref(&loc)));
                        lines.push('\n');
                        outcome.records += 1;
                    }
                    None => {
                        log::debug!("{}: no DOI or landing URL, or deleted; skipped", rec.identifier);
                        outcome.skipped += 1;
                    }
                },
                Err(e) => {
                    log::warn!("{}: record {i}: {}", raw_path.display(), e.message);
                    outcome.skipped += 1;
                }
            }
        }
        sidecar.write_all(lines.as_bytes()).map_err(io_err(&records_path))?;
        sidecar.flush().map_err(io_err(&records_path))?;
        state.records += outcome.records - before;
        state.next_token = page.next_token().map(String::from);
        state.complete = state.next_token.is_none();
        state.save(out_dir)?;
        if state.complete {
            break;
        }
    }
    outcome.requests = client.requests();
    outcome.state = state;
    Ok(outcome)
}
